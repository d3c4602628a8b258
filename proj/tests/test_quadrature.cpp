#include <catch2/catch_amalgamated.hpp>
#include <cliffock/fields.hpp>
#include <cliffock/quadrature.hpp>

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace cliffock;
using Catch::Approx;

namespace {
const double kPi = std::numbers::pi;

double integrate(const QuadratureRule& r, const std::function<double(const Eigen::VectorXd&)>& f) {
  double acc = 0.0;
  for (int i = 0; i < r.node_count(); ++i) acc += r.weights[i] * f(r.nodes.row(i).transpose());
  return acc;
}
}  // namespace

TEST_CASE("full-space rule against Gaussian oracles") {
  const Weight iso1 = make_quadratic_iso(1);
  const QuadratureRule r1 = gauss_full_space(iso1, 12);
  CHECK(r1.weights.minCoeff() > 0.0);
  // int e^{-2|x|^2} dx over R^2 = pi/2
  CHECK(r1.weights.sum() == Approx(kPi / 2).epsilon(1e-12));
  // Gaussian second moment: int x0^2 e^{-2|x|^2} = (1/4) * pi/2
  CHECK(integrate(r1, [](const Eigen::VectorXd& x) { return x[0] * x[0]; }) ==
        Approx(kPi / 8).epsilon(1e-12));
  // odd symmetry
  CHECK(integrate(r1, [](const Eigen::VectorXd& x) { return x[0]; }) == Approx(0.0).margin(1e-14));

  const Weight iso2 = make_quadratic_iso(2);
  const QuadratureRule r2 = gauss_full_space(iso2, 8);
  CHECK(r2.weights.sum() == Approx(std::pow(kPi / 2, 1.5)).epsilon(1e-12));
}

TEST_CASE("full-space rule for a rotated quadratic weight") {
  RatMat q(2, RatVec(2, Rational(0)));
  q[0][0] = Rational(2);
  q[1][1] = Rational(1);
  q[0][1] = q[1][0] = Rational(1, 2);
  const Weight w = make_quadratic(q);
  const QuadratureRule r = gauss_full_space(w, 14);
  // oracle: int x_i x_j e^{-x^T A x} = (1/2) (A^{-1})_ij pi^{d/2} / sqrt(det A), A = 2Q
  const Eigen::MatrixXd a = 2.0 * w.q_matrix();
  const Eigen::MatrixXd ainv = a.inverse();
  const double mass = kPi / std::sqrt(a.determinant());
  CHECK(r.weights.sum() == Approx(mass).epsilon(1e-12));
  CHECK(integrate(r, [](const Eigen::VectorXd& x) { return x[0] * x[0]; }) ==
        Approx(0.5 * ainv(0, 0) * mass).epsilon(1e-12));
  CHECK(integrate(r, [](const Eigen::VectorXd& x) { return x[0] * x[1]; }) ==
        Approx(0.5 * ainv(0, 1) * mass).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_full_space(zero_weight(1), 8), std::invalid_argument);
}

TEST_CASE("order refinement is inert beyond the exactness threshold") {
  const Weight w = make_quadratic_iso(1);
  auto poly = [](const Eigen::VectorXd& x) {
    return 1.0 + x[0] * x[0] * x[1] * x[1] - 3.0 * x[1] * x[1];
  };
  const double a = integrate(gauss_full_space(w, 6), poly);
  const double b = integrate(gauss_full_space(w, 16), poly);
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
}

TEST_CASE("ball rules against closed-form volumes") {
  SECTION("disk") {
    const QuadratureRule r = ball_rule(Eigen::Vector2d(0, 0), 1.0, 8);
    CHECK(r.weights.minCoeff() > 0.0);
    CHECK(r.weights.sum() == Approx(kPi).epsilon(1e-12));
    CHECK(integrate(r, [](const Eigen::VectorXd& x) { return x.squaredNorm(); }) ==
          Approx(kPi / 2).epsilon(1e-12));
  }
  SECTION("shifted disk") {
    const QuadratureRule r = ball_rule(Eigen::Vector2d(1, 2), 0.5, 6);
    CHECK(r.weights.sum() == Approx(kPi * 0.25).epsilon(1e-12));
  }
  SECTION("3-ball") {
    const QuadratureRule r = ball_rule(Eigen::Vector3d(0, 0, 0), 1.0, 8);
    CHECK(r.weights.sum() == Approx(4.0 * kPi / 3).epsilon(1e-12));
  }
  SECTION("4-ball") {
    const QuadratureRule r = ball_rule(Eigen::Vector4d(0, 0, 0, 0), 1.0, 8);
    CHECK(r.weights.sum() == Approx(kPi * kPi / 2).epsilon(1e-12));
  }
  SECTION("polynomial exactness in the product regime") {
    std::mt19937_64 rng(51);
    const auto p = testutil::random_poly(3, 0, 5, rng);
    auto f = [&](const Eigen::VectorXd& x) {
      return p.evaluate({x[0], x[1], x[2]})[0];
    };
    const double lo = integrate(ball_rule(Eigen::Vector3d(0.2, -0.1, 0.4), 0.8, 7), f);
    const double hi = integrate(ball_rule(Eigen::Vector3d(0.2, -0.1, 0.4), 0.8, 25), f);
    CHECK(lo == Approx(hi).epsilon(1e-12));
  }
  SECTION("monte carlo fallback dimension") {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
    const QuadratureRule r = ball_rule(c, 1.0, 4, 7, 20000);
    const double vol = std::pow(kPi, 2.5) / std::tgamma(3.5);
    CHECK(r.weights.sum() == Approx(vol).epsilon(1e-12));  // constant is exact by design
    const QuadratureRule r2 = ball_rule(c, 1.0, 4, 7, 20000);
    CHECK((r.nodes - r2.nodes).cwiseAbs().maxCoeff() == 0.0);  // fixed seed
  }
}

TEST_CASE("rule serialization") {
  const QuadratureRule r = ball_rule(Eigen::Vector2d(0, 0), 1.0, 4);
  std::ostringstream os;
  write_rule_csv(r, os);
  const std::string s = os.str();
  CHECK(s.rfind("x0,x1,weight\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == r.node_count() + 1);
}

TEST_CASE("weighted inner products") {
  const Weight w = make_quadratic_iso(1);
  const QuadratureRule rule = gauss_full_space(w, 10);
  auto e0 = [](const Eigen::VectorXd&) { return Multivector<double>::scalar(1, 1.0); };
  const Multivector<double> g = weighted_inner(e0, e0, rule, w);
  CHECK(g[0] == Approx(kPi / 2).epsilon(1e-12));
  CHECK(std::abs(g[1]) < 1e-14);

  SECTION("hermitian symmetry (f,g) = conj((g,f))") {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 5; ++rep) {
      const auto pf = testutil::random_poly(2, 1, 3, rng);
      const auto pg = testutil::random_poly(2, 1, 3, rng);
      const auto fg = weighted_inner(poly_field_fn(pf), poly_field_fn(pg), rule, w);
      const auto gf = weighted_inner(poly_field_fn(pg), poly_field_fn(pf), rule, w);
      CHECK(norm(fg - conjugate(gf)) < 1e-10 * (1.0 + norm(fg)));
    }
  }

  SECTION("norm is positive and scalar for paravector fields") {
    // u = x0 e0 + x1 e1 is paravector-valued pointwise
    PolyField<Rational> u(2, 1);
    u += PolyField<Rational>::coordinate(2, 1, 0);
    u += PolyField<Rational>::coordinate(2, 1, 1).left_mul(Multivector<Rational>::blade(1, 1));
    const auto uu = weighted_inner(poly_field_fn(u), poly_field_fn(u), rule, w);
    CHECK(uu[0] > 0.0);
    CHECK(std::abs(uu[1]) < 1e-13 * uu[0]);
  }

  SECTION("|lambda u| scaling against the weighted norm") {
    const Weight w2 = make_quadratic_iso(2);
    const QuadratureRule rule2 = gauss_full_space(w2, 8);
    PolyField<Rational> u(3, 2);
    u += PolyField<Rational>::coordinate(3, 2, 0);
    u += PolyField<Rational>::coordinate(3, 2, 1).left_mul(Multivector<Rational>::blade(2, 0b01));
    u += PolyField<Rational>::coordinate(3, 2, 2).left_mul(Multivector<Rational>::blade(2, 0b10));
    std::mt19937_64 rng(59);
    for (int rep = 0; rep < 5; ++rep) {
      const auto lam_i = testutil::random_multivector<std::int64_t>(2, rng);
      Multivector<Rational> lam(2);
      for (BladeIndex b = 0; b < 4; ++b) lam[b] = Rational(lam_i[b]);
      const auto ulam = u.left_mul(lam);
      const double n_u = weighted_norm_sq(poly_field_fn(u), rule2, w2);
      const double n_lu = weighted_norm_sq(poly_field_fn(ulam), rule2, w2);
      double lam_sq = 0.0;
      for (BladeIndex b = 0; b < 4; ++b) lam_sq += to_double(lam[b]) * to_double(lam[b]);
      CHECK(n_lu == Approx(lam_sq * n_u).epsilon(1e-10).margin(1e-12));
    }
  }

  SECTION("module Cauchy-Schwarz") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 10; ++rep) {
      const auto pf = testutil::random_poly(2, 1, 3, rng);
      const auto pg = testutil::random_poly(2, 1, 3, rng);
      const double lhs = norm(weighted_inner(poly_field_fn(pf), poly_field_fn(pg), rule, w));
      const double nf = std::sqrt(weighted_norm_sq(poly_field_fn(pf), rule, w));
      const double ng = std::sqrt(weighted_norm_sq(poly_field_fn(pg), rule, w));
      CHECK(lhs <= 2.0 * nf * ng * (1.0 + 1e-12));
    }
  }

  SECTION("rule/weight mismatch is rejected") {
    const Weight other = make_quadratic_iso(1, Rational(2));
    CHECK_THROWS_AS(weighted_inner(e0, e0, rule, other), std::invalid_argument);
  }
}
