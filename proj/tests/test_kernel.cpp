#include <catch2/catch_amalgamated.hpp>
#include <cliffock/fields.hpp>
#include <cliffock/kernel.hpp>

#include <complex>
#include <numbers>
#include <random>

using namespace cliffock;
using Catch::Approx;

namespace {

const double kPi = std::numbers::pi;

KernelModel fock_model(int n, int degree, int order, KernelBuildOptions opts = {}) {
  const Weight w = make_quadratic_iso(n);
  return build_model(monogenic_basis(n, degree), w, gauss_full_space(w, order), opts);
}

// truncated classical kernel (2/pi) sum_{k<=d} (2 z conj(w))^k / k!
std::complex<double> fock_series(std::complex<double> z, std::complex<double> w, int d) {
  const std::complex<double> t = 2.0 * z * std::conj(w);
  std::complex<double> term = 1.0, acc = 1.0;
  for (int k = 1; k <= d; ++k) {
    term *= t / static_cast<double>(k);
    acc += term;
  }
  return 2.0 / kPi * acc;
}

Eigen::VectorXd vec2(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

TEST_CASE("degree-0 model matches constant-function norms") {
  const KernelModel m = fock_model(1, 0, 6);
  REQUIRE(m.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(m.col_scale[i] * m.col_scale[i] == Approx(kPi / 2));
  CHECK((m.gram_real - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);

  // B(y, 0) is the constant (2/pi) e0
  const KernelEvaluation ev = evaluate_kernel(m, vec2(0, 0), vec2(0.37, -0.8));
  CHECK(ev.value[0] == Approx(2.0 / kPi).epsilon(1e-12));
  CHECK(std::abs(ev.value[1]) < 1e-13);
  CHECK(ev.residual < 1e-12);
}

TEST_CASE("gram structure") {
  const KernelModel m = fock_model(2, 3, 6);
  SECTION("module hermitian symmetry") {
    for (BladeIndex c = 0; c < m.blades(); ++c) {
      const double sign = conjugation_sign(c);
      const Eigen::MatrixXd diff = m.gram_cl[c] - sign * m.gram_cl[c].transpose();
      CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("scalar part of the Clifford Gram is the real Gram") {
    CHECK((m.gram_cl[0] - m.gram_real).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("distinct degrees are orthogonal under a radial weight") {
    for (int i = 0; i < m.size(); ++i)
      for (int j = 0; j < m.size(); ++j)
        if (m.grades[i] != m.grades[j]) CHECK(std::abs(m.gram_real(i, j)) < 1e-12);
  }
}

TEST_CASE("reproducing property on basis elements") {
  const KernelModel m = fock_model(1, 4, 10);
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::VectorXd x = vec2(u(rng), u(rng));
    const KernelCoeffs kc = kernel_coefficients(m, x);
    CHECK(kc.residual < 1e-10);
    FieldFn bfield = [&](const Eigen::VectorXd& y) { return eval_in_basis(m, kc.c, y); };
    const Eigen::MatrixXd ex = m.basis_eval(x);
    for (int nidx = 0; nidx < m.size(); ++nidx) {
      const int col = nidx;
      FieldFn rn = [&, col](const Eigen::VectorXd& y) {
        const Eigen::MatrixXd e = m.basis_eval(y);
        Multivector<double> v(m.alg);
        for (BladeIndex a = 0; a < m.blades(); ++a) v[a] = e(a, col);
        return v;
      };
      // u(x) = (B(.,x), u)_phi with conjugation on the kernel slot
      const Multivector<double> rep_val = weighted_inner(bfield, rn, m.rule, m.weight);
      Multivector<double> expect(m.alg);
      for (BladeIndex a = 0; a < m.blades(); ++a) expect[a] = ex(a, col);
      CHECK(norm(rep_val - expect) < 1e-9 * (1.0 + norm(expect)));
    }
  }
}

TEST_CASE("fock kernel oracle, n = 1") {
  const int d = 8;
  const KernelModel m = fock_model(1, d, 16);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 12; ++rep) {
    const Eigen::VectorXd x = vec2(u(rng), u(rng));
    const Eigen::VectorXd y = vec2(u(rng), u(rng));
    const KernelEvaluation ev = evaluate_kernel(m, x, y);
    const std::complex<double> oracle =
        fock_series({y[0], y[1]}, {x[0], x[1]}, d);  // B(y, x), monogenic slot first
    CHECK(ev.value[0] == Approx(oracle.real()).margin(1e-9));
    CHECK(ev.value[1] == Approx(oracle.imag()).margin(1e-9));
  }
}

TEST_CASE("kernel symmetry and diagonal scalarity") {
  const KernelModel m = fock_model(2, 3, 8);
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int rep = 0; rep < 4; ++rep) {
    Eigen::VectorXd x(3), y(3);
    for (int j = 0; j < 3; ++j) {
      x[j] = u(rng);
      y[j] = u(rng);
    }
    const auto bxy = evaluate_kernel(m, x, y).value;
    const auto byx = evaluate_kernel(m, y, x).value;
    // observed numerically; the source theory never asserts it
    CHECK(norm(byx - conjugate(bxy)) < 1e-8 * (1.0 + norm(bxy)));

    const auto diag = evaluate_kernel(m, x, x).value;
    CHECK(diag[0] > 0.0);
    double off = 0.0;
    for (BladeIndex a = 1; a < m.blades(); ++a) off += diag[a] * diag[a];
    CHECK(off <= 1e-16 * diag[0] * diag[0]);
  }
}

TEST_CASE("diagonal sup identity") {
  SECTION("frozen value at the origin, d = 0") {
    const KernelModel m = fock_model(1, 0, 6);
    const auto [lhs, rhs] = diagonal_sup_check(m, vec2(0, 0));
    CHECK(rhs == Approx(2.0 / kPi).epsilon(1e-12));
    CHECK(lhs == Approx(rhs).epsilon(1e-10));
  }
  SECTION("random points, n = 1 and n = 2") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const KernelModel m1 = fock_model(1, 6, 12);
    for (int rep = 0; rep < 5; ++rep) {
      const auto [lhs, rhs] = diagonal_sup_check(m1, vec2(u(rng), u(rng)));
      CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
    const KernelModel m2 = fock_model(2, 3, 8);
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::VectorXd x(3);
      for (int j = 0; j < 3; ++j) x[j] = u(rng);
      const auto [lhs, rhs] = diagonal_sup_check(m2, x);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
  }
}

TEST_CASE("diagonal grows with the space") {
  const Eigen::VectorXd x = vec2(0.6, -0.4);
  double prev = 0.0;
  for (int d = 0; d <= 4; ++d) {
    const KernelModel m = fock_model(1, d, 10);
    const double diag = scalar_part(evaluate_kernel(m, x, x).value);
    CHECK(diag >= prev - 1e-12);
    prev = diag;
  }
}

TEST_CASE("projection") {
  const KernelModel m = fock_model(1, 3, 10);
  SECTION("fixes the model space") {
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(m.size());
    c0[0] = 0.7;
    c0[3 % m.size()] = -1.3;
    FieldFn g = [&](const Eigen::VectorXd& x) { return eval_in_basis(m, c0, x); };
    const Eigen::VectorXd c1 = project(m, g);
    CHECK((c1 - c0).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("Bessel inequality for a non-monogenic field") {
    FieldFn g = [](const Eigen::VectorXd& x) {
      return Multivector<double>::scalar(1, x[0]);
    };
    const Eigen::VectorXd c = project(m, g);
    const double proj_norm_sq = c.dot(m.gram_real * c);
    const double g_norm_sq = weighted_norm_sq(g, m.rule, m.weight);
    CHECK(proj_norm_sq <= g_norm_sq * (1.0 + 1e-12));
  }
  SECTION("odd-symmetric orthogonal field projects to zero") {
    // conj Fueter: x0 - x1 e1 is anti-monogenic, orthogonal to the model
    FieldFn g = [](const Eigen::VectorXd& x) {
      Multivector<double> v(1);
      v[0] = x[0];
      v[1] = -x[1];
      return v;
    };
    const Eigen::VectorXd c = project(m, g);
    CHECK(c.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("model guards") {
  const Weight w = make_quadratic_iso(1);
  SECTION("under-resolved quadrature is rejected") {
    CHECK_THROWS_AS(build_model(monogenic_basis(1, 6), w, gauss_full_space(w, 3)),
                    std::invalid_argument);
  }
  SECTION("empty basis is rejected") {
    GradedBasis empty;
    empty.vars = 2;
    empty.alg = 1;
    CHECK_THROWS_AS(build_model(empty, w, gauss_full_space(w, 6)), std::invalid_argument);
  }
  SECTION("coefficients on an empty model are rejected") {
    KernelModel empty;
    CHECK_THROWS_AS(kernel_coefficients(empty, vec2(0, 0)), std::invalid_argument);
  }
  SECTION("residual above tolerance raises a flagged error") {
    KernelBuildOptions opts;
    opts.tol_repro = 1e-17;
    const KernelModel m = fock_model(1, 4, 10, opts);
    try {
      kernel_coefficients(m, vec2(0.3, 0.4));
      FAIL("expected KernelResidualError");
    } catch (const KernelResidualError& e) {
      CHECK(e.residual > 1e-17);
      CHECK(e.residual < 1e-8);
    }
  }
}

TEST_CASE("conditioning cap prunes whole degree blocks") {
  // anisotropic weight: monomial-flavored columns of different degrees mix
  const Weight w = make_quadratic(
      [] {
        RatMat q(2, RatVec(2, Rational(0)));
        q[0][0] = 1;
        q[1][1] = 4;
        return q;
      }());
  const QuadratureRule rule = gauss_full_space(w, 14);
  KernelBuildOptions tight;
  tight.cond_cap = 1.5;
  const KernelModel pruned = build_model(monogenic_basis(1, 8), w, rule, tight);
  const KernelModel full = build_model(monogenic_basis(1, 8), w, rule);
  CHECK(full.pruned.empty());
  CHECK_FALSE(pruned.pruned.empty());
  CHECK(pruned.degree < full.degree);
  CHECK(pruned.cond_estimate <= 1.5);
  // the reduced model still reproduces itself
  CHECK(kernel_coefficients(pruned, Eigen::Vector2d(0.3, -0.2)).residual < 1e-10);
  KernelBuildOptions impossible;
  impossible.cond_cap = 0.5;
  CHECK_THROWS_AS(build_model(monogenic_basis(1, 8), w, rule, impossible), std::runtime_error);
}

TEST_CASE("harmonic scalar model") {
  const Weight w = make_quadratic_iso(1);
  SECTION("degree 0 diagonal is 2/pi") {
    const KernelModel m = harmonic_model(harmonic_basis(1, 0), w, gauss_full_space(w, 6));
    CHECK(evaluate_harmonic_kernel(m, vec2(0, 0), vec2(0, 0)) == Approx(2.0 / kPi).epsilon(1e-12));
  }
  const KernelModel m = harmonic_model(harmonic_basis(1, 5), w, gauss_full_space(w, 12));
  SECTION("reproduces harmonic basis elements") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int rep = 0; rep < 4; ++rep) {
      const Eigen::VectorXd x = vec2(u(rng), u(rng));
      const Eigen::MatrixXd e = m.basis_eval(x);
      FieldFn bfield = [&](const Eigen::VectorXd& y) {
        return Multivector<double>::scalar(0, evaluate_harmonic_kernel(m, x, y));
      };
      for (int col = 0; col < m.size(); ++col) {
        FieldFn rn = [&, col](const Eigen::VectorXd& y) {
          return Multivector<double>::scalar(0, m.basis_eval(y)(0, col));
        };
        const double got = scalar_part(weighted_inner(bfield, rn, m.rule, m.weight));
        CHECK(got == Approx(e(0, col)).margin(1e-9));
      }
    }
  }
  SECTION("positive diagonal") {
    for (double t : {-0.9, -0.3, 0.0, 0.4, 1.0})
      CHECK(evaluate_harmonic_kernel(m, vec2(t, -t / 2), vec2(t, -t / 2)) > 0.0);
  }
  SECTION("kernel evaluation path agrees with the Gram route") {
    const KernelEvaluation ev = evaluate_kernel(m, vec2(0.3, 0.1), vec2(-0.2, 0.5));
    CHECK(ev.value[0] ==
          Approx(evaluate_harmonic_kernel(m, vec2(0.3, 0.1), vec2(-0.2, 0.5))).epsilon(1e-9));
  }
}
