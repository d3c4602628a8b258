#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "basis.hpp"
#include "polyfield.hpp"

namespace cliffock {

// Weight function phi with certified analytic data. Quadratic weights keep
// their defining matrix as exact rationals so the harmonic/radial split and
// downstream symbolic checks stay exact; evaluation uses a double cache.
class Weight {
 public:
  enum class Kind { quadratic, zero };

  Kind kind = Kind::zero;
  int n = 0;  // space is R^{n+1}
  RatMat q;   // (n+1)x(n+1), quadratic kind only
  double m = 0.0, M = 0.0, L = 0.0;
  bool homogeneous2 = true;

  int vars() const { return n + 1; }

  double value(const Eigen::VectorXd& x) const {
    if (kind == Kind::zero) return 0.0;
    return x.dot(qd_ * x);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    if (kind == Kind::zero) return Eigen::VectorXd::Zero(x.size());
    return 2.0 * (qd_ * x);
  }

  double laplacian(const Eigen::VectorXd&) const {
    if (kind == Kind::zero) return 0.0;
    return 2.0 * qd_.trace();
  }

  double laplacian_const() const { return kind == Kind::zero ? 0.0 : 2.0 * qd_.trace(); }

  const Eigen::MatrixXd& q_matrix() const { return qd_; }

  // s*phi stays in the quadratic class.
  Weight scaled(const Rational& s) const;

  void rebuild_cache() {
    if (kind == Kind::zero) return;
    qd_.resize(vars(), vars());
    for (int i = 0; i < vars(); ++i)
      for (int j = 0; j < vars(); ++j) qd_(i, j) = to_double(q[i][j]);
  }

 private:
  Eigen::MatrixXd qd_;
};

inline Weight make_quadratic(const RatMat& q) {
  const int vars = static_cast<int>(q.size());
  if (vars < 2) throw std::invalid_argument("quadratic weight needs at least two variables");
  for (const auto& row : q)
    if (static_cast<int>(row.size()) != vars) throw std::invalid_argument("weight matrix not square");
  for (int i = 0; i < vars; ++i)
    for (int j = 0; j < i; ++j)
      if (q[i][j] != q[j][i]) throw std::invalid_argument("weight matrix not symmetric");

  Weight w;
  w.kind = Weight::Kind::quadratic;
  w.n = vars - 1;
  w.q = q;
  w.homogeneous2 = true;
  w.rebuild_cache();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.q_matrix());
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("weight matrix not positive definite");

  Rational tr(0);
  for (int i = 0; i < vars; ++i) tr += q[i][i];
  w.m = w.M = 2.0 * to_double(tr);
  w.L = 2.0 * es.eigenvalues().maxCoeff();
  return w;
}

inline Weight Weight::scaled(const Rational& s) const {
  if (kind == Kind::zero) return *this;
  if (s <= 0) throw std::invalid_argument("weight scale must be positive");
  RatMat qs = q;
  for (auto& row : qs)
    for (auto& v : row) v *= s;
  return make_quadratic(qs);
}

// phi = 0. Does not satisfy the m > 0 hypothesis; only for trivial tests.
inline Weight zero_weight(int n) {
  Weight w;
  w.kind = Weight::Kind::zero;
  w.n = n;
  w.m = 0.0;
  w.M = 0.0;
  w.L = 0.0;
  w.homogeneous2 = true;
  return w;
}

inline Weight make_quadratic_iso(int n, const Rational& t = Rational(1)) {
  RatMat q(n + 1, RatVec(n + 1, Rational(0)));
  for (int i = 0; i <= n; ++i) q[i][i] = t;
  return make_quadratic(q);
}

inline Weight make_quadratic_diag(const RatVec& d) {
  RatMat q(d.size(), RatVec(d.size(), Rational(0)));
  for (std::size_t i = 0; i < d.size(); ++i) q[i][i] = d[i];
  return make_quadratic(q);
}

struct BoundsReport {
  bool pass = true;
  // worst-case margins over the samples; negative means violated
  double lap_lower_margin = 0.0;  // min (lap(x) - m)
  double lap_upper_margin = 0.0;  // min (M - lap(x))
  double grad_margin = 0.0;       // min (L|x| - |grad(x)|)
  std::vector<std::string> violations;
};

inline BoundsReport validate_bounds(const Weight& w, const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw std::invalid_argument("validate_bounds needs samples");
  BoundsReport r;
  r.lap_lower_margin = r.lap_upper_margin = r.grad_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-9;
  for (const auto& x : samples) {
    const double lap = w.laplacian(x);
    r.lap_lower_margin = std::min(r.lap_lower_margin, lap - w.m);
    r.lap_upper_margin = std::min(r.lap_upper_margin, w.M - lap);
    r.grad_margin = std::min(r.grad_margin, w.L * x.norm() - w.gradient(x).norm());
  }
  if (r.lap_lower_margin < -tol) {
    r.pass = false;
    r.violations.push_back("laplacian lower bound m violated");
  }
  if (r.lap_upper_margin < -tol) {
    r.pass = false;
    r.violations.push_back("laplacian upper bound M violated");
  }
  if (r.grad_margin < -tol * std::max(1.0, w.L)) {
    r.pass = false;
    r.violations.push_back("gradient bound L|x| violated");
  }
  if (w.homogeneous2) {
    bool homogeneous_ok = true;
    for (const auto& x : samples)
      for (double t : {0.5, 2.0}) {
        const double lhs = w.value(t * x);
        const double rhs = t * t * w.value(x);
        if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(rhs))) homogeneous_ok = false;
      }
    if (!homogeneous_ok) {
      r.pass = false;
      r.violations.push_back("2-homogeneity violated");
    }
  }
  return r;
}

// Deterministic low-discrepancy (Halton) points plus seeded uniform points
// in [-radius, radius]^vars.
inline std::vector<Eigen::VectorXd> bound_sample_points(int vars, double radius, int count,
                                                        std::uint64_t seed) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  auto radical_inverse = [](int base, int i) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
      f /= base;
      r += f * (i % base);
      i /= base;
    }
    return r;
  };
  std::vector<Eigen::VectorXd> pts;
  const int half = count / 2;
  for (int i = 1; i <= half; ++i) {
    Eigen::VectorXd x(vars);
    for (int j = 0; j < vars; ++j) x[j] = radius * (2.0 * radical_inverse(primes[j], i) - 1.0);
    pts.push_back(x);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  while (static_cast<int>(pts.size()) < count) {
    Eigen::VectorXd x(vars);
    for (int j = 0; j < vars; ++j) x[j] = u(rng);
    pts.push_back(x);
  }
  return pts;
}

// phi = h + t|x|^2 with h harmonic of degree <= 2, exact for quadratic
// weights: t = trace(Q)/(n+1).
struct QuadDecomposition {
  PolyField<Rational> h;
  Rational t;
};

// Split x^T Q x; only requires symmetry, so degenerate matrices from
// worked examples can be decomposed too.
inline QuadDecomposition decompose_quadratic(const RatMat& q) {
  const int vars = static_cast<int>(q.size());
  Rational tr(0);
  for (int i = 0; i < vars; ++i) tr += q[i][i];
  const Rational t = tr / vars;

  PolyField<Rational> h(vars, 0);
  for (int i = 0; i < vars; ++i) {
    for (int j = 0; j < vars; ++j) {
      Rational c = q[i][j];
      if (i == j) c -= t;
      if (c == 0) continue;
      MultiIndex m(vars, 0);
      m[i] += 1;
      m[j] += 1;
      h.add_term(m, Multivector<Rational>::scalar(0, c));
    }
  }
  if (!laplacian_apply(h).is_zero())
    throw std::logic_error("harmonic part failed the exact Laplacian check");
  return {h, t};
}

inline QuadDecomposition decompose_quadratic(const Weight& w) {
  if (w.kind != Weight::Kind::quadratic)
    throw std::invalid_argument("decompose_quadratic: weight is not quadratic");
  return decompose_quadratic(w.q);
}

}  // namespace cliffock
