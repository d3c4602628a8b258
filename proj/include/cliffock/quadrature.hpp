#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <utility>

#include "multivector.hpp"
#include "weight.hpp"

namespace cliffock {

// Nodes/weights approximating either the full-space weighted integral
// (weights carry e^{-2phi(x)}dx) or the Lebesgue integral over a ball
// (the weight is folded into the integrand by the caller).
struct QuadratureRule {
  enum class Domain { full_space, ball };

  Eigen::MatrixXd nodes;  // one row per node
  Eigen::VectorXd weights;
  int exactness_degree = 0;
  Domain domain = Domain::full_space;
  Eigen::VectorXd center;
  double radius = 0.0;
  bool weight_embedded = false;
  Eigen::MatrixXd embedded_q;  // generating Q when weight_embedded

  int vars() const { return static_cast<int>(nodes.cols()); }
  int node_count() const { return static_cast<int>(nodes.rows()); }
};

namespace detail {

// Golub-Welsch from a symmetric three-term recurrence: diagonal a, of which
// we only need the zero case, off-diagonal b, total mass mu0.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> golub_welsch(const Eigen::VectorXd& offdiag,
                                                                double mu0) {
  const int q = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i + 1 < q; ++i) j(i, i + 1) = j(i + 1, i) = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Eigen::VectorXd nodes = es.eigenvalues();
  Eigen::VectorXd w(q);
  for (int i = 0; i < q; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
  return {nodes, w};
}

}  // namespace detail

// Rule for int f(s) e^{-s^2} ds on R, exact for degree <= 2q-1.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int q) {
  if (q < 1) throw std::invalid_argument("quadrature order must be positive");
  Eigen::VectorXd b(q - 1);
  for (int k = 1; k < q; ++k) b[k - 1] = std::sqrt(k / 2.0);
  return detail::golub_welsch(b, std::sqrt(std::numbers::pi));
}

// Rule for int_{-1}^{1} f(s) ds, exact for degree <= 2q-1.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("quadrature order must be positive");
  Eigen::VectorXd b(q - 1);
  for (int k = 1; k < q; ++k) b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return detail::golub_welsch(b, 2.0);
}

// Tensor rule for int p(x) e^{-2 x^T Q x} dx: diagonalize Q, rescale each
// principal axis to the Gauss-Hermite weight. Exact for polynomials of
// degree <= 2*order-1 per principal axis.
inline QuadratureRule gauss_full_space(const Weight& w, int order) {
  if (w.kind != Weight::Kind::quadratic)
    throw std::invalid_argument("full-space rule supports quadratic weights only");
  const int vars = w.vars();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.q_matrix());
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd u = es.eigenvectors();
  auto [s, gw] = gauss_hermite(order);

  const long total = static_cast<long>(std::pow(static_cast<double>(order), vars));
  QuadratureRule rule;
  rule.nodes.resize(total, vars);
  rule.weights.resize(total);
  rule.exactness_degree = 2 * order - 1;
  rule.domain = QuadratureRule::Domain::full_space;
  rule.weight_embedded = true;
  rule.embedded_q = w.q_matrix();

  std::vector<int> idx(vars, 0);
  Eigen::VectorXd y(vars);
  for (long t = 0; t < total; ++t) {
    double wt = 1.0;
    for (int j = 0; j < vars; ++j) {
      const double scale = 1.0 / std::sqrt(2.0 * lam[j]);
      y[j] = s[idx[j]] * scale;
      wt *= gw[idx[j]] * scale;
    }
    rule.nodes.row(t) = (u * y).transpose();
    rule.weights[t] = wt;
    for (int j = vars - 1; j >= 0; --j) {
      if (++idx[j] < order) break;
      idx[j] = 0;
    }
  }
  return rule;
}

namespace detail {

// Unit-sphere product rules; returns (directions, surface weights).
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> sphere_rule(int dim, int order) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (dim == 2) {
    const int m = std::max(order + 1, 4);
    Eigen::MatrixXd dirs(m, 2);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, two_pi / m);
    for (int i = 0; i < m; ++i) {
      const double th = two_pi * i / m;
      dirs(i, 0) = std::cos(th);
      dirs(i, 1) = std::sin(th);
    }
    return {dirs, w};
  }
  if (dim == 3) {
    const int mt = (order + 2) / 2;
    const int mp = std::max(order + 1, 4);
    auto [t, wt] = gauss_legendre(mt);
    Eigen::MatrixXd dirs(mt * mp, 3);
    Eigen::VectorXd w(mt * mp);
    int r = 0;
    for (int i = 0; i < mt; ++i) {
      const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
      for (int k = 0; k < mp; ++k, ++r) {
        const double ph = two_pi * k / mp;
        dirs(r, 0) = t[i];
        dirs(r, 1) = s * std::cos(ph);
        dirs(r, 2) = s * std::sin(ph);
        w[r] = wt[i] * (two_pi / mp);
      }
    }
    return {dirs, w};
  }
  if (dim == 4) {
    // x0 = cos(psi); Chebyshev (second kind) handles the sin^2 factor.
    const int mu = (order + 2) / 2;
    auto [sub_dirs, sub_w] = sphere_rule(3, order);
    Eigen::MatrixXd dirs(mu * sub_dirs.rows(), 4);
    Eigen::VectorXd w(mu * sub_dirs.rows());
    int r = 0;
    for (int i = 1; i <= mu; ++i) {
      const double th = i * std::numbers::pi / (mu + 1);
      const double u = std::cos(th);
      const double su = std::sin(th);
      const double wu = std::numbers::pi / (mu + 1) * su * su;
      for (int k = 0; k < sub_dirs.rows(); ++k, ++r) {
        dirs(r, 0) = u;
        dirs(r, 1) = su * sub_dirs(k, 0);
        dirs(r, 2) = su * sub_dirs(k, 1);
        dirs(r, 3) = su * sub_dirs(k, 2);
        w[r] = wu * sub_w[k];
      }
    }
    return {dirs, w};
  }
  throw std::invalid_argument("sphere product rule limited to dimensions 2..4");
}

inline double ball_volume(int dim, double radius) {
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0) *
         std::pow(radius, dim);
}

}  // namespace detail

// Lebesgue rule over B(center, radius): radial Gauss-Legendre times a sphere
// product rule in dimensions <= 4, seeded Monte Carlo above. Exact for
// polynomials of total degree <= order in the product-rule regime.
inline QuadratureRule ball_rule(const Eigen::VectorXd& center, double radius, int order,
                                std::uint64_t mc_seed = 20240901, int mc_samples = 200000) {
  if (radius <= 0.0) throw std::invalid_argument("ball radius must be positive");
  const int dim = static_cast<int>(center.size());
  QuadratureRule rule;
  rule.domain = QuadratureRule::Domain::ball;
  rule.center = center;
  rule.radius = radius;
  rule.weight_embedded = false;

  if (dim >= 2 && dim <= 4) {
    const int mr = (order + dim + 1) / 2;  // covers the extra r^{dim-1} factor
    auto [rt, rw] = gauss_legendre(mr);
    auto [dirs, dw] = detail::sphere_rule(dim, order);
    const long total = static_cast<long>(mr) * dirs.rows();
    rule.nodes.resize(total, dim);
    rule.weights.resize(total);
    rule.exactness_degree = order;
    long out = 0;
    for (int i = 0; i < mr; ++i) {
      const double r = radius * (rt[i] + 1.0) / 2.0;
      const double wr = rw[i] * radius / 2.0 * std::pow(r, dim - 1);
      for (int k = 0; k < dirs.rows(); ++k, ++out) {
        rule.nodes.row(out) = center.transpose() + r * dirs.row(k);
        rule.weights[out] = wr * dw[k];
      }
    }
    return rule;
  }

  // Seeded Monte Carlo fallback; no polynomial exactness declared.
  std::mt19937_64 rng(mc_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  rule.nodes.resize(mc_samples, dim);
  rule.weights = Eigen::VectorXd::Constant(mc_samples,
                                           detail::ball_volume(dim, radius) / mc_samples);
  rule.exactness_degree = 0;
  for (int i = 0; i < mc_samples; ++i) {
    Eigen::VectorXd dir(dim);
    for (int j = 0; j < dim; ++j) dir[j] = gauss(rng);
    dir.normalize();
    const double r = radius * std::pow(unif(rng), 1.0 / dim);
    rule.nodes.row(i) = center.transpose() + r * dir.transpose();
  }
  return rule;
}

using FieldFn = std::function<Multivector<double>(const Eigen::VectorXd&)>;

// Per-node weights with e^{-2phi} included, whatever the rule's embedding.
inline Eigen::VectorXd effective_weights(const QuadratureRule& rule, const Weight& w) {
  if (rule.weight_embedded) {
    if (w.kind != Weight::Kind::quadratic || rule.embedded_q.rows() != w.q_matrix().rows() ||
        (rule.embedded_q - w.q_matrix()).cwiseAbs().maxCoeff() >
            1e-12 * (1.0 + w.q_matrix().cwiseAbs().maxCoeff()))
      throw std::invalid_argument("quadrature rule was built for a different weight");
    return rule.weights;
  }
  Eigen::VectorXd out(rule.node_count());
  for (int i = 0; i < rule.node_count(); ++i)
    out[i] = rule.weights[i] * std::exp(-2.0 * w.value(rule.nodes.row(i).transpose()));
  return out;
}

// (f,g)_phi = int conj(f) g e^{-2phi} dx; conjugation on the first slot, so
// the reproducing identity reads u(x) = (B(.,x), u)_phi.
inline Multivector<double> weighted_inner(const FieldFn& f, const FieldFn& g,
                                          const QuadratureRule& rule, const Weight& w) {
  if (rule.node_count() == 0) throw std::invalid_argument("empty quadrature rule");
  const Eigen::VectorXd ew = effective_weights(rule, w);
  const Eigen::VectorXd x0 = rule.nodes.row(0).transpose();
  Multivector<double> acc = geometric_product(conjugate(f(x0)), g(x0));
  acc *= ew[0];
  for (int i = 1; i < rule.node_count(); ++i) {
    const Eigen::VectorXd x = rule.nodes.row(i).transpose();
    Multivector<double> term = geometric_product(conjugate(f(x)), g(x));
    term *= ew[i];
    acc += term;
  }
  return acc;
}

inline double weighted_norm_sq(const FieldFn& f, const QuadratureRule& rule, const Weight& w) {
  const Eigen::VectorXd ew = effective_weights(rule, w);
  double acc = 0.0;
  for (int i = 0; i < rule.node_count(); ++i) {
    const Eigen::VectorXd x = rule.nodes.row(i).transpose();
    acc += ew[i] * norm_sq(f(x));
  }
  return acc;
}

inline void write_rule_csv(const QuadratureRule& rule, std::ostream& os) {
  for (int j = 0; j < rule.vars(); ++j) os << "x" << j << ",";
  os << "weight\n";
  char buf[32];
  for (int i = 0; i < rule.node_count(); ++i) {
    for (int j = 0; j < rule.vars(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", rule.nodes(i, j));
      os << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", rule.weights[i]);
    os << buf << "\n";
  }
}

}  // namespace cliffock
