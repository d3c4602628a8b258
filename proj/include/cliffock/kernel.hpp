#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "basis.hpp"
#include "quadrature.hpp"
#include "weight.hpp"

namespace cliffock {

struct KernelBuildOptions {
  double cond_cap = 1e12;
  double tol_repro = 1e-8;
};

// Raised when the stacked reproducing system leaves a residual above
// tolerance. The system is consistent whenever the basis is module-closed
// and the Gram quadrature is exact, so this signals a bug or an
// under-resolved rule rather than an expected numerical outcome.
class KernelResidualError : public std::runtime_error {
 public:
  KernelResidualError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Close a graded basis under right blade multiplication and deduplicate to a
// real-linear basis, degree block by degree block. The candidate order
// (element, blade) is fixed, so the result is deterministic.
inline GradedBasis module_closure(const GradedBasis& in) {
  const BladeIndex nb = BladeIndex{1} << in.alg;
  GradedBasis out;
  out.vars = in.vars;
  out.alg = in.alg;
  out.kind = in.kind;

  int max_grade = 0;
  for (int g : in.grades) max_grade = std::max(max_grade, g);

  for (int k = 0; k <= max_grade; ++k) {
    const auto monos = monomials_of_degree(in.vars, static_cast<unsigned>(k));
    // reduced rows with their leading column, for incremental rank tests
    std::vector<std::pair<RatVec, int>> echelon;
    for (std::size_t i = 0; i < in.elements.size(); ++i) {
      if (in.grades[i] != k) continue;
      for (BladeIndex a = 0; a < nb; ++a) {
        PolyField<Rational> cand =
            in.elements[i].right_mul(Multivector<Rational>::blade(in.alg, a));
        if (cand.is_zero()) continue;
        RatVec v = coeff_vector(cand, monos);
        for (const auto& [row, lead] : echelon) {
          if (v[lead] == 0) continue;
          const Rational f = v[lead];
          for (std::size_t j = lead; j < v.size(); ++j) v[j] -= f * row[j];
        }
        int lead = -1;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (v[j] != 0) {
            lead = static_cast<int>(j);
            break;
          }
        if (lead < 0) continue;
        const Rational inv = Rational(1) / v[lead];
        for (std::size_t j = lead; j < v.size(); ++j) v[j] *= inv;
        echelon.emplace_back(std::move(v), lead);
        out.elements.push_back(std::move(cand));
        out.grades.push_back(k);
      }
    }
  }
  return out;
}

// Finite-degree model of the weighted Bergman kernel: module-closed basis,
// the A_n-valued Gram stored per blade component, and the Cholesky factor of
// its scalar part. Basis columns are normalized to unit weighted norm.
struct KernelModel {
  int alg = 0;
  int vars = 0;
  int degree = 0;
  Weight weight;
  QuadratureRule rule;
  std::vector<PolyField<Rational>> basis;  // kept columns, unnormalized
  std::vector<int> grades;
  Eigen::VectorXd col_scale;               // norm of each kept column
  std::vector<Eigen::MatrixXd> gram_cl;    // [(r_m, r_n)_phi]_A, normalized columns
  Eigen::MatrixXd gram_real;               // == gram_cl[0]
  Eigen::LLT<Eigen::MatrixXd> gram_llt;
  double cond_estimate = 0.0;
  std::vector<int> pruned;                 // indices dropped by conditioning
  KernelBuildOptions opts;

  int size() const { return static_cast<int>(basis.size()); }
  BladeIndex blades() const { return BladeIndex{1} << alg; }

  // E(A, m) = [r_m(x)]_A over the normalized kept basis.
  Eigen::MatrixXd basis_eval(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd e(blades(), size());
    std::vector<double> pt(x.data(), x.data() + x.size());
    for (int m = 0; m < size(); ++m) {
      const Multivector<double> v = basis[m].evaluate(pt);
      for (BladeIndex a = 0; a < blades(); ++a) e(a, m) = v[a] / col_scale[m];
    }
    return e;
  }
};

namespace detail {

// Per-blade node evaluation matrices R_A (nodes x N) of a basis list.
inline std::vector<Eigen::MatrixXd> node_eval(const std::vector<PolyField<Rational>>& elems,
                                              int alg, const QuadratureRule& rule) {
  const BladeIndex nb = BladeIndex{1} << alg;
  const int nn = rule.node_count();
  const int ne = static_cast<int>(elems.size());
  std::vector<Eigen::MatrixXd> r(nb, Eigen::MatrixXd::Zero(nn, ne));
  for (int i = 0; i < nn; ++i) {
    const Eigen::VectorXd xr = rule.nodes.row(i).transpose();
    std::vector<double> pt(xr.data(), xr.data() + xr.size());
    for (int m = 0; m < ne; ++m) {
      const Multivector<double> v = elems[m].evaluate(pt);
      for (BladeIndex a = 0; a < nb; ++a) r[a](i, m) = v[a];
    }
  }
  return r;
}

}  // namespace detail

inline KernelModel build_model(const GradedBasis& basis_in, const Weight& w,
                               const QuadratureRule& rule, KernelBuildOptions opts = {}) {
  if (basis_in.elements.empty()) throw std::invalid_argument("empty basis");
  if (basis_in.vars != w.vars()) throw std::invalid_argument("basis/weight arity mismatch");
  int max_grade = 0;
  for (int g : basis_in.grades) max_grade = std::max(max_grade, g);
  if (rule.exactness_degree < 2 * max_grade)
    throw std::invalid_argument("quadrature exactness does not cover degree 2d");

  KernelModel m;
  m.alg = basis_in.alg;
  m.vars = basis_in.vars;
  m.degree = max_grade;
  m.weight = w;
  m.rule = rule;
  m.opts = opts;

  GradedBasis closed = module_closure(basis_in);
  const BladeIndex nb = BladeIndex{1} << closed.alg;
  const Eigen::VectorXd ew = effective_weights(rule, w);
  std::vector<Eigen::MatrixXd> r = detail::node_eval(closed.elements, closed.alg, rule);

  const int n0 = static_cast<int>(closed.elements.size());
  std::vector<Eigen::MatrixXd> gram(nb, Eigen::MatrixXd::Zero(n0, n0));
  for (BladeIndex c = 0; c < nb; ++c) {
    for (BladeIndex a = 0; a < nb; ++a) {
      const BladeIndex b = a ^ c;
      const double s = conjugation_sign(a) * blade_sign(a, b);
      gram[c].noalias() += s * r[a].transpose() * ew.asDiagonal() * r[b];
    }
  }

  // normalize columns to unit weighted norm
  Eigen::VectorXd scale(n0);
  for (int i = 0; i < n0; ++i) {
    const double d = gram[0](i, i);
    if (!(d > 0.0)) throw std::runtime_error("basis element with nonpositive norm");
    scale[i] = std::sqrt(d);
  }
  for (BladeIndex c = 0; c < nb; ++c)
    gram[c] = scale.cwiseInverse().asDiagonal() * gram[c] * scale.cwiseInverse().asDiagonal();

  // degree-graded pruning: drop the highest degree block while the scalar
  // Gram is worse conditioned than the cap
  std::vector<int> kept(n0);
  for (int i = 0; i < n0; ++i) kept[i] = i;
  std::vector<int> pruned;
  double cond = 0.0;
  while (true) {
    Eigen::MatrixXd g0(kept.size(), kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = 0; j < kept.size(); ++j) g0(i, j) = gram[0](kept[i], kept[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (cond <= opts.cond_cap) break;
    int top = 0;
    for (int i : kept) top = std::max(top, closed.grades[i]);
    std::vector<int> next;
    for (int i : kept)
      (closed.grades[i] == top ? pruned : next).push_back(i);
    kept = std::move(next);
    if (kept.empty()) throw std::runtime_error("empty basis after pruning");
  }

  m.basis.reserve(kept.size());
  m.col_scale.resize(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    m.basis.push_back(closed.elements[kept[i]]);
    m.grades.push_back(closed.grades[kept[i]]);
    m.col_scale[i] = scale[kept[i]];
  }
  m.pruned = std::move(pruned);
  m.gram_cl.resize(nb);
  for (BladeIndex c = 0; c < nb; ++c) {
    Eigen::MatrixXd g(kept.size(), kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = 0; j < kept.size(); ++j) g(i, j) = gram[c](kept[i], kept[j]);
    m.gram_cl[c] = std::move(g);
  }
  m.gram_real = m.gram_cl[0];
  m.gram_llt.compute(m.gram_real);
  if (m.gram_llt.info() != Eigen::Success)
    throw std::runtime_error("scalar Gram is not positive definite");
  m.cond_estimate = cond;
  m.degree = *std::max_element(m.grades.begin(), m.grades.end());
  return m;
}

struct KernelCoeffs {
  Eigen::VectorXd c;
  double residual;  // relative residual of the stacked system
};

// Solve the stacked real system sum_m c_m [G_{mn}]_A = [r_n(x)]_A over all
// basis indices n and blades A, least squares. The system is consistent in
// exact arithmetic because the basis is module-closed.
inline KernelCoeffs kernel_coefficients(const KernelModel& m, const Eigen::VectorXd& x) {
  const int n = m.size();
  if (n == 0) throw std::invalid_argument("kernel_coefficients on an empty model");
  const BladeIndex nb = m.blades();
  Eigen::MatrixXd s(static_cast<int>(nb) * n, n);
  Eigen::VectorXd b(static_cast<int>(nb) * n);
  const Eigen::MatrixXd e = m.basis_eval(x);
  for (int col = 0; col < n; ++col)
    for (BladeIndex a = 0; a < nb; ++a)
      for (int row = 0; row < n; ++row) s(row * nb + a, col) = m.gram_cl[a](col, row);
  for (int row = 0; row < n; ++row)
    for (BladeIndex a = 0; a < nb; ++a) b(row * nb + a) = e(a, row);

  KernelCoeffs out;
  out.c = s.colPivHouseholderQr().solve(b);
  const double bn = b.norm();
  out.residual = bn > 0.0 ? (s * out.c - b).norm() / bn : (s * out.c).norm();
  if (out.residual > m.opts.tol_repro)
    throw KernelResidualError("stacked reproducing system residual above tolerance",
                              out.residual);
  return out;
}

struct KernelEvaluation {
  Eigen::VectorXd x, y;
  Multivector<double> value;
  double residual;
};

// B(y, x) = sum_m r_m(y) c_m(x): left-monogenic in the first argument, the
// second argument is the evaluation point.
inline KernelEvaluation evaluate_kernel(const KernelModel& m, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y) {
  const KernelCoeffs kc = kernel_coefficients(m, x);
  const Eigen::VectorXd v = m.basis_eval(y) * kc.c;
  Multivector<double> val(m.alg);
  for (BladeIndex a = 0; a < m.blades(); ++a) val[a] = v[a];
  return {x, y, val, kc.residual};
}

// lhs = |B(x,x)|, rhs = sup_{||u||_phi = 1} |u(x)|^2 over the model space,
// computed as the largest generalized eigenvalue of the point-evaluation
// quadratic form against the scalar Gram.
inline std::pair<double, double> diagonal_sup_check(const KernelModel& m,
                                                    const Eigen::VectorXd& x) {
  const KernelEvaluation ev = evaluate_kernel(m, x, x);
  const Eigen::MatrixXd e = m.basis_eval(x);
  Eigen::MatrixXd q = e.transpose() * e;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(q, m.gram_real);
  if (ges.info() != Eigen::Success) throw SolverError("generalized eigensolver failed");
  return {norm(ev.value), ges.eigenvalues().maxCoeff()};
}

// Orthogonal projection onto the model space: real-Gram normal equations.
// Returns coefficients over the normalized basis.
inline Eigen::VectorXd project(const KernelModel& m, const FieldFn& g) {
  const Eigen::VectorXd ew = effective_weights(m.rule, m.weight);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m.size());
  for (int i = 0; i < m.rule.node_count(); ++i) {
    const Eigen::VectorXd x = m.rule.nodes.row(i).transpose();
    const Multivector<double> gv = g(x);
    const Eigen::MatrixXd e = m.basis_eval(x);
    for (int col = 0; col < m.size(); ++col) {
      double acc = 0.0;
      for (BladeIndex a = 0; a < m.blades(); ++a) acc += e(a, col) * gv[a];
      b[col] += ew[i] * acc;
    }
  }
  return m.gram_llt.solve(b);
}

inline Multivector<double> eval_in_basis(const KernelModel& m, const Eigen::VectorXd& c,
                                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd v = m.basis_eval(x) * c;
  Multivector<double> out(m.alg);
  for (BladeIndex a = 0; a < m.blades(); ++a) out[a] = v[a];
  return out;
}

// Scalar specialization for the harmonic space; the kernel is the classical
// Gram-inverse bilinear form.
inline KernelModel harmonic_model(const GradedBasis& basis, const Weight& w,
                                  const QuadratureRule& rule, KernelBuildOptions opts = {}) {
  if (basis.kind != BasisKind::harmonic || basis.alg != 0)
    throw std::invalid_argument("harmonic_model needs a scalar harmonic basis");
  return build_model(basis, w, rule, opts);
}

inline double evaluate_harmonic_kernel(const KernelModel& m, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y) {
  if (m.alg != 0) throw std::invalid_argument("not a harmonic model");
  const Eigen::VectorXd rx = m.basis_eval(x).row(0).transpose();
  const Eigen::VectorXd ry = m.basis_eval(y).row(0).transpose();
  return ry.dot(m.gram_llt.solve(rx));
}

}  // namespace cliffock
