#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <string>
#include <vector>

#include "grid.hpp"
#include "kernel.hpp"  // SolverError

namespace cliffock {

// Componentwise weighted formal adjoint: D*_phi a = 2 a Dbar(phi) - Dbar(a),
// with the conjugate Dirac discretized and the phi gradient analytic. The
// input must be a scalar field; the output is paravector-valued.
inline GridField dstar_apply(const GridField& alpha, const Weight& w,
                             const DiracOperator& dbar) {
  if (dbar.conjugated == false || dbar.interior_only)
    throw std::invalid_argument("dstar_apply needs the full conjugate-Dirac operator");
  if (!alpha.is_scalar()) throw std::invalid_argument("dstar_apply expects a scalar field");
  GridField out = dbar.apply(alpha);
  out.data = -out.data;
  const Grid& g = alpha.grid;
  for_each_node(g, [&](std::int64_t i, const Eigen::VectorXd& x) {
    const double a = alpha.comp(i, 0);
    if (a == 0.0) return;
    const Eigen::VectorXd grad = w.gradient(x);
    out.comp(i, 0) += 2.0 * a * grad[0];
    for (int j = 1; j < g.vars(); ++j)
      out.comp(i, BladeIndex{1} << (j - 1)) -= 2.0 * a * grad[j];
  });
  return out;
}

inline GridField dstar_apply(const GridField& alpha, const Weight& w) {
  return dstar_apply(alpha, w, discretize(alpha.grid, true, false));
}

struct SolveOptions {
  double rtol = 1e-8;
  int max_iter = 10000;
  bool throw_on_stagnation = true;
};

struct SolveInfo {
  double rel_residual = 0.0;
  int iterations = 0;
  bool converged = true;
  double boundary_rhs_fraction = 0.0;  // share of ||f|| on non-interior nodes
};

// Weighted minimal-norm solution of D_h u = f on the interior equations:
// minimize sum |u|^2 e^{-2phi} h^{n+1} subject to the central-difference
// constraints. Solved as u = W^{-1} D^T lambda with Jacobi-preconditioned CG
// on D W^{-1} D^T lambda = f.
inline GridField minimal_norm_solve(const GridField& f, const Weight& w, const Grid& g,
                                    const SolveOptions& opts = {}, SolveInfo* info_out = nullptr,
                                    const DiracOperator* dint_cached = nullptr) {
  DiracOperator dint_local;
  if (!dint_cached) dint_local = discretize(g, false, true);
  const DiracOperator& dint = dint_cached ? *dint_cached : dint_local;
  if (dint.interior_only == false || dint.conjugated || dint.grid.node_count() != g.node_count())
    throw std::invalid_argument("minimal_norm_solve needs the interior Dirac operator");
  const Eigen::SparseMatrix<double>& d = dint.mat;
  const BladeIndex nb = g.blades();

  // inverse weighted mass: e^{2phi} / h^{n+1} per dof
  Eigen::VectorXd winv(g.dof_count());
  const double vol = g.cell_volume();
  for_each_node(g, [&](std::int64_t i, const Eigen::VectorXd& x) {
    const double v = std::exp(2.0 * w.value(x)) / vol;
    for (BladeIndex a = 0; a < nb; ++a) winv[i * nb + a] = v;
  });

  Eigen::VectorXd b(d.rows());
  for (std::size_t r = 0; r < dint.row_nodes.size(); ++r)
    for (BladeIndex a = 0; a < nb; ++a)
      b[static_cast<std::int64_t>(r) * nb + a] = f.comp(dint.row_nodes[r], a);

  SolveInfo info;
  double interior_sq = b.squaredNorm();
  double total_sq = f.data.squaredNorm();
  info.boundary_rhs_fraction =
      total_sq > 0.0 ? std::sqrt(std::max(0.0, total_sq - interior_sq) / total_sq) : 0.0;

  GridField u(g);
  const double bn = std::sqrt(interior_sq);
  if (bn == 0.0) {
    if (info_out) *info_out = info;
    return u;
  }

  auto apply_a = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return dint.mat_rm * (winv.asDiagonal() * (d.transpose() * v));
  };

  // Jacobi preconditioner: diag(A) = sum_k D_rk^2 winv_k
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(d.rows());
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      diag[it.row()] += it.value() * it.value() * winv[k];
  Eigen::VectorXd mdiag = diag.cwiseMax(1e-300).cwiseInverse();

  Eigen::VectorXd lam = Eigen::VectorXd::Zero(d.rows());
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = mdiag.asDiagonal() * r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (r.norm() <= opts.rtol * bn) break;
    const Eigen::VectorXd ap = apply_a(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // hit the nullspace of the normal operator
    const double alpha = rz / pap;
    lam += alpha * p;
    r -= alpha * ap;
    z = mdiag.asDiagonal() * r;
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  info.iterations = it;
  info.rel_residual = r.norm() / bn;
  info.converged = info.rel_residual <= opts.rtol;
  if (!info.converged && opts.throw_on_stagnation)
    throw SolverError("minimal-norm solve stagnated, relative residual " +
                      std::to_string(info.rel_residual));

  u.data = winv.asDiagonal() * (d.transpose() * lam);
  if (info_out) *info_out = info;
  return u;
}

struct L2BoundReport {
  double norm_u_sq = 0.0;
  double bound_lap = 0.0;   // 2^{2n} int |f|^2 / lap(phi)
  double bound_lap2 = 0.0;  // 2^{2n} int |f|^2 / lap(2 phi), the stronger form
  double ratio_lap = 0.0;
  double ratio_lap2 = 0.0;
};

// Weighted L2 bound for a solution of Du = f. The two natural
// normalizations differ by a factor 2 (lap(phi) against lap(2 phi)); both
// ratios are reported, the contracts apply to the weaker lap(phi) form.
inline L2BoundReport verify_l2_bound(const GridField& u, const GridField& f, const Weight& w) {
  if (!(w.m > 0.0)) throw std::invalid_argument("verify_l2_bound needs lap(phi) >= m > 0");
  const Grid& g = u.grid;
  const double vol = g.cell_volume();
  const double factor = std::pow(4.0, g.n);  // 2^{2n}
  double denom_stmt = 0.0;
  const BladeIndex nb = g.blades();
  for_each_node(g, [&](std::int64_t i, const Eigen::VectorXd& x) {
    double fsq = 0.0;
    for (BladeIndex a = 0; a < nb; ++a) fsq += f.comp(i, a) * f.comp(i, a);
    if (fsq == 0.0) return;
    denom_stmt += fsq / w.laplacian(x) * std::exp(-2.0 * w.value(x)) * vol;
  });
  L2BoundReport rep;
  rep.norm_u_sq = weighted_norm_sq(u, w);
  rep.bound_lap = factor * denom_stmt;
  rep.bound_lap2 = factor * denom_stmt / 2.0;
  rep.ratio_lap = rep.bound_lap > 0.0 ? rep.norm_u_sq / rep.bound_lap : 0.0;
  rep.ratio_lap2 = rep.bound_lap2 > 0.0 ? rep.norm_u_sq / rep.bound_lap2 : 0.0;
  return rep;
}

inline void require_support_margin(const GridField& alpha, int margin) {
  const Grid& g = alpha.grid;
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    if (g.is_interior(g.coords_of(i), margin)) continue;
    for (BladeIndex a = 0; a < g.blades(); ++a)
      if (alpha.comp(i, a) != 0.0)
        throw std::invalid_argument("test field has insufficient support margin");
  }
}

// ||D*_phi a||^2 = ||Dbar a||^2 + int |a|^2 lap(2 phi) e^{-2 phi}; exact in
// the continuum, O(h^2) on the grid.
inline std::pair<double, double> energy_identity_check(const GridField& alpha, const Weight& w,
                                                       const Grid& g,
                                                       const DiracOperator* dbar_cached = nullptr) {
  require_support_margin(alpha, 2);
  DiracOperator dbar_local;
  if (!dbar_cached) dbar_local = discretize(g, true, false);
  const DiracOperator& dbar = dbar_cached ? *dbar_cached : dbar_local;
  const GridField dstar = dstar_apply(alpha, w, dbar);
  const GridField dbar_alpha = dbar.apply(alpha);
  const double lhs = weighted_norm_sq(dstar, w);
  double zero_order = 0.0;
  const double vol = g.cell_volume();
  for_each_node(g, [&](std::int64_t i, const Eigen::VectorXd& x) {
    const double a = alpha.comp(i, 0);
    if (a == 0.0) return;
    zero_order += a * a * 2.0 * w.laplacian(x) * std::exp(-2.0 * w.value(x)) * vol;
  });
  return {lhs, weighted_norm_sq(dbar_alpha, w) + zero_order};
}

struct DualityRow {
  double chain_lhs_norm = 0.0;    // |(f, alpha)_phi|
  double chain_mismatch = 0.0;    // |(f,alpha) - sum_A conj(e_A)(u, D*_phi alpha_A)|
  double ineq_lhs = 0.0;          // |(f, alpha)_phi|^2
  double ineq_rhs = 0.0;          // 2^{2n} ||u||^2 sum_A ||D*_phi alpha_A||^2
  bool ineq_pass = false;
};

struct DualityReport {
  std::vector<DualityRow> rows;
  double max_chain_mismatch = 0.0;
  bool all_pass = true;
};

// Adjoint duality chain and necessity inequality on a catalog of compactly
// supported test fields alpha; u must solve D u = f.
inline DualityReport duality_checks(const GridField& f, const GridField& u, const Weight& w,
                              const Grid& g, const std::vector<GridField>& alphas,
                              double slack = 1.1,
                              const DiracOperator* dbar_cached = nullptr) {
  DiracOperator dbar_local;
  if (!dbar_cached) dbar_local = discretize(g, true, false);
  const DiracOperator& dbar = dbar_cached ? *dbar_cached : dbar_local;
  const double norm_u_sq = weighted_norm_sq(u, w);
  const double factor = std::pow(4.0, g.n);
  DualityReport rep;
  for (const GridField& alpha : alphas) {
    require_support_margin(alpha, 2);
    const Multivector<double> lhs = weighted_inner(alpha, f, w);  // int conj(alpha) f e^{-2phi}

    Multivector<double> rhs(g.n);
    double sum_dstar_sq = 0.0;
    for (BladeIndex a = 0; a < g.blades(); ++a) {
      GridField comp(g);
      bool nonzero = false;
      for (std::int64_t i = 0; i < g.node_count(); ++i) {
        const double v = alpha.comp(i, a);
        comp.comp(i, 0) = v;
        nonzero = nonzero || v != 0.0;
      }
      if (!nonzero) continue;
      const GridField ds = dstar_apply(comp, w, dbar);
      sum_dstar_sq += weighted_norm_sq(ds, w);
      Multivector<double> pairing = weighted_inner(ds, u, w);  // (u, D* alpha_A) in the chain
      const Multivector<double> e_a_conj =
          Multivector<double>::blade(g.n, a, static_cast<double>(conjugation_sign(a)));
      rhs += geometric_product(e_a_conj, pairing);
    }

    DualityRow row;
    row.chain_lhs_norm = norm(lhs);
    row.chain_mismatch = norm(lhs - rhs);
    row.ineq_lhs = norm_sq(lhs);
    row.ineq_rhs = factor * norm_u_sq * sum_dstar_sq;
    row.ineq_pass = row.ineq_lhs <= slack * row.ineq_rhs + 1e-300;
    rep.max_chain_mismatch = std::max(rep.max_chain_mismatch, row.chain_mismatch);
    rep.all_pass = rep.all_pass && row.ineq_pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace cliffock
