#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fields.hpp"
#include "kernel.hpp"
#include "solver.hpp"

namespace cliffock {

// ---------------------------------------------------------------------------
// mean-value inequality (weighted subharmonic estimate)
// ---------------------------------------------------------------------------

struct MviPoint {
  Eigen::VectorXd x;
  double lhs = 0.0;    // |u(x)| e^{-phi(x)}
  double rhs = 0.0;    // ball L2 norm of u e^{-phi}
  double ratio = 0.0;
  bool anomaly = false;
};

struct MviReport {
  double c_hat = 0.0;  // empirical C_R
  std::vector<MviPoint> points;
  bool any_anomaly = false;
};

inline MviReport mvi_check(const FieldFn& u, const Weight& w, double radius,
                           const std::vector<Eigen::VectorXd>& sample_points, int ball_order) {
  if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("mvi radius must be in (0,1)");
  MviReport rep;
  for (const auto& x : sample_points) {
    MviPoint pt;
    pt.x = x;
    pt.lhs = norm(u(x)) * std::exp(-w.value(x));
    const QuadratureRule ball = ball_rule(x, radius, ball_order);
    double acc = 0.0;
    for (int i = 0; i < ball.node_count(); ++i) {
      const Eigen::VectorXd y = ball.nodes.row(i).transpose();
      acc += ball.weights[i] * norm_sq(u(y)) * std::exp(-2.0 * w.value(y));
    }
    pt.rhs = std::sqrt(std::max(acc, 0.0));
    if (pt.rhs <= 1e-15 && pt.lhs > 1e-15) {
      pt.anomaly = true;
      rep.any_anomaly = true;
      pt.ratio = std::numeric_limits<double>::infinity();
    } else {
      pt.ratio = pt.rhs > 0.0 ? pt.lhs / pt.rhs : 0.0;
    }
    rep.c_hat = std::max(rep.c_hat, pt.ratio);
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Moser chain diagnostic
// ---------------------------------------------------------------------------

struct MoserRow {
  int i = 0;
  double gamma = 0.0;
  double radius = 0.0;
  double norm = 0.0;  // L^gamma norm of (v^+ + k0) e^{-phi} over B_0(radius)
};

struct MoserReport {
  double chi = 0.0;
  double k0 = 0.0;
  std::vector<MoserRow> rows;  // i = 0..6
  double sup_estimate = 0.0;   // sup over B_0(1/2), fine lattice
  double final_norm = 0.0;
  double l2_norm = 0.0;        // first row: the chain input
  double sup_to_l2 = 0.0;      // empirical chain constant
  bool log_space_used = false;
};

inline double moser_chi_default(int n) { return n > 1 ? double(n + 1) / double(n - 1) : 3.0; }

inline MoserReport moser_chain(const ScalarFn& v, const Weight& w, int n, double k0,
                               int ball_order, double chi = -1.0,
                               double sup_grid_step = 0.01) {
  if (!(k0 > 0.0)) throw std::invalid_argument("moser chain needs k0 > 0");
  MoserReport rep;
  rep.chi = chi > 0.0 ? chi : moser_chi_default(n);
  rep.k0 = k0;
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(n + 1);

  auto log_value = [&](const Eigen::VectorXd& x) {
    const double vt = std::max(v(x), 0.0) + k0;
    return std::log(vt) - w.value(x);
  };

  for (int i = 0; i <= 6; ++i) {
    MoserRow row;
    row.i = i;
    row.gamma = 2.0 * std::pow(rep.chi, i);
    row.radius = 0.5 + std::pow(0.5, i + 1);
    const QuadratureRule ball = ball_rule(origin, row.radius, ball_order);
    // stable log-sum-exp; direct powers overflow for the late gammas
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> expo(ball.node_count());
    for (int j = 0; j < ball.node_count(); ++j) {
      expo[j] = std::log(ball.weights[j]) + row.gamma * log_value(ball.nodes.row(j).transpose());
      peak = std::max(peak, expo[j]);
      if (std::abs(row.gamma * log_value(ball.nodes.row(j).transpose())) > 700.0)
        rep.log_space_used = true;
    }
    double acc = 0.0;
    for (double e : expo) acc += std::exp(e - peak);
    row.norm = std::exp((peak + std::log(acc)) / row.gamma);
    rep.rows.push_back(row);
  }
  rep.l2_norm = rep.rows.front().norm;
  rep.final_norm = rep.rows.back().norm;

  // fine lattice sup over the half ball
  const int steps = static_cast<int>(std::ceil(0.5 / sup_grid_step));
  std::vector<int> idx(n + 1, -steps);
  double sup = -std::numeric_limits<double>::infinity();
  while (true) {
    Eigen::VectorXd x(n + 1);
    for (int j = 0; j <= n; ++j) x[j] = idx[j] * sup_grid_step;
    if (x.norm() <= 0.5) sup = std::max(sup, log_value(x));
    int j = n;
    for (; j >= 0; --j) {
      if (++idx[j] <= steps) break;
      idx[j] = -steps;
    }
    if (j < 0) break;
  }
  rep.sup_estimate = std::exp(sup);
  rep.sup_to_l2 = rep.l2_norm > 0.0 ? rep.sup_estimate / rep.l2_norm : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// diagonal profile
// ---------------------------------------------------------------------------

struct DiagonalRow {
  Eigen::VectorXd x;
  double b0 = 0.0;     // [B(x,x)]_0
  double ratio = 0.0;  // b0 e^{-2 phi(x)}
};

struct DiagonalReport {
  std::vector<DiagonalRow> rows;
  double rho_used = 0.0;
  bool shrank = false;
  double rim_gap = 0.0;  // |B_N - B_{N-1}| / B_N at the rim
  double max_ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
};

// model_prev is the same construction truncated one degree lower; the probe
// radius shrinks until the two agree within 1% on the rim.
inline DiagonalReport diagonal_profile(const KernelModel& model, const KernelModel& model_prev,
                                       double rho_max, double step,
                                       const std::vector<Eigen::VectorXd>& directions) {
  if (step <= 0.0 || rho_max <= 0.0) throw std::invalid_argument("bad profile range");
  DiagonalReport rep;
  double rho = rho_max;
  while (rho > step / 2) {
    rep.rim_gap = 0.0;
    for (const auto& dir : directions) {
      const Eigen::VectorXd x = rho * dir;
      const double a = scalar_part(evaluate_kernel(model, x, x).value);
      const double b = scalar_part(evaluate_kernel(model_prev, x, x).value);
      rep.rim_gap = std::max(rep.rim_gap, std::abs(a - b) / std::max(a, 1e-300));
    }
    if (rep.rim_gap <= 0.01) break;
    rho -= step;
    rep.shrank = true;
  }
  if (rho <= step / 2) throw SolverError("no truncation-converged radius for the profile");
  rep.rho_used = rho;

  const int nr = static_cast<int>(std::floor(rho / step + 1e-9));
  for (int ir = 0; ir <= nr; ++ir) {
    const double r = ir * step;
    for (std::size_t di = 0; di < directions.size(); ++di) {
      if (ir == 0 && di > 0) break;  // origin once
      DiagonalRow row;
      row.x = r * directions[di];
      row.b0 = scalar_part(evaluate_kernel(model, row.x, row.x).value);
      row.ratio = row.b0 * std::exp(-2.0 * model.weight.value(row.x));
      rep.max_ratio = std::max(rep.max_ratio, row.ratio);
      rep.min_ratio = std::min(rep.min_ratio, row.ratio);
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// off-diagonal decay fit
// ---------------------------------------------------------------------------

struct DecayPoint {
  double dist = 0.0;
  double loggap = 0.0;  // log|B(y,x0)| - phi(x0) - phi(y)
};

struct DecayReport {
  std::vector<DecayPoint> points;
  int excluded = 0;
  double alpha_hat = 0.0;  // loggap ~ log_c - alpha_hat * dist
  double log_c = 0.0;
  double r_squared = 0.0;
  // quadratic fit a + b d + c d^2, reported alongside (the n = 1 oracle
  // decays quadratically, faster than the linear bound)
  double quad_a = 0.0, quad_b = 0.0, quad_c = 0.0;
};

inline DecayReport offdiagonal_decay(const KernelModel& model, const KernelModel& model_prev,
                                     const Eigen::VectorXd& x0,
                                     const std::vector<Eigen::VectorXd>& directions,
                                     const std::vector<double>& distances,
                                     double noise_floor = 1e-14) {
  DecayReport rep;
  const double phi_x0 = model.weight.value(x0);
  for (double d : distances) {
    for (const auto& dir : directions) {
      const Eigen::VectorXd y = x0 + d * dir;
      const double b = norm(evaluate_kernel(model, x0, y).value);
      const double b_prev = norm(evaluate_kernel(model_prev, x0, y).value);
      if (b < noise_floor || std::abs(b - b_prev) > 0.01 * b) {
        ++rep.excluded;
        continue;
      }
      rep.points.push_back({d, std::log(b) - phi_x0 - model.weight.value(y)});
    }
  }
  const int np = static_cast<int>(rep.points.size());
  if (np < 3) throw SolverError("too few decay probes above the noise floor");

  double sd = 0.0, sy = 0.0;
  for (const auto& p : rep.points) {
    sd += p.dist;
    sy += p.loggap;
  }
  const double md = sd / np, my = sy / np;
  double sxx = 0.0, sxy = 0.0, sst = 0.0;
  for (const auto& p : rep.points) {
    sxx += (p.dist - md) * (p.dist - md);
    sxy += (p.dist - md) * (p.loggap - my);
    sst += (p.loggap - my) * (p.loggap - my);
  }
  const double slope = sxy / sxx;
  rep.alpha_hat = -slope;
  rep.log_c = my - slope * md;
  double ssr = 0.0;
  for (const auto& p : rep.points) {
    const double fit = rep.log_c + slope * p.dist;
    ssr += (p.loggap - fit) * (p.loggap - fit);
  }
  rep.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;

  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const auto& p : rep.points) {
    const Eigen::Vector3d row(1.0, p.dist, p.dist * p.dist);
    a += row * row.transpose();
    rhs += row * p.loggap;
  }
  const Eigen::Vector3d q = a.ldlt().solve(rhs);
  rep.quad_a = q[0];
  rep.quad_b = q[1];
  rep.quad_c = q[2];
  return rep;
}

// ---------------------------------------------------------------------------
// lower-bound witness
// ---------------------------------------------------------------------------

struct WitnessRow {
  double k = 0.0;
  double tau = 0.0;
  double grid_h = 0.0;
  double grid_half_width = 0.0;
  double norm_g2 = 0.0;
  double norm_u2 = 0.0;
  double r = 0.0;             // k^{-(n+1)} |G(0)|^2 / ||G||^2 e^{-2k^2 phi(0)}
  double r_triangle = 0.0;    // same with (|g(0)|-|u(0)|) / (||g||+||u||)
  double g_norm2_of_G = 0.0;  // ||G||^2, for the triangle bookkeeping
  double dg_outside_annulus = 0.0;
  int solve_iterations = 0;
};

struct WitnessReport {
  Rational t;
  double floor_value = 0.0;  // 0.5 (2t/pi)^{(n+1)/2}
  std::vector<WitnessRow> rows;
  bool ratio_decreasing = true;
  bool floor_pass = true;
  bool triangle_consistent = true;
};

struct WitnessGridSpec {
  // automatic when spacing <= 0: h = min(tau/10, sigma/4), box from the
  // k^2 phi decay; explicit spacing must resolve the oscillation scale
  double spacing = -1.0;
  double half_width = -1.0;
};

inline WitnessReport lower_bound_witness(const Weight& base, const std::vector<Rational>& ks,
                                         double tau_override = -1.0,
                                         const WitnessGridSpec& gspec = {},
                                         const SolveOptions& sopts = {}) {
  if (ks.empty()) throw std::invalid_argument("witness needs a k ladder");
  const QuadDecomposition dec = decompose_quadratic(base);
  const int n = base.n;
  const double t = to_double(dec.t);
  WitnessReport rep;
  rep.t = dec.t;
  rep.floor_value = 0.5 * std::pow(2.0 * t / std::numbers::pi, (n + 1) / 2.0);

  double prev_ratio = std::numeric_limits<double>::infinity();
  for (const Rational& kq : ks) {
    const double k = to_double(kq);
    if (!(k > 0.0)) throw std::invalid_argument("witness k must be positive");
    const double tau = tau_override > 0.0 ? tau_override : 1.0 / std::sqrt(k);
    const double sigma = 1.0 / (2.0 * k * std::sqrt(t));

    double h = gspec.spacing > 0.0 ? gspec.spacing : std::min(tau / 10.0, sigma / 4.0);
    if (h > std::min(tau / 6.0, sigma / 2.0))
      throw std::invalid_argument("grid too coarse for witness amplitude k");
    double rb = gspec.half_width > 0.0
                    ? gspec.half_width
                    : std::max(std::sqrt(9.3 / (2.0 * k * k * t)), 1.25 * tau);
    const int m = static_cast<int>(std::ceil(rb / h - 1e-9));
    const Grid grid(n, m * h, h);

    const Weight wk = base.scaled(kq * kq);
    auto g_fn = [&](const Eigen::VectorXd& x) {
      std::vector<double> pt(x.data(), x.data() + x.size());
      const double hval = dec.h.evaluate(pt)[0];
      return std::pow(k, (n + 1) / 2.0) * cutoff_chi(x.norm() / tau) * std::exp(k * k * hval);
    };
    const GridField g = GridField::sample_scalar(grid, g_fn);
    const GridField f = discretize(grid).apply(g);

    WitnessRow row;
    row.k = k;
    row.tau = tau;
    row.grid_h = grid.h;
    row.grid_half_width = grid.half_width;
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
      const double rr = grid.point(i).norm();
      if (rr > tau / 2 - 2.5 * h && rr < tau + 2.5 * h) continue;
      row.dg_outside_annulus = std::max(row.dg_outside_annulus, norm(f.at(i)));
    }

    SolveInfo info;
    const GridField u = minimal_norm_solve(f, wk, grid, sopts, &info);
    row.solve_iterations = info.iterations;
    row.norm_g2 = weighted_norm_sq(g, wk);
    row.norm_u2 = weighted_norm_sq(u, wk);

    GridField big_g(grid);
    big_g.data = g.data - u.data;
    row.g_norm2_of_G = weighted_norm_sq(big_g, wk);
    const double scale = std::pow(k, -(n + 1)) * std::exp(-2.0 * k * k * base.value(
                             Eigen::VectorXd::Zero(n + 1)));
    const double g0_abs = norm(big_g.at(grid.origin_index()));
    row.r = scale * g0_abs * g0_abs / row.g_norm2_of_G;

    const double g0 = std::abs(g.comp(grid.origin_index(), 0));
    const double u0 = norm(u.at(grid.origin_index()));
    const double tri_num = std::max(g0 - u0, 0.0);
    const double tri_den = std::sqrt(row.norm_g2) + std::sqrt(row.norm_u2);
    row.r_triangle = scale * tri_num * tri_num / (tri_den * tri_den);

    // triangle bookkeeping: ||G||^2 <= (||g|| + ||u||)^2 and r >= r_triangle
    if (row.g_norm2_of_G > tri_den * tri_den * (1.0 + 1e-12)) rep.triangle_consistent = false;
    if (row.r < row.r_triangle * (1.0 - 1e-9)) rep.triangle_consistent = false;

    const double ratio = row.norm_u2 / row.norm_g2;
    if (ratio >= prev_ratio) rep.ratio_decreasing = false;
    prev_ratio = ratio;
    rep.rows.push_back(std::move(row));
  }
  rep.floor_pass = rep.rows.back().r >= rep.floor_value;
  return rep;
}

// ---------------------------------------------------------------------------
// harmonic kernel bound
// ---------------------------------------------------------------------------

struct HarmonicBoundReport {
  double c_hat = 0.0;      // max |B_har(x,y)| e^{-phi(x)-phi(y)}
  double c_hat_ref = 0.0;  // same at the refined degree
  double rel_change = 0.0;
  double min_diag = std::numeric_limits<double>::infinity();
  bool stable = false;
};

inline HarmonicBoundReport harmonic_bound_check(const KernelModel& m, const KernelModel& m_ref,
                                                const std::vector<Eigen::VectorXd>& samples,
                                                double stability_tol = 0.05) {
  if (m.alg != 0 || m_ref.alg != 0) throw std::invalid_argument("harmonic models required");
  HarmonicBoundReport rep;
  auto chat = [&](const KernelModel& model, double* min_diag) {
    double c = 0.0;
    for (const auto& x : samples) {
      for (const auto& y : samples) {
        const double b = evaluate_harmonic_kernel(model, x, y);
        const double gap = std::abs(b) * std::exp(-model.weight.value(x) - model.weight.value(y));
        c = std::max(c, gap);
      }
      if (min_diag) *min_diag = std::min(*min_diag, evaluate_harmonic_kernel(model, x, x));
    }
    return c;
  };
  rep.c_hat = chat(m, &rep.min_diag);
  rep.c_hat_ref = chat(m_ref, nullptr);
  rep.rel_change = std::abs(rep.c_hat - rep.c_hat_ref) / std::max(rep.c_hat_ref, 1e-300);
  rep.stable = rep.rel_change <= stability_tol;
  return rep;
}

}  // namespace cliffock
