#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"

namespace cliffock {

struct ContractResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace runner_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::vector<Eigen::VectorXd> seeded_ball_points(int count, int vars, double radius,
                                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd d(vars);
    for (int j = 0; j < vars; ++j) d[j] = gauss(rng);
    d.normalize();
    pts.push_back(radius * std::pow(unif(rng), 1.0 / vars) * d);
  }
  return pts;
}

inline std::vector<Eigen::VectorXd> direction_set(int vars) {
  std::vector<Eigen::VectorXd> dirs;
  for (int j = 0; j < vars; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(vars);
    e[j] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(vars);
  dirs.push_back(diag.normalized());
  diag[0] = -1.0;
  dirs.push_back(diag.normalized());
  return dirs;
}

inline PolyField<Rational> random_combo(const GradedBasis& basis, std::mt19937_64& rng,
                                        int terms) {
  PolyField<Rational> p(basis.vars, basis.alg);
  for (int t = 0; t < terms; ++t) {
    const std::size_t i = rng() % basis.size();
    const int num = static_cast<int>(rng() % 9) - 4;
    p += basis.elements[i] * Rational(num == 0 ? 1 : num, 2);
  }
  return p;
}

inline std::string blade_column(BladeIndex mask) {
  if (mask == 0) return "B0";
  std::string s = "B";
  for (int j = 1; j <= kMaxAlgebraDim; ++j)
    if (mask & (BladeIndex{1} << (j - 1))) s += std::to_string(j);
  return s;
}

inline std::string coord_header(const std::string& stem, int vars) {
  std::string h;
  for (int j = 0; j < vars; ++j) h += (j ? "," : "") + stem + std::to_string(j);
  return h;
}

inline bool weight_is_unit_iso(const Weight& w) {
  if (w.kind != Weight::Kind::quadratic) return false;
  for (int i = 0; i < w.vars(); ++i)
    for (int j = 0; j < w.vars(); ++j)
      if (w.q[i][j] != (i == j ? Rational(1) : Rational(0))) return false;
  return true;
}

inline KernelModel monogenic_model(const ExperimentConfig& cfg, int degree) {
  KernelBuildOptions opts;
  opts.cond_cap = cfg.cond_cap;
  opts.tol_repro = cfg.tol_repro;
  const int order = std::max(cfg.effective_quad_order(), degree + 2);
  return build_model(monogenic_basis(cfg.n, degree), cfg.weight,
                     gauss_full_space(cfg.weight, order), opts);
}

inline KernelModel harmonic_model_at(const ExperimentConfig& cfg, int degree) {
  KernelBuildOptions opts;
  opts.cond_cap = cfg.cond_cap;
  opts.tol_repro = cfg.tol_repro;
  const int order = std::max(cfg.effective_quad_order(), degree + 2);
  return harmonic_model(harmonic_basis(cfg.n, degree), cfg.weight,
                        gauss_full_space(cfg.weight, order), opts);
}

inline std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

inline void gnuplot_script(const ExperimentConfig& cfg, const std::string& name,
                           const std::string& body) {
  write_text_file(out_path(cfg, name),
                  "# gnuplot command file\nset datafile separator ','\nset key autotitle "
                  "columnhead\n" +
                      body);
}

}  // namespace runner_detail

// ---------------------------------------------------------------------------
// kernel: build the model, verify the reproducing system and sup identity
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_kernel(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  std::vector<ContractResult> out;
  const KernelModel model = rd::monogenic_model(cfg, cfg.degree);

  const auto pts =
      rd::seeded_ball_points(cfg.sample_points, cfg.n + 1, cfg.sample_radius, cfg.seed);
  double max_resid = 0.0, max_gap = 0.0;
  bool resid_ok = true;
  for (const auto& x : pts) {
    try {
      const KernelCoeffs kc = kernel_coefficients(model, x);
      max_resid = std::max(max_resid, kc.residual);
    } catch (const KernelResidualError& e) {
      resid_ok = false;
      max_resid = std::max(max_resid, e.residual);
    }
    const auto [lhs, rhs] = diagonal_sup_check(model, x);
    max_gap = std::max(max_gap, std::abs(lhs - rhs) / rhs);
  }
  out.push_back({"kernel.reproducing", resid_ok && max_resid <= cfg.tol_repro,
                 "max stacked residual " + rd::fmt(max_resid)});
  out.push_back({"kernel.sup_identity", max_gap <= 1e-8,
                 "max |B(x,x)| vs eigen-sup gap " + rd::fmt(max_gap)});

  // diagonal dump along the first axis
  CsvWriter csv(rd::out_path(cfg, "kernel_diag.csv"),
                rd::coord_header("x", cfg.n + 1) + ",B0,ratio");
  const int steps = static_cast<int>(std::floor(cfg.rho_max / cfg.step + 1e-9));
  for (int i = -steps; i <= steps; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cfg.n + 1);
    x[0] = i * cfg.step;
    const double b0 = scalar_part(evaluate_kernel(model, x, x).value);
    std::vector<double> row(x.data(), x.data() + x.size());
    row.push_back(b0);
    row.push_back(b0 * std::exp(-2.0 * cfg.weight.value(x)));
    std::string line;
    for (std::size_t j = 0; j < row.size(); ++j) line += (j ? "," : "") + csv_num(row[j]);
    csv.raw(line);
  }

  // a few full evaluations with all blade components
  std::string header = rd::coord_header("x", cfg.n + 1) + "," + rd::coord_header("y", cfg.n + 1);
  for (BladeIndex a = 0; a < model.blades(); ++a) header += "," + rd::blade_column(a);
  header += ",residual";
  CsvWriter evcsv(rd::out_path(cfg, "kernel_eval.csv"), header);
  const auto pair_pts = rd::seeded_ball_points(8, cfg.n + 1, cfg.sample_radius, cfg.seed + 1);
  for (std::size_t i = 0; i + 1 < pair_pts.size(); i += 2) {
    const KernelEvaluation ev = evaluate_kernel(model, pair_pts[i], pair_pts[i + 1]);
    std::string line;
    for (int j = 0; j < cfg.n + 1; ++j) line += (j ? "," : "") + csv_num(ev.x[j]);
    for (int j = 0; j < cfg.n + 1; ++j) line += "," + csv_num(ev.y[j]);
    for (BladeIndex a = 0; a < model.blades(); ++a) line += "," + csv_num(ev.value[a]);
    line += "," + csv_num(ev.residual);
    evcsv.raw(line);
  }
  rd::gnuplot_script(cfg, "kernel_diag.gp",
                     "set xlabel 'x0'\nset ylabel 'ratio'\nplot 'kernel_diag.csv' using 1:" +
                         std::to_string(cfg.n + 3) + " with linespoints\n");
  return out;
}

// ---------------------------------------------------------------------------
// dirac: minimal-norm solves, L2 bound ratio + drift, energy identity,
// duality chain/inequality
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_dirac(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  std::vector<ContractResult> out;
  const Weight& w = cfg.weight;
  if (!(w.m > 0.0)) throw ConfigError("dirac experiments need a quadratic weight");

  const Grid grid(cfg.n, cfg.grid_half_width, cfg.grid_spacing);
  const Grid fine(cfg.n, cfg.grid_half_width, cfg.grid_spacing / 2.0);
  const DiracOperator d_coarse = discretize(grid);
  const DiracOperator d_fine = discretize(fine);
  const DiracOperator dint_coarse = discretize(grid, false, true);
  const DiracOperator dint_fine = discretize(fine, false, true);
  const DiracOperator dbar_coarse = discretize(grid, true, false);
  const DiracOperator dbar_fine = discretize(fine, true, false);
  const GradedBasis basis = monogenic_basis(cfg.n, std::min(cfg.degree, 3));

  const double bump_radius =
      std::min(std::max(1.2, 20.0 * grid.h), grid.half_width - 0.4);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  double max_ratio = 0.0, max_drift = 0.0, max_resid = 0.0;
  CsvWriter l2csv(rd::out_path(cfg, "dirac_l2_bound.csv"),
                    "index,ratio_lap,ratio_lap2,ratio_fine,residual");
  GridField last_f(grid), last_u(grid), last_f_fine(fine), last_u_fine(fine);
  for (int i = 0; i < cfg.sample_points; ++i) {
    PolyField<Rational> p = rd::random_combo(basis, rng, 3);
    Eigen::VectorXd center(cfg.n + 1);
    for (int j = 0; j <= cfg.n; ++j) center[j] = 0.25 * uni(rng);
    const FieldFn gfn = bump_times_poly(radial_bump(center, bump_radius), p);

    const GridField f = d_coarse.apply(GridField::sample(grid, gfn));
    SolveInfo info;
    const GridField u = minimal_norm_solve(f, w, grid, cfg.solver, &info, &dint_coarse);
    const L2BoundReport rep = verify_l2_bound(u, f, w);

    const GridField f2 = d_fine.apply(GridField::sample(fine, gfn));
    const GridField u2 = minimal_norm_solve(f2, w, fine, cfg.solver, nullptr, &dint_fine);
    const L2BoundReport rep2 = verify_l2_bound(u2, f2, w);

    const double drift = std::abs(rep.ratio_lap - rep2.ratio_lap) /
                         std::max(rep2.ratio_lap, 1e-300);
    max_ratio = std::max(max_ratio, rep.ratio_lap);
    max_drift = std::max(max_drift, drift);
    max_resid = std::max(max_resid, info.rel_residual);
    l2csv.row({static_cast<double>(i), rep.ratio_lap, rep.ratio_lap2,
                 rep2.ratio_lap, info.rel_residual});
    last_f = f;
    last_u = u;
    last_f_fine = f2;
    last_u_fine = u2;
  }
  {
    std::ostringstream field;
    write_field_csv(last_u, field);
    write_text_file(rd::out_path(cfg, "dirac_solution.csv"), field.str());
  }
  out.push_back({"dirac.l2_bound_ratio", max_ratio <= 1.0 + cfg.tol_disc,
                 "max ratio " + rd::fmt(max_ratio) + " (cap " + rd::fmt(1.0 + cfg.tol_disc) + ")"});
  out.push_back({"dirac.l2_bound_drift", max_drift <= 0.05,
                 "max ratio drift under h/2 " + rd::fmt(max_drift)});
  out.push_back({"dirac.solver_residual", max_resid <= cfg.solver.rtol,
                 "max solve residual " + rd::fmt(max_resid)});

  // energy identity on a flat-top cutoff, h and h/2
  const double cut_radius = std::min(grid.half_width - 0.4, grid.half_width - 3.0 * grid.h);
  auto energy = [&](const Grid& g, const DiracOperator& dbar) {
    const GridField alpha = GridField::sample_scalar(
        g, radial_bump(Eigen::VectorXd::Zero(cfg.n + 1), cut_radius, cutoff_chi));
    const auto [lhs, rhs] = energy_identity_check(alpha, w, g, &dbar);
    return std::make_tuple(lhs, rhs, std::abs(lhs - rhs) / rhs);
  };
  const auto [el, er, em] = energy(grid, dbar_coarse);
  const auto [el2, er2, em2] = energy(fine, dbar_fine);
  CsvWriter ecsv(rd::out_path(cfg, "dirac_energy.csv"), "h,lhs,rhs,rel_mismatch");
  ecsv.row({grid.h, el, er, em});
  ecsv.row({fine.h, el2, er2, em2});
  const double budget = 1.0e-3 * std::pow(grid.h / 0.05, 2);
  const double shrink = em / std::max(em2, 1e-300);
  out.push_back({"dirac.energy_identity", em <= budget,
                 "rel mismatch " + rd::fmt(em) + " (budget " + rd::fmt(budget) + ")"});
  out.push_back({"dirac.energy_refinement", shrink >= 2.5 && shrink <= 6.5,
                 "mismatch shrink factor " + rd::fmt(shrink)});

  // duality checks: 20 bump test fields, sampled on both grids so the chain
  // mismatch can be checked for its O(h^2) shrink
  struct AlphaSpec {
    Eigen::VectorXd center;
    double radius;
    BladeIndex blade;
  };
  std::vector<AlphaSpec> specs;
  std::mt19937_64 arng(cfg.seed + 17);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd c(cfg.n + 1);
    for (int j = 0; j <= cfg.n; ++j) c[j] = 0.3 * uni(arng);
    const double radius = (0.5 + 0.3 * std::abs(uni(arng))) * (grid.half_width - 0.7);
    specs.push_back({c, radius, static_cast<BladeIndex>(arng() % grid.blades())});
  }
  auto make_alphas = [&](const Grid& g) {
    std::vector<GridField> alphas;
    for (const auto& spec : specs) {
      GridField alpha(g);
      const GridField s = GridField::sample_scalar(g, radial_bump(spec.center, spec.radius));
      for (std::int64_t node = 0; node < g.node_count(); ++node)
        alpha.comp(node, spec.blade) = s.comp(node, 0);
      alphas.push_back(std::move(alpha));
    }
    return alphas;
  };
  const DualityReport t1 =
      duality_checks(last_f, last_u, w, grid, make_alphas(grid), 1.1, &dbar_coarse);
  const DualityReport t1f =
      duality_checks(last_f_fine, last_u_fine, w, fine, make_alphas(fine), 1.1, &dbar_fine);
  const double chain_shrink = t1.max_chain_mismatch / std::max(t1f.max_chain_mismatch, 1e-300);

  CsvWriter t1csv(rd::out_path(cfg, "dirac_duality.csv"),
                  "index,chain_mismatch,chain_mismatch_fine,ineq_lhs,ineq_rhs");
  for (std::size_t i = 0; i < t1.rows.size(); ++i)
    t1csv.row({static_cast<double>(i), t1.rows[i].chain_mismatch, t1f.rows[i].chain_mismatch,
               t1.rows[i].ineq_lhs, t1.rows[i].ineq_rhs});
  out.push_back({"dirac.duality_inequality", t1.all_pass && t1f.all_pass,
                 "20 test fields, slack 1.1, max chain mismatch " +
                     rd::fmt(t1.max_chain_mismatch)});
  out.push_back({"dirac.duality_chain_refinement", chain_shrink >= 2.5,
                 "chain mismatch shrink factor " + rd::fmt(chain_shrink)});

  rd::gnuplot_script(cfg, "dirac.gp",
                     "set xlabel 'trial'\nset ylabel 'L2 bound ratio'\nplot 'dirac_l2_bound.csv' "
                     "using 1:2 with points, '' using 1:4 with points\n");
  return out;
}

// ---------------------------------------------------------------------------
// mvi: empirical mean-value constants over radii, quadrature stability,
// lambda-scale invariance at n = 1
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_mvi(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  std::vector<ContractResult> out;
  std::mt19937_64 rng(cfg.seed);
  const PolyField<Rational> mono =
      rd::random_combo(monogenic_basis(cfg.n, std::min(cfg.degree, 4)), rng, 3);
  const PolyField<Rational> harm =
      rd::random_combo(harmonic_basis(cfg.n, std::min(cfg.degree, 4)), rng, 3);
  const auto pts =
      rd::seeded_ball_points(cfg.sample_points, cfg.n + 1, cfg.sample_radius, cfg.seed + 3);

  bool finite_ok = true, stable_ok = true;
  double worst_stab = 0.0;
  CsvWriter sum(rd::out_path(cfg, "mvi_summary.csv"), "R,kind,c_hat,c_hat_refined");
  for (const char* kind : {"monogenic", "harmonic"}) {
    const FieldFn u = poly_field_fn(kind == std::string("monogenic") ? mono : harm);
    for (double radius : cfg.radii) {
      const MviReport rep = mvi_check(u, cfg.weight, radius, pts, cfg.ball_order);
      const MviReport fine = mvi_check(u, cfg.weight, radius, pts, 2 * cfg.ball_order);
      finite_ok = finite_ok && !rep.any_anomaly && std::isfinite(rep.c_hat);
      const double stab = std::abs(rep.c_hat - fine.c_hat) / std::max(fine.c_hat, 1e-300);
      worst_stab = std::max(worst_stab, stab);
      stable_ok = stable_ok && stab <= 0.10;
      sum.raw(csv_num(radius) + std::string(",") + kind + "," + csv_num(rep.c_hat) + "," +
              csv_num(fine.c_hat));

      char name[64];
      std::snprintf(name, sizeof name, "mvi_%s_r%03d.csv", kind,
                    static_cast<int>(std::lround(radius * 100)));
      CsvWriter csv(rd::out_path(cfg, name), rd::coord_header("x", cfg.n + 1) + ",lhs,rhs,ratio");
      for (const auto& p : rep.points) {
        std::string line;
        for (int j = 0; j <= cfg.n; ++j) line += (j ? "," : "") + csv_num(p.x[j]);
        line += "," + csv_num(p.lhs) + "," + csv_num(p.rhs) + "," + csv_num(p.ratio);
        csv.raw(line);
      }
    }
  }
  out.push_back({"mvi.ratios_finite", finite_ok, "no degenerate ball integrals"});
  out.push_back({"mvi.quadrature_stable", stable_ok,
                 "worst c_hat change under refinement " + rd::fmt(worst_stab)});

  if (cfg.n == 1) {
    // modulus is multiplicative in A_1, so the ratios are exactly invariant
    Multivector<double> lam(1);
    lam[0] = -0.75;
    lam[1] = 1.25;
    const FieldFn u = poly_field_fn(mono);
    const FieldFn lu = [&, lam](const Eigen::VectorXd& x) {
      return geometric_product(lam, u(x));
    };
    double worst = 0.0;
    for (double radius : cfg.radii) {
      const MviReport a = mvi_check(u, cfg.weight, radius, pts, cfg.ball_order);
      const MviReport b = mvi_check(lu, cfg.weight, radius, pts, cfg.ball_order);
      for (std::size_t i = 0; i < a.points.size(); ++i)
        worst = std::max(worst, std::abs(a.points[i].ratio - b.points[i].ratio) /
                                    std::max(a.points[i].ratio, 1e-300));
    }
    out.push_back({"mvi.scale_invariance", worst <= 1e-12,
                   "max ratio change under u -> lambda u: " + rd::fmt(worst)});
  }
  rd::gnuplot_script(cfg, "mvi.gp",
                     "set xlabel 'R'\nset ylabel 'c_hat'\nplot 'mvi_summary.csv' using 1:3 with "
                     "points\n");
  return out;
}

// ---------------------------------------------------------------------------
// moser: chain table and sup comparison
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_moser(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  std::vector<ContractResult> out;
  std::mt19937_64 rng(cfg.seed + 5);
  const PolyField<Rational> vpoly =
      rd::random_combo(harmonic_basis(cfg.n, std::min(cfg.degree, 3)), rng, 3);
  ScalarFn v = [&](const Eigen::VectorXd& x) {
    std::vector<double> pt(x.data(), x.data() + x.size());
    return vpoly.evaluate(pt)[0];
  };
  const int order = std::max(40, cfg.ball_order);
  const double sup_step = cfg.n == 1 ? 0.01 : (cfg.n == 2 ? 0.02 : 0.05);
  const MoserReport rep =
      moser_chain(v, cfg.weight, cfg.n, cfg.moser_k0, order, cfg.moser_chi, sup_step);

  CsvWriter csv(rd::out_path(cfg, "moser.csv"), "i,gamma,r,norm");
  for (const auto& row : rep.rows) csv.row({static_cast<double>(row.i), row.gamma, row.radius,
                                            row.norm});
  const double gap = std::abs(rep.final_norm - rep.sup_estimate) / rep.sup_estimate;
  out.push_back({"moser.sup_agreement", gap <= 0.10,
                 "final L^gamma column vs half-ball sup: gap " + rd::fmt(gap) +
                     (rep.log_space_used ? " (log-space evaluation engaged)" : "")});
  bool finite = true;
  for (const auto& row : rep.rows) finite = finite && std::isfinite(row.norm) && row.norm > 0.0;
  out.push_back({"moser.chain_finite", finite,
                 "empirical sup/L2 chain constant " + rd::fmt(rep.sup_to_l2)});
  rd::gnuplot_script(cfg, "moser.gp",
                     "set xlabel 'i'\nset ylabel 'L^gamma norm'\nplot 'moser.csv' using 1:4 with "
                     "linespoints\n");
  return out;
}

// ---------------------------------------------------------------------------
// diagonal: profile of [B(x,x)]_0 e^{-2phi}
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_diagonal(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  if (cfg.degree < 1) throw ConfigError("diagonal profile needs degree >= 1");
  std::vector<ContractResult> out;
  const KernelModel model = rd::monogenic_model(cfg, cfg.degree);
  const KernelModel prev = rd::monogenic_model(cfg, cfg.degree - 1);
  const auto dirs = rd::direction_set(cfg.n + 1);
  const DiagonalReport rep = diagonal_profile(model, prev, cfg.rho_max, cfg.step, dirs);

  CsvWriter csv(rd::out_path(cfg, "diagonal_profile.csv"),
                rd::coord_header("x", cfg.n + 1) + ",B0,ratio");
  for (const auto& row : rep.rows) {
    std::string line;
    for (int j = 0; j <= cfg.n; ++j) line += (j ? "," : "") + csv_num(row.x[j]);
    line += "," + csv_num(row.b0) + "," + csv_num(row.ratio);
    csv.raw(line);
  }

  std::string conv_note = rep.shrank ? " (radius shrank to " + rd::fmt(rep.rho_used) + ")" : "";
  out.push_back({"diagonal.positive", rep.min_ratio > 0.0,
                 "min ratio " + rd::fmt(rep.min_ratio) + conv_note});
  if (cfg.n == 1 && rd::weight_is_unit_iso(cfg.weight)) {
    double worst = 0.0;
    bool cover = rep.rho_used >= std::min(1.0, cfg.rho_max) - 1e-9;
    for (const auto& row : rep.rows)
      if (row.x.norm() <= 1.0 + 1e-9)
        worst = std::max(worst, std::abs(row.ratio * std::numbers::pi / 2.0 - 1.0));
    out.push_back({"diagonal.fock_anchor", cover && worst <= 0.02,
                   "max deviation of ratio from 2/pi: " + rd::fmt(worst)});
  } else {
    out.push_back({"diagonal.bounded", rep.max_ratio / rep.min_ratio <= 3.0,
                   "max/min ratio " + rd::fmt(rep.max_ratio / rep.min_ratio) + conv_note});
  }
  rd::gnuplot_script(cfg, "diagonal.gp",
                     "set xlabel 'x0'\nset ylabel 'ratio'\nplot 'diagonal_profile.csv' using 1:" +
                         std::to_string(cfg.n + 3) + " with points\n");
  return out;
}

// ---------------------------------------------------------------------------
// decay: off-diagonal fit
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_decay(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  if (cfg.degree < 1) throw ConfigError("decay fit needs degree >= 1");
  std::vector<ContractResult> out;
  const KernelModel model = rd::monogenic_model(cfg, cfg.degree);
  const KernelModel prev = rd::monogenic_model(cfg, cfg.degree - 1);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(cfg.n + 1);
  if (!cfg.decay_origin.empty())
    for (int j = 0; j <= cfg.n; ++j) x0[j] = cfg.decay_origin[j];
  else
    x0[0] = 0.2;

  std::vector<Eigen::VectorXd> dirs;
  for (int j = 0; j <= cfg.n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(cfg.n + 1);
    e[j] = 1.0;
    dirs.push_back(e);
  }
  dirs.push_back(Eigen::VectorXd::Ones(cfg.n + 1).normalized());

  const DecayReport rep = offdiagonal_decay(model, prev, x0, dirs, cfg.decay_distances);
  CsvWriter csv(rd::out_path(cfg, "decay.csv"), "dist,loggap");
  for (const auto& p : rep.points) csv.row({p.dist, p.loggap});

  out.push_back({"decay.alpha_positive", rep.alpha_hat > 0.0,
                 "alpha_hat " + rd::fmt(rep.alpha_hat) + ", quadratic-term coefficient " +
                     rd::fmt(rep.quad_c) + ", " + std::to_string(rep.excluded) + " excluded"});
  out.push_back({"decay.fit_quality", rep.r_squared >= 0.9,
                 "linear fit R^2 " + rd::fmt(rep.r_squared)});
  rd::gnuplot_script(
      cfg, "decay.gp",
      "set xlabel 'dist'\nset ylabel 'loggap'\nplot 'decay.csv' using 1:2 with points\n");
  return out;
}

// ---------------------------------------------------------------------------
// witness: lower-bound construction over the k ladder
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_witness(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  std::vector<ContractResult> out;
  if (cfg.weight.kind != Weight::Kind::quadratic)
    throw ConfigError("witness experiment needs a quadratic weight");
  const WitnessReport rep =
      lower_bound_witness(cfg.weight, cfg.witness_k, cfg.witness_tau, {}, cfg.solver);

  CsvWriter csv(rd::out_path(cfg, "witness.csv"), "k,norm_g2,norm_u2,r");
  for (const auto& row : rep.rows) csv.row({row.k, row.norm_g2, row.norm_u2, row.r});

  const auto& top = rep.rows.back();
  out.push_back({"witness.correction_decays", rep.ratio_decreasing,
                 "norm_u2/norm_g2 strictly decreasing over the k ladder"});
  out.push_back({"witness.floor", rep.floor_pass,
                 "r(top k) " + rd::fmt(top.r) + " vs floor " + rd::fmt(rep.floor_value)});
  double dg_out = 0.0;
  for (const auto& row : rep.rows) dg_out = std::max(dg_out, row.dg_outside_annulus);
  out.push_back({"witness.annulus_support", dg_out <= 1e-9,
                 "max |Dg| outside the annulus " + rd::fmt(dg_out)});
  out.push_back({"witness.triangle_consistency", rep.triangle_consistent,
                 "||G|| and |G(0)| against the triangle bookkeeping"});
  rd::gnuplot_script(cfg, "witness.gp",
                     "set xlabel 'k'\nset ylabel 'r'\nplot 'witness.csv' using 1:4 with "
                     "linespoints\n");
  return out;
}

// ---------------------------------------------------------------------------
// harmonic: scalar kernel bound and degree stability
// ---------------------------------------------------------------------------

inline std::vector<ContractResult> run_harmonic(const ExperimentConfig& cfg) {
  namespace rd = runner_detail;
  std::vector<ContractResult> out;
  if (cfg.harmonic_degree_ref <= cfg.harmonic_degree)
    throw ConfigError("harmonic.degree_ref must exceed harmonic.degree");
  const KernelModel model = rd::harmonic_model_at(cfg, cfg.harmonic_degree);
  const KernelModel ref = rd::harmonic_model_at(cfg, cfg.harmonic_degree_ref);

  const auto samples =
      rd::seeded_ball_points(cfg.sample_points, cfg.n + 1, cfg.sample_radius, cfg.seed + 7);
  const HarmonicBoundReport rep = harmonic_bound_check(model, ref, samples, 0.05);

  double max_resid = 0.0;
  bool resid_ok = true;
  for (const auto& x : samples) {
    try {
      max_resid = std::max(max_resid, kernel_coefficients(model, x).residual);
    } catch (const KernelResidualError& e) {
      resid_ok = false;
      max_resid = std::max(max_resid, e.residual);
    }
  }

  CsvWriter csv(rd::out_path(cfg, "harmonic.csv"),
                rd::coord_header("x", cfg.n + 1) + "," + rd::coord_header("y", cfg.n + 1) +
                    ",B,gap");
  for (const auto& x : samples)
    for (const auto& y : samples) {
      const double b = evaluate_harmonic_kernel(model, x, y);
      std::string line;
      for (int j = 0; j <= cfg.n; ++j) line += (j ? "," : "") + csv_num(x[j]);
      for (int j = 0; j <= cfg.n; ++j) line += "," + csv_num(y[j]);
      line += "," + csv_num(b) + "," +
              csv_num(std::abs(b) * std::exp(-cfg.weight.value(x) - cfg.weight.value(y)));
      csv.raw(line);
    }

  out.push_back({"harmonic.reproducing", resid_ok && max_resid <= cfg.tol_repro,
                 "max stacked residual " + rd::fmt(max_resid)});
  out.push_back({"harmonic.bound_stable", rep.stable,
                 "c_hat " + rd::fmt(rep.c_hat) + " -> " + rd::fmt(rep.c_hat_ref) +
                     " (rel change " + rd::fmt(rep.rel_change) + ")"});
  out.push_back({"harmonic.positive_diagonal", rep.min_diag > 0.0,
                 "min B(x,x) " + rd::fmt(rep.min_diag)});
  rd::gnuplot_script(cfg, "harmonic.gp",
                     "set xlabel 'pair'\nset ylabel 'gap'\nplot 'harmonic.csv' using 0:" +
                         std::to_string(2 * (cfg.n + 1) + 2) + " with points\n");
  return out;
}

inline std::vector<ContractResult> run_all(const ExperimentConfig& cfg) {
  std::vector<ContractResult> out;
  for (auto* fn : {run_kernel, run_dirac, run_mvi, run_moser, run_diagonal, run_decay,
                   run_witness, run_harmonic}) {
    const auto part = fn(cfg);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace cliffock
