#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rational.hpp"
#include "solver.hpp"
#include "weight.hpp"

namespace cliffock {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n",
      "degree",
      "seed",
      "weight.type",
      "weight.coeffs",
      "quadrature.order",
      "quadrature.kind",
      "quadrature.ball_order",
      "grid.half_width",
      "grid.spacing",
      "solver.max_iter",
      "solver.rtol",
      "samples.points",
      "samples.radius",
      "samples.radii",
      "samples.rho_max",
      "samples.step",
      "witness.k",
      "witness.tau",
      "witness.chi",
      "kernel.cond_cap",
      "kernel.tol_repro",
      "decay.distances",
      "decay.origin",
      "moser.k0",
      "moser.chi",
      "harmonic.degree",
      "harmonic.degree_ref",
      "tol.disc",
      "output.dir",
  };
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Flat "section.key = value" text config; '#' starts a comment. Unknown or
// duplicate keys are errors.
class Config {
 public:
  static Config parse_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (!detail::known_keys().count(key))
        throw ConfigError("unknown config key '" + key + "'");
      if (c.kv_.count(key)) throw ConfigError("duplicate config key '" + key + "'");
      c.kv_[key] = value;
    }
    return c;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  std::string require_str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
  }

  double get_num(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' is not a number: " + it->second);
    }
  }

  long get_int(const std::string& key, long fallback) const {
    const double v = get_num(key, static_cast<double>(fallback));
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v) throw ConfigError("key '" + key + "' is not an integer");
    return l;
  }

  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      if (tok.empty()) continue;
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a bad list entry: " + tok);
      }
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
    return out;
  }

  std::vector<Rational> get_rat_list(const std::string& key,
                                     const std::vector<Rational>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<Rational> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      if (tok.empty()) continue;
      try {
        out.push_back(parse_rational(tok));
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a bad rational entry: " + tok);
      }
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
    return out;
  }

 private:
  std::map<std::string, std::string> kv_;
};

struct ExperimentConfig {
  int n = 1;
  int degree = 8;
  std::uint64_t seed = 1;
  Weight weight;
  int quad_order = 0;  // 0: derived from the degree
  int ball_order = 24;
  double grid_half_width = 3.0;
  double grid_spacing = 0.05;
  SolveOptions solver;
  int sample_points = 10;
  double sample_radius = 1.0;
  std::vector<double> radii = {0.25, 0.5, 0.75};
  double rho_max = 1.0;
  double step = 0.1;
  std::vector<Rational> witness_k = {Rational(2), Rational(3), Rational(4), Rational(6)};
  double witness_tau = -1.0;  // k^{-1/2} when negative
  std::string witness_chi = "quintic";
  double moser_k0 = 1e-3;
  double moser_chi = -1.0;  // dimension rule when negative
  int harmonic_degree = 8;
  int harmonic_degree_ref = 10;
  std::vector<double> decay_distances = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<double> decay_origin;  // defaults to 0.2 along the first axis
  double cond_cap = 1e12;
  double tol_repro = 1e-8;
  double tol_disc = 0.1;
  std::string output_dir = "out";

  int effective_quad_order() const { return quad_order > 0 ? quad_order : degree + 2; }
};

inline Weight weight_from_config(const Config& c, int n) {
  const std::string type = c.require_str("weight.type");
  if (type == "zero") return zero_weight(n);
  std::vector<Rational> coeffs =
      c.get_rat_list("weight.coeffs", std::vector<Rational>{Rational(1)});
  if (type == "quadratic_iso") {
    if (coeffs.size() != 1) throw ConfigError("quadratic_iso takes one coefficient");
    return make_quadratic_iso(n, coeffs[0]);
  }
  if (type == "quadratic_diag") {
    if (static_cast<int>(coeffs.size()) != n + 1)
      throw ConfigError("quadratic_diag needs n+1 coefficients");
    return make_quadratic_diag(coeffs);
  }
  if (type == "quadratic_full") {
    const int vars = n + 1;
    if (static_cast<int>(coeffs.size()) != vars * vars)
      throw ConfigError("quadratic_full needs (n+1)^2 coefficients, row-major");
    RatMat q(vars, RatVec(vars));
    for (int i = 0; i < vars; ++i)
      for (int j = 0; j < vars; ++j) q[i][j] = coeffs[i * vars + j];
    return make_quadratic(q);
  }
  throw ConfigError("unknown weight.type '" + type + "'");
}

inline ExperimentConfig load_experiment_config(const Config& c) {
  ExperimentConfig e;
  e.n = static_cast<int>(c.get_int("n", 1));
  if (e.n < 1 || e.n > kMaxAlgebraDim) throw ConfigError("n out of range");
  e.degree = static_cast<int>(c.get_int("degree", 8));
  if (e.degree < 0) throw ConfigError("degree must be nonnegative");
  e.seed = static_cast<std::uint64_t>(c.get_int("seed", 1));
  try {
    e.weight = weight_from_config(c, e.n);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("bad weight: ") + ex.what());
  }
  const std::string qkind = c.get_str("quadrature.kind", "gauss");
  if (qkind != "gauss") throw ConfigError("unknown quadrature.kind '" + qkind + "'");
  e.quad_order = static_cast<int>(c.get_int("quadrature.order", 0));
  e.ball_order = static_cast<int>(c.get_int("quadrature.ball_order", 24));
  e.grid_half_width = c.get_num("grid.half_width", 3.0);
  e.grid_spacing = c.get_num("grid.spacing", 0.05);
  e.solver.max_iter = static_cast<int>(c.get_int("solver.max_iter", 10000));
  e.solver.rtol = c.get_num("solver.rtol", 1e-8);
  e.sample_points = static_cast<int>(c.get_int("samples.points", 10));
  e.sample_radius = c.get_num("samples.radius", 1.0);
  e.radii = c.get_list("samples.radii", e.radii);
  for (double r : e.radii)
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("samples.radii must lie in (0,1)");
  e.rho_max = c.get_num("samples.rho_max", 1.0);
  e.step = c.get_num("samples.step", 0.1);
  e.witness_k = c.get_rat_list("witness.k", e.witness_k);
  for (const auto& k : e.witness_k)
    if (k <= 0) throw ConfigError("witness.k entries must be positive");
  e.witness_tau = c.get_num("witness.tau", -1.0);
  e.witness_chi = c.get_str("witness.chi", "quintic");
  if (e.witness_chi != "quintic")
    throw ConfigError("witness.chi: only the quintic cutoff is provided");
  e.moser_k0 = c.get_num("moser.k0", 1e-3);
  e.moser_chi = c.get_num("moser.chi", -1.0);
  e.harmonic_degree = static_cast<int>(c.get_int("harmonic.degree", 8));
  e.harmonic_degree_ref = static_cast<int>(c.get_int("harmonic.degree_ref", 10));
  e.decay_distances = c.get_list("decay.distances", e.decay_distances);
  e.decay_origin = c.get_list("decay.origin", {});
  if (!e.decay_origin.empty() && static_cast<int>(e.decay_origin.size()) != e.n + 1)
    throw ConfigError("decay.origin needs n+1 coordinates");
  e.cond_cap = c.get_num("kernel.cond_cap", 1e12);
  e.tol_repro = c.get_num("kernel.tol_repro", 1e-8);
  e.tol_disc = c.get_num("tol.disc", 0.1);
  e.output_dir = c.get_str("output.dir", "out");
  return e;
}

}  // namespace cliffock
