#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "multivector.hpp"
#include "polyfield.hpp"
#include "quadrature.hpp"

namespace cliffock {

// C^3 radial profile: (1 - s^2)^4 for |s| < 1. Third derivative is bounded
// everywhere, so central differences keep their O(h^2) budget across the rim.
inline double bump_profile(double s) {
  const double t = 1.0 - s * s;
  return t > 0.0 ? t * t * t * t : 0.0;
}

// cos^2 profile, C^1 only; kept as an alternative test field.
inline double cos2_profile(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double c = std::cos(0.5 * std::acos(-1.0) * s);
  return c * c;
}

// Cutoff with value 1 on [0, 1/2] and a C^2 quintic descent to 0 at 1.
inline double cutoff_chi(double s) {
  s = std::abs(s);
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = 2.0 * s - 1.0;
  const double smoother = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
  return 1.0 - smoother;
}

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

inline ScalarFn radial_bump(const Eigen::VectorXd& center, double radius,
                            const std::function<double(double)>& profile = bump_profile) {
  return [=](const Eigen::VectorXd& x) { return profile((x - center).norm() / radius); };
}

// Flattened double-precision form of a rational polynomial field for tight
// sampling loops: one contiguous term list, no per-call allocation.
class CompiledField {
 public:
  explicit CompiledField(const PolyField<Rational>& p) : vars_(p.vars()), alg_(p.algebra_dim()) {
    for (const auto& [m, c] : p.terms())
      for (BladeIndex b = 0; b < c.size(); ++b) {
        if (c[b] == Rational(0)) continue;
        Term t;
        t.exp.assign(m.begin(), m.end());
        t.blade = b;
        t.coeff = to_double(c[b]);
        terms_.push_back(std::move(t));
      }
  }

  int algebra_dim() const { return alg_; }

  Multivector<double> operator()(const Eigen::VectorXd& x) const {
    Multivector<double> out(alg_);
    for (const auto& t : terms_) {
      double mono = t.coeff;
      for (int j = 0; j < vars_; ++j) {
        const double xj = x[j];
        for (unsigned p = 0; p < t.exp[j]; ++p) mono *= xj;
      }
      out[t.blade] += mono;
    }
    return out;
  }

 private:
  struct Term {
    std::vector<unsigned> exp;
    BladeIndex blade;
    double coeff;
  };
  int vars_;
  int alg_;
  std::vector<Term> terms_;
};

// bump(x) * P(x) as a field evaluator; the compact support short-circuits
// the polynomial work.
inline FieldFn bump_times_poly(const ScalarFn& bump, const PolyField<Rational>& p) {
  return [bump, cp = std::make_shared<CompiledField>(p)](const Eigen::VectorXd& x) {
    const double b = bump(x);
    if (b == 0.0) return Multivector<double>(cp->algebra_dim());
    Multivector<double> v = (*cp)(x);
    v *= b;
    return v;
  };
}

inline FieldFn poly_field_fn(const PolyField<Rational>& p) {
  return [cp = std::make_shared<CompiledField>(p)](const Eigen::VectorXd& x) { return (*cp)(x); };
}

}  // namespace cliffock
