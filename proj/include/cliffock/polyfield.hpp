#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "multivector.hpp"
#include "rational.hpp"

namespace cliffock {

// Exponent vector (k_0,...,k_n) of a monomial x_0^{k_0}...x_n^{k_n}.
using MultiIndex = std::vector<unsigned>;

inline unsigned multi_index_degree(const MultiIndex& m) {
  return std::accumulate(m.begin(), m.end(), 0u);
}

// Graded ordering: total degree first, then x_0-dominant lexicographic.
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    unsigned da = multi_index_degree(a), db = multi_index_degree(b);
    if (da != db) return da < db;
    return a > b;  // larger leading exponents come first within a degree
  }
};

// Monomials of total degree k in `vars` variables, in GradedLexLess order.
inline std::vector<MultiIndex> monomials_of_degree(int vars, unsigned k) {
  std::vector<MultiIndex> out;
  MultiIndex m(vars, 0);
  // enumerate recursively, first slot takes the largest share first
  auto rec = [&](auto&& self, int pos, unsigned rest) -> void {
    if (pos == vars - 1) {
      m[pos] = rest;
      out.push_back(m);
      return;
    }
    for (int take = static_cast<int>(rest); take >= 0; --take) {
      m[pos] = static_cast<unsigned>(take);
      self(self, pos + 1, rest - take);
    }
  };
  rec(rec, 0, k);
  return out;
}

// Polynomial map R^{vars} -> A_alg with coefficients of scalar type T.
// Zero coefficients are never stored.
template <typename T>
class PolyField {
 public:
  PolyField(int vars, int alg) : vars_(vars), alg_(alg) {
    if (vars < 1) throw std::invalid_argument("polynomial needs at least one variable");
  }

  static PolyField constant(int vars, const Multivector<T>& c) {
    PolyField p(vars, c.algebra_dim());
    p.add_term(MultiIndex(vars, 0), c);
    return p;
  }

  // The coordinate function x_j (scalar-valued).
  static PolyField coordinate(int vars, int alg, int j) {
    PolyField p(vars, alg);
    MultiIndex m(vars, 0);
    m.at(j) = 1;
    p.add_term(m, Multivector<T>::scalar(alg, T(1)));
    return p;
  }

  int vars() const { return vars_; }
  int algebra_dim() const { return alg_; }
  const std::map<MultiIndex, Multivector<T>, GradedLexLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, multi_index_degree(m));
    return d;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    unsigned d = multi_index_degree(terms_.begin()->first);
    for (const auto& [m, c] : terms_)
      if (multi_index_degree(m) != d) return false;
    return true;
  }

  void add_term(const MultiIndex& m, const Multivector<T>& c) {
    if (static_cast<int>(m.size()) != vars_) throw std::invalid_argument("multi-index arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  PolyField& operator+=(const PolyField& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  PolyField& operator-=(const PolyField& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  PolyField& operator*=(const T& s) {
    if (s == T(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend PolyField operator+(PolyField a, const PolyField& b) { return a += b; }
  friend PolyField operator-(PolyField a, const PolyField& b) { return a -= b; }
  friend PolyField operator*(PolyField a, const T& s) { return a *= s; }
  friend PolyField operator*(const T& s, PolyField a) { return a *= s; }

  friend bool operator==(const PolyField& a, const PolyField& b) {
    return a.vars_ == b.vars_ && a.alg_ == b.alg_ && a.terms_ == b.terms_;
  }

  PolyField left_mul(const Multivector<T>& c) const {
    PolyField out(vars_, alg_);
    for (const auto& [m, v] : terms_) out.add_term(m, geometric_product(c, v));
    return out;
  }

  PolyField right_mul(const Multivector<T>& c) const {
    PolyField out(vars_, alg_);
    for (const auto& [m, v] : terms_) out.add_term(m, geometric_product(v, c));
    return out;
  }

  PolyField derivative(int j) const {
    PolyField out(vars_, alg_);
    for (const auto& [m, v] : terms_) {
      if (m[j] == 0) continue;
      MultiIndex d = m;
      d[j] -= 1;
      out.add_term(d, v * T(static_cast<int>(m[j])));
    }
    return out;
  }

  Multivector<double> evaluate(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != vars_) throw std::invalid_argument("point arity mismatch");
    std::vector<std::vector<double>> pw = power_table(x, degree());
    Multivector<double> out(alg_);
    for (const auto& [m, v] : terms_) {
      double mono = 1.0;
      for (int j = 0; j < vars_; ++j) mono *= pw[j][m[j]];
      for (BladeIndex b = 0; b < v.size(); ++b) {
        if (v[b] == T(0)) continue;
        out[b] += to_double(v[b]) * mono;
      }
    }
    return out;
  }

  Multivector<T> evaluate_exact(const std::vector<T>& x) const {
    if (static_cast<int>(x.size()) != vars_) throw std::invalid_argument("point arity mismatch");
    Multivector<T> out(alg_);
    for (const auto& [m, v] : terms_) {
      T mono(1);
      for (int j = 0; j < vars_; ++j)
        for (unsigned p = 0; p < m[j]; ++p) mono *= x[j];
      out += v * mono;
    }
    return out;
  }

 private:
  static std::vector<std::vector<double>> power_table(const std::vector<double>& x, unsigned deg) {
    std::vector<std::vector<double>> pw(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      pw[j].resize(deg + 1);
      pw[j][0] = 1.0;
      for (unsigned p = 1; p <= deg; ++p) pw[j][p] = pw[j][p - 1] * x[j];
    }
    return pw;
  }

  void check_compatible(const PolyField& o) const {
    if (vars_ != o.vars_ || alg_ != o.alg_) throw std::invalid_argument("polynomial shape mismatch");
  }

  int vars_;
  int alg_;
  std::map<MultiIndex, Multivector<T>, GradedLexLess> terms_;
};

// Left Dirac action D P = sum_j e_j dP/dx_j. Needs the algebra to carry the
// generators e_1,...,e_{vars-1}; e_0 is the unit.
template <typename T>
PolyField<T> dirac_apply(const PolyField<T>& p) {
  if (p.algebra_dim() < p.vars() - 1)
    throw std::invalid_argument("algebra too small for the Dirac operator");
  PolyField<T> out(p.vars(), p.algebra_dim());
  for (int j = 0; j < p.vars(); ++j) {
    BladeIndex mask = j == 0 ? 0 : (BladeIndex{1} << (j - 1));
    out += p.derivative(j).left_mul(Multivector<T>::blade(p.algebra_dim(), mask));
  }
  return out;
}

// Conjugate Dirac: uses the conjugated generators, so the e_j (j >= 1) terms
// flip sign.
template <typename T>
PolyField<T> conj_dirac_apply(const PolyField<T>& p) {
  if (p.algebra_dim() < p.vars() - 1)
    throw std::invalid_argument("algebra too small for the Dirac operator");
  PolyField<T> out(p.vars(), p.algebra_dim());
  for (int j = 0; j < p.vars(); ++j) {
    BladeIndex mask = j == 0 ? 0 : (BladeIndex{1} << (j - 1));
    T sign = j == 0 ? T(1) : T(-1);
    out += p.derivative(j).left_mul(Multivector<T>::blade(p.algebra_dim(), mask, sign));
  }
  return out;
}

template <typename T>
PolyField<T> laplacian_apply(const PolyField<T>& p) {
  PolyField<T> out(p.vars(), p.algebra_dim());
  for (int j = 0; j < p.vars(); ++j) out += p.derivative(j).derivative(j);
  return out;
}

// Dump format: one line per element, "degree; multi-index:blade:rational, ...",
// multi-index rendered as dot-joined exponents.
inline std::string dump_poly(const PolyField<Rational>& p) {
  std::ostringstream os;
  os << p.degree() << ";";
  bool first = true;
  for (const auto& [m, v] : p.terms()) {
    for (BladeIndex b = 0; b < v.size(); ++b) {
      if (v[b] == Rational(0)) continue;
      os << (first ? " " : ", ");
      first = false;
      for (std::size_t j = 0; j < m.size(); ++j) os << (j ? "." : "") << m[j];
      os << ":" << b << ":" << rational_string(v[b]);
    }
  }
  return os.str();
}

}  // namespace cliffock
