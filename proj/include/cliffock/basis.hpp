#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "polyfield.hpp"

namespace cliffock {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

// Row-reduce in place over the rationals (first-nonzero pivoting; exact, so
// no magnitude concerns). Returns the rank, pivot columns in `pivots`.
inline int rref(RatMat& m, std::vector<int>& pivots) {
  pivots.clear();
  if (m.empty()) return 0;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pr = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    std::swap(m[r], m[pr]);
    const Rational inv = Rational(1) / m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return r;
}

// Reduced-echelon nullspace: one vector per free column, unit entry at the
// free column and the negated reduced coefficients at the pivot columns.
inline std::vector<RatVec> nullspace(RatMat m, int cols) {
  std::vector<int> pivots;
  rref(m, pivots);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<RatVec> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RatVec v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline int matrix_rank(RatMat m) {
  std::vector<int> pivots;
  return rref(m, pivots);
}

enum class BasisKind { monogenic, harmonic };

// Homogeneous elements with exact rational coefficients, one grade per
// element. Monogenic elements are A_n-valued, harmonic ones scalar-valued.
struct GradedBasis {
  int vars = 0;
  int alg = 0;
  BasisKind kind = BasisKind::monogenic;
  std::vector<PolyField<Rational>> elements;
  std::vector<int> grades;

  std::size_t size() const { return elements.size(); }
};

namespace detail {

inline std::map<MultiIndex, int, GradedLexLess> index_of(const std::vector<MultiIndex>& ms) {
  std::map<MultiIndex, int, GradedLexLess> out;
  for (std::size_t i = 0; i < ms.size(); ++i) out.emplace(ms[i], static_cast<int>(i));
  return out;
}

}  // namespace detail

// Matrix of D on degree-k coefficient vectors. Columns are indexed by
// (monomial, blade) with the monomial in graded-lex order and the blade as
// the fast index; rows the same over degree k-1.
inline RatMat dirac_matrix(int n, unsigned k) {
  const int vars = n + 1;
  const BladeIndex nb = BladeIndex{1} << n;
  const auto mono_k = monomials_of_degree(vars, k);
  if (k == 0) return RatMat{};
  const auto mono_lo = monomials_of_degree(vars, k - 1);
  const auto row_of = detail::index_of(mono_lo);
  RatMat m(mono_lo.size() * nb, RatVec(mono_k.size() * nb, Rational(0)));
  for (std::size_t mi = 0; mi < mono_k.size(); ++mi) {
    for (int j = 0; j < vars; ++j) {
      if (mono_k[mi][j] == 0) continue;
      MultiIndex d = mono_k[mi];
      d[j] -= 1;
      const int ri = row_of.at(d);
      const BladeIndex gen = j == 0 ? 0 : (BladeIndex{1} << (j - 1));
      for (BladeIndex b = 0; b < nb; ++b) {
        const int s = blade_sign(gen, b);
        m[ri * nb + (gen ^ b)][mi * nb + b] += Rational(s * static_cast<int>(mono_k[mi][j]));
      }
    }
  }
  return m;
}

// Matrix of the Laplacian on scalar degree-k coefficient vectors (rows over
// degree k-2).
inline RatMat laplacian_matrix(int n, unsigned k) {
  const int vars = n + 1;
  const auto mono_k = monomials_of_degree(vars, k);
  if (k < 2) return RatMat{};
  const auto mono_lo = monomials_of_degree(vars, k - 2);
  const auto row_of = detail::index_of(mono_lo);
  RatMat m(mono_lo.size(), RatVec(mono_k.size(), Rational(0)));
  for (std::size_t mi = 0; mi < mono_k.size(); ++mi) {
    for (int j = 0; j < vars; ++j) {
      if (mono_k[mi][j] < 2) continue;
      MultiIndex d = mono_k[mi];
      d[j] -= 2;
      const int c = static_cast<int>(mono_k[mi][j]);
      m[row_of.at(d)][mi] += Rational(c * (c - 1));
    }
  }
  return m;
}

namespace detail {

inline PolyField<Rational> poly_from_coeffs(int vars, int alg, const std::vector<MultiIndex>& monos,
                                            const RatVec& v) {
  const BladeIndex nb = BladeIndex{1} << alg;
  PolyField<Rational> p(vars, alg);
  for (std::size_t mi = 0; mi < monos.size(); ++mi) {
    Multivector<Rational> c(alg);
    bool nonzero = false;
    for (BladeIndex b = 0; b < nb; ++b) {
      c[b] = v[mi * nb + b];
      nonzero = nonzero || c[b] != 0;
    }
    if (nonzero) p.add_term(monos[mi], c);
  }
  return p;
}

}  // namespace detail

// Exact basis of {P homogeneous of degree k, values in A_n : DP = 0} for
// each k <= max_degree, as the reduced-echelon nullspace of dirac_matrix.
inline GradedBasis monogenic_basis(int n, int max_degree) {
  if (n < 1) throw std::invalid_argument("monogenic basis needs n >= 1");
  if (max_degree < 0) throw std::invalid_argument("negative degree");
  GradedBasis out;
  out.vars = n + 1;
  out.alg = n;
  out.kind = BasisKind::monogenic;
  const BladeIndex nb = BladeIndex{1} << n;
  for (unsigned k = 0; k <= static_cast<unsigned>(max_degree); ++k) {
    const auto monos = monomials_of_degree(n + 1, k);
    std::vector<RatVec> null;
    if (k == 0) {
      for (BladeIndex b = 0; b < nb; ++b) {
        RatVec v(nb, Rational(0));
        v[b] = 1;
        null.push_back(std::move(v));
      }
    } else {
      null = nullspace(dirac_matrix(n, k), static_cast<int>(monos.size() * nb));
    }
    for (const auto& v : null) {
      out.elements.push_back(detail::poly_from_coeffs(n + 1, n, monos, v));
      out.grades.push_back(static_cast<int>(k));
    }
  }
  return out;
}

// Scalar-valued harmonic analogue (nullspace of the Laplacian per degree).
inline GradedBasis harmonic_basis(int n, int max_degree) {
  if (n < 1) throw std::invalid_argument("harmonic basis needs n >= 1");
  if (max_degree < 0) throw std::invalid_argument("negative degree");
  GradedBasis out;
  out.vars = n + 1;
  out.alg = 0;
  out.kind = BasisKind::harmonic;
  for (unsigned k = 0; k <= static_cast<unsigned>(max_degree); ++k) {
    const auto monos = monomials_of_degree(n + 1, k);
    std::vector<RatVec> null;
    if (k < 2) {
      for (std::size_t i = 0; i < monos.size(); ++i) {
        RatVec v(monos.size(), Rational(0));
        v[i] = 1;
        null.push_back(std::move(v));
      }
    } else {
      null = nullspace(laplacian_matrix(n, k), static_cast<int>(monos.size()));
    }
    for (const auto& v : null) {
      out.elements.push_back(detail::poly_from_coeffs(n + 1, 0, monos, v));
      out.grades.push_back(static_cast<int>(k));
    }
  }
  return out;
}

// Flat coefficient vector of a homogeneous element in the degree-k layout
// used by the matrices above.
inline RatVec coeff_vector(const PolyField<Rational>& p, const std::vector<MultiIndex>& monos) {
  const BladeIndex nb = BladeIndex{1} << p.algebra_dim();
  const auto idx = detail::index_of(monos);
  RatVec v(monos.size() * nb, Rational(0));
  for (const auto& [m, c] : p.terms()) {
    const int mi = idx.at(m);
    for (BladeIndex b = 0; b < nb; ++b) v[mi * nb + b] = c[b];
  }
  return v;
}

inline void dump_basis(const GradedBasis& b, std::ostream& os) {
  for (const auto& e : b.elements) os << dump_poly(e) << "\n";
}

}  // namespace cliffock
