#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cliffock {

// Blade masks encode subsets of {1,...,n}: bit j-1 set <=> generator e_j
// present. Mask 0 is the unit e_0 = 1.
using BladeIndex = std::uint32_t;

inline constexpr int kMaxAlgebraDim = 12;

inline int blade_grade(BladeIndex mask) { return std::popcount(mask); }

// Sign of e_A * e_B under e_j e_k = -e_k e_j (j != k), e_j^2 = -1.
// Transpositions to interleave the ascending index lists, then one factor
// -1 per repeated generator.
inline int blade_sign(BladeIndex a, BladeIndex b) {
  int swaps = 0;
  BladeIndex t = a;
  while (t != 0) {
    t >>= 1;
    swaps += std::popcount(t & b);
  }
  swaps += std::popcount(a & b);  // e_j^2 = -1
  return (swaps & 1) ? -1 : 1;
}

// Conjugation sign (-1)^{|A|(|A|+1)/2}: pattern + - - + with period 4.
inline int conjugation_sign(BladeIndex mask) {
  switch (blade_grade(mask) & 3) {
    case 0:
    case 3:
      return 1;
    default:
      return -1;
  }
}

// "1" for the empty blade, otherwise e<indices> with indices ascending.
inline std::string blade_label(BladeIndex mask) {
  if (mask == 0) return "1";
  std::string s = "e";
  for (int j = 1; j <= kMaxAlgebraDim; ++j)
    if (mask & (BladeIndex{1} << (j - 1))) s += std::to_string(j);
  return s;
}

// Element of the real Clifford algebra A_n, dense over the 2^n blades.
// T is the coefficient scalar: exact rationals in the symbolic layers,
// double in the numeric layers.
template <typename T>
class Multivector {
 public:
  explicit Multivector(int n) : n_(check_dim(n)), c_(std::size_t{1} << n, T(0)) {}

  static Multivector scalar(int n, const T& v) {
    Multivector x(n);
    x.c_[0] = v;
    return x;
  }

  static Multivector blade(int n, BladeIndex mask, const T& v = T(1)) {
    Multivector x(n);
    if (mask >= x.c_.size()) throw std::invalid_argument("blade mask out of range");
    x.c_[mask] = v;
    return x;
  }

  int algebra_dim() const { return n_; }
  std::size_t size() const { return c_.size(); }

  const T& operator[](BladeIndex mask) const { return c_[mask]; }
  T& operator[](BladeIndex mask) { return c_[mask]; }

  bool is_zero() const {
    for (const T& v : c_)
      if (v != T(0)) return false;
    return true;
  }

  // Nonzero coefficients only at e_0,...,e_n.
  bool is_paravector() const {
    for (BladeIndex m = 0; m < c_.size(); ++m)
      if (blade_grade(m) > 1 && c_[m] != T(0)) return false;
    return true;
  }

  Multivector& operator+=(const Multivector& o) {
    require_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    require_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Multivector& operator*=(const T& s) {
    for (T& v : c_) v *= s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(Multivector a, const T& s) { return a *= s; }
  friend Multivector operator*(const T& s, Multivector a) { return a *= s; }
  friend Multivector operator-(Multivector a) {
    for (T& v : a.c_) v = -v;
    return a;
  }

  friend bool operator==(const Multivector& a, const Multivector& b) {
    return a.n_ == b.n_ && a.c_ == b.c_;
  }

  void require_same(const Multivector& o) const {
    if (n_ != o.n_) throw std::invalid_argument("multivector dimension mismatch");
  }

 private:
  static int check_dim(int n) {
    if (n < 0 || n > kMaxAlgebraDim) throw std::invalid_argument("algebra dimension out of range");
    return n;
  }

  int n_;
  std::vector<T> c_;
};

template <typename T>
Multivector<T> geometric_product(const Multivector<T>& a, const Multivector<T>& b) {
  a.require_same(b);
  Multivector<T> out(a.algebra_dim());
  const BladeIndex dim = static_cast<BladeIndex>(a.size());
  for (BladeIndex i = 0; i < dim; ++i) {
    if (a[i] == T(0)) continue;
    for (BladeIndex j = 0; j < dim; ++j) {
      if (b[j] == T(0)) continue;
      const int s = blade_sign(i, j);
      if (s > 0)
        out[i ^ j] += a[i] * b[j];
      else
        out[i ^ j] -= a[i] * b[j];
    }
  }
  return out;
}

template <typename T>
Multivector<T> operator*(const Multivector<T>& a, const Multivector<T>& b) {
  return geometric_product(a, b);
}

template <typename T>
Multivector<T> conjugate(const Multivector<T>& a) {
  Multivector<T> out = a;
  for (BladeIndex m = 0; m < out.size(); ++m)
    if (conjugation_sign(m) < 0) out[m] = -out[m];
  return out;
}

template <typename T>
T inner_product_0(const Multivector<T>& x, const Multivector<T>& y) {
  x.require_same(y);
  T s(0);
  for (BladeIndex m = 0; m < x.size(); ++m) s += x[m] * y[m];
  return s;
}

template <typename T>
T scalar_part(const Multivector<T>& x) {
  return x[0];
}

template <typename T>
T component(const Multivector<T>& x, BladeIndex mask) {
  if (mask >= x.size()) throw std::invalid_argument("blade mask out of range");
  return x[mask];
}

template <typename T>
T norm_sq(const Multivector<T>& x) {
  return inner_product_0(x, x);
}

inline double norm(const Multivector<double>& x) { return std::sqrt(norm_sq(x)); }

// "x0 + x1*e1 + x12*e12" with blades in ascending mask order.
template <typename T>
std::string to_string(const Multivector<T>& x) {
  std::ostringstream os;
  bool first = true;
  for (BladeIndex m = 0; m < x.size(); ++m) {
    if (x[m] == T(0)) continue;
    T v = x[m];
    if (first) {
      if (v < T(0)) {
        os << "-";
        v = -v;
      }
      first = false;
    } else {
      if (v < T(0)) {
        os << " - ";
        v = -v;
      } else {
        os << " + ";
      }
    }
    os << v;
    if (m != 0) os << "*" << blade_label(m);
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace cliffock
