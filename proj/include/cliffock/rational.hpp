#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cliffock {

// Exact scalar for the symbolic layers. Arbitrary precision so elimination
// and polynomial arithmetic never overflow.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

namespace detail {

// digits -> integer, immune to the octal interpretation of leading zeros
inline boost::multiprecision::cpp_int digits_to_int(const std::string& digits,
                                                    const std::string& original) {
  if (digits.empty()) throw std::invalid_argument("malformed rational literal: " + original);
  boost::multiprecision::cpp_int v(0);
  for (char c : digits) {
    if (c < '0' || c > '9') throw std::invalid_argument("malformed rational literal: " + original);
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace detail

// Parses an integer, fraction ("p/q") or plain decimal ("-0.25") into an
// exact rational; no exponent notation.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
    return num / den;
  }
  std::string s = text;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  const auto dot = s.find('.');
  std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
  const boost::multiprecision::cpp_int num = detail::digits_to_int(digits, text);
  boost::multiprecision::cpp_int den(1);
  if (dot != std::string::npos)
    for (std::size_t i = 0; i < s.size() - dot - 1; ++i) den *= 10;
  const Rational r(num, den);
  return neg ? -r : r;
}

inline std::string rational_string(const Rational& r) { return r.str(); }

}  // namespace cliffock
