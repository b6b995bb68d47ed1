#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <string>

namespace alphalab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Exact binomial coefficient; zero outside 0 <= k <= n.
inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt out = 1;
  for (int i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;  // divides exactly at every step
  }
  return out;
}

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

inline std::string to_string(const Rational& q) {
  if (is_integer(q)) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace alphalab
