#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alphalab/rational.hpp"

namespace alphalab::series {

// Truncated power series in two variables with exact rational coefficients.
//
// Every operation drops terms of total degree above the truncation order, so
// each stored coefficient of a sum, product or composite is the exact
// coefficient of the untruncated result. Composition requires images with
// zero constant term; otherwise truncation would not commute with it.
class BivariateSeries {
 public:
  BivariateSeries(int order, std::string var1, std::string var2)
      : order_(order), vars_{std::move(var1), std::move(var2)} {
    if (order_ < 0) throw std::invalid_argument("series: negative truncation order");
    c_.assign(storage_size(order_), Rational(0));
  }

  static BivariateSeries constant(int order, const std::string& v1, const std::string& v2,
                                  const Rational& value) {
    BivariateSeries s(order, v1, v2);
    s.set_coeff(0, 0, value);
    return s;
  }

  // which = 0 selects var1, which = 1 selects var2.
  static BivariateSeries variable(int order, const std::string& v1, const std::string& v2,
                                  int which) {
    if (order < 1) throw std::invalid_argument("series: order too small for a variable");
    BivariateSeries s(order, v1, v2);
    if (which == 0)
      s.set_coeff(1, 0, Rational(1));
    else
      s.set_coeff(0, 1, Rational(1));
    return s;
  }

  int order() const { return order_; }
  const std::array<std::string, 2>& vars() const { return vars_; }

  const Rational& coeff(int i, int j) const {
    check_exponents(i, j);
    return c_[index(i, j)];
  }

  void set_coeff(int i, int j, Rational v) {
    check_exponents(i, j);
    c_[index(i, j)] = std::move(v);
  }

  bool is_zero() const {
    for (const auto& q : c_)
      if (q != 0) return false;
    return true;
  }

  // Minimal total degree of a nonzero term; order()+1 for the zero series.
  int valuation() const {
    for (int d = 0; d <= order_; ++d)
      for (int i = 0; i <= d; ++i)
        if (c_[index(i, d - i)] != 0) return d;
    return order_ + 1;
  }

  BivariateSeries truncated(int new_order) const {
    if (new_order > order_)
      throw std::invalid_argument("series: cannot extend the truncation order");
    BivariateSeries out(new_order, vars_[0], vars_[1]);
    for (int i = 0; i <= new_order; ++i)
      for (int j = 0; i + j <= new_order; ++j) out.set_coeff(i, j, coeff(i, j));
    return out;
  }

  BivariateSeries& operator+=(const BivariateSeries& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  BivariateSeries& operator-=(const BivariateSeries& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  friend BivariateSeries operator+(BivariateSeries a, const BivariateSeries& b) { return a += b; }
  friend BivariateSeries operator-(BivariateSeries a, const BivariateSeries& b) { return a -= b; }

  friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b) {
    a.check_compatible(b);
    BivariateSeries out(a.order_, a.vars_[0], a.vars_[1]);
    for (int i1 = 0; i1 <= a.order_; ++i1)
      for (int j1 = 0; i1 + j1 <= a.order_; ++j1) {
        const Rational& ca = a.c_[a.index(i1, j1)];
        if (ca == 0) continue;
        const int room = a.order_ - i1 - j1;
        for (int i2 = 0; i2 <= room; ++i2)
          for (int j2 = 0; i2 + j2 <= room; ++j2) {
            const Rational& cb = b.c_[b.index(i2, j2)];
            if (cb == 0) continue;
            out.c_[out.index(i1 + i2, j1 + j2)] += ca * cb;
          }
      }
    return out;
  }

  friend BivariateSeries operator*(const Rational& s, BivariateSeries a) {
    for (auto& q : a.c_) q *= s;
    return a;
  }

  BivariateSeries pow(int e) const {
    if (e < 0) throw std::invalid_argument("series: negative power");
    BivariateSeries out = constant(order_, vars_[0], vars_[1], Rational(1));
    for (int k = 0; k < e; ++k) out = out * (*this);
    return out;
  }

  // Substitutes var1 -> img1, var2 -> img2. Images must share variables and
  // order between themselves and have zero constant term.
  BivariateSeries substituted(const BivariateSeries& img1, const BivariateSeries& img2) const {
    img1.check_compatible(img2);
    if (img1.order_ != order_)
      throw std::invalid_argument("series: substitution images must match the truncation order");
    if (img1.coeff(0, 0) != 0 || img2.coeff(0, 0) != 0)
      throw std::invalid_argument("series: substitution image has a constant term");
    BivariateSeries out(order_, img1.vars_[0], img1.vars_[1]);
    BivariateSeries p1 = constant(order_, img1.vars_[0], img1.vars_[1], Rational(1));
    for (int i = 0; i <= order_; ++i) {
      BivariateSeries p12 = p1;
      for (int j = 0; i + j <= order_; ++j) {
        const Rational& q = coeff(i, j);
        if (q != 0) out += q * p12;
        if (i + j < order_) p12 = p12 * img2;
      }
      if (i < order_) p1 = p1 * img1;
    }
    return out;
  }

  // Sets var1 = 0; returns the coefficients of the univariate polynomial in
  // var2, ascending powers, length order()+1.
  std::vector<Rational> restrict_first_zero() const {
    std::vector<Rational> out(order_ + 1, Rational(0));
    for (int j = 0; j <= order_; ++j) out[j] = coeff(0, j);
    return out;
  }

  friend bool operator==(const BivariateSeries& a, const BivariateSeries& b) {
    return a.order_ == b.order_ && a.vars_ == b.vars_ && a.c_ == b.c_;
  }

 private:
  static std::size_t storage_size(int order) {
    return static_cast<std::size_t>(order + 1) * (order + 2) / 2;
  }
  std::size_t index(int i, int j) const {
    // Row-major over i with shrinking rows.
    return static_cast<std::size_t>(i) * (2 * order_ + 3 - i) / 2 + j;
  }
  void check_exponents(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_)
      throw std::out_of_range("series: exponent pair outside the truncation triangle");
  }
  void check_compatible(const BivariateSeries& o) const {
    if (order_ != o.order_ || vars_ != o.vars_)
      throw std::invalid_argument("series: mixed truncation orders or variable names");
  }

  int order_;
  std::array<std::string, 2> vars_;
  std::vector<Rational> c_;
};

}  // namespace alphalab::series
