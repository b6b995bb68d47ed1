#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alphalab/rational.hpp"
#include "alphalab/series.hpp"

namespace alphalab::cusp {

using series::BivariateSeries;

inline constexpr int kOrbitDegree = 12;

// The 12 affine coordinates of the orbit-map germ at the origin, as exact
// series in two local variables.
struct Chart {
  std::vector<BivariateSeries> coords;
};

namespace detail {

inline int uni_valuation(const std::vector<Rational>& v) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] != 0) return static_cast<int>(k);
  return static_cast<int>(v.size());  // truncation + 1 for the zero polynomial
}

inline bool uni_is_zero(const std::vector<Rational>& v) {
  return uni_valuation(v) == static_cast<int>(v.size());
}

inline std::vector<Rational> uni_scale(const Rational& s, std::vector<Rational> v) {
  for (auto& q : v) q *= s;
  return v;
}

inline std::vector<Rational> uni_sub(std::vector<Rational> a, const std::vector<Rational>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}

// Product truncated to the common length (same truncation order).
inline std::vector<Rational> uni_mul(const std::vector<Rational>& a,
                                     const std::vector<Rational>& b) {
  std::vector<Rational> out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < out.size() && j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace detail

// Local chart of the map (alpha, beta) -> coefficients of the degree-12 form
// with roots {alpha x 11, beta}. Coordinates carry the fixed diagonal sign
// normalization y_k = (-1)^k [z^{12-k}] (z-alpha)^11 (z-beta), i.e. they are
// the coefficients of (z+alpha)^11 (z+beta); with it the leading parts read
// y_1 = 11a + b, y_2 = 55a^2 + 11ab, y_3 = 165a^3 + 55a^2 b, and so on with
// all plus signs. Each y_k is homogeneous of degree k, so the truncation
// order only limits which coordinates are visible in full.
inline Chart mu_local_chart(int order) {
  if (order < 3)
    throw std::invalid_argument("mu_local_chart: truncation below 3 cannot see the cusp");
  const std::string va = "alpha", vb = "beta";
  const BivariateSeries a = BivariateSeries::variable(order, va, vb, 0);
  const BivariateSeries b = BivariateSeries::variable(order, va, vb, 1);
  // Coefficient vector of (z+alpha)^11 (z+beta) in z, ascending z-degree.
  std::vector<BivariateSeries> poly{BivariateSeries::constant(order, va, vb, Rational(1))};
  auto mul_linear = [&](const BivariateSeries& root) {
    // poly *= (z + root)
    std::vector<BivariateSeries> next(poly.size() + 1,
                                      BivariateSeries(order, va, vb));
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += poly[k] * root;
      next[k + 1] += poly[k];
    }
    poly = std::move(next);
  };
  for (int k = 0; k < kOrbitDegree - 1; ++k) mul_linear(a);
  mul_linear(b);
  // poly[j] multiplies z^j; y_k is the coefficient of z^{12-k}, k = 1..12.
  Chart chart;
  chart.coords.reserve(kOrbitDegree);
  for (int k = 1; k <= kOrbitDegree; ++k)
    chart.coords.push_back(poly[static_cast<std::size_t>(kOrbitDegree - k)]);
  return chart;
}

// Rewrites a chart in the variables (u, alpha) where u is the first chart
// coordinate; beta is eliminated through it. The first output coordinate is
// exactly u.
inline Chart substitute_u(const Chart& chart) {
  if (chart.coords.empty()) throw std::invalid_argument("substitute_u: empty chart");
  const BivariateSeries& first = chart.coords.front();
  const int order = first.order();
  // Invertibility at the truncation order: the first coordinate must be
  // linear with a unit-solvable beta coefficient. Cannot fail for the orbit
  // chart; checked defensively.
  const Rational a_coef = first.coeff(1, 0);
  const Rational b_coef = first.coeff(0, 1);
  if (b_coef == 0)
    throw std::domain_error("substitute_u: first coordinate does not involve beta linearly");
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j)
      if (i + j >= 2 && first.coeff(i, j) != 0)
        throw std::domain_error("substitute_u: first coordinate is not linear");

  const std::string vu = "u", va = "alpha";
  const BivariateSeries u = BivariateSeries::variable(order, vu, va, 0);
  const BivariateSeries alpha = BivariateSeries::variable(order, vu, va, 1);
  // beta = (u - a_coef * alpha) / b_coef
  const BivariateSeries beta_image =
      (Rational(1) / b_coef) * (u - a_coef * alpha);
  Chart out;
  out.coords.reserve(chart.coords.size());
  for (const auto& s : chart.coords) out.coords.push_back(s.substituted(alpha, beta_image));
  return out;
}

// Restriction of a (u, alpha) chart to the transverse slice u = 0, reduced to
// a leading-term echelon basis. The echelon orders are invariant under
// invertible linear changes of the ambient coordinates fixing the first one;
// on the canonical orbit chart they coincide with the orders of the first two
// nonvanishing coordinates.
struct SliceCurve {
  int order2 = 0, order3 = 0;        // alpha-adic orders of the two pivots
  Rational lead2, lead3;             // leading coefficients
  std::vector<Rational> series2, series3;  // full pivot series in alpha
  int truncation = 0;
};

inline SliceCurve slice_orders(const Chart& chart_u) {
  if (chart_u.coords.size() < 3) throw std::invalid_argument("slice_orders: chart too short");
  const int order = chart_u.coords.front().order();
  std::vector<std::vector<Rational>> pool;
  for (std::size_t k = 1; k < chart_u.coords.size(); ++k) {
    auto restricted = chart_u.coords[k].restrict_first_zero();
    if (!detail::uni_is_zero(restricted)) pool.push_back(std::move(restricted));
  }
  if (pool.size() < 2)
    throw std::domain_error("slice_orders: slice coordinates vanish to truncation order");

  auto take_pivot = [&pool]() {
    std::size_t best = 0;
    int best_val = detail::uni_valuation(pool[0]);
    for (std::size_t k = 1; k < pool.size(); ++k) {
      const int v = detail::uni_valuation(pool[k]);
      if (v < best_val) {
        best = k;
        best_val = v;
      }
    }
    std::vector<Rational> pivot = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    const Rational lead = pivot[static_cast<std::size_t>(best_val)];
    // Clear the pivot order from the remaining series.
    for (auto& s : pool) {
      const Rational c = s[static_cast<std::size_t>(best_val)];
      if (c != 0) s = detail::uni_sub(s, detail::uni_scale(c / lead, pivot));
    }
    pool.erase(std::remove_if(pool.begin(), pool.end(), detail::uni_is_zero), pool.end());
    return std::pair<int, std::vector<Rational>>(best_val, std::move(pivot));
  };

  SliceCurve out;
  out.truncation = order;
  auto [v2, s2] = take_pivot();
  if (pool.empty())
    throw std::domain_error("slice_orders: slice spans fewer than two independent series");
  auto [v3, s3] = take_pivot();
  out.order2 = v2;
  out.order3 = v3;
  out.lead2 = s2[static_cast<std::size_t>(v2)];
  out.lead3 = s3[static_cast<std::size_t>(v3)];
  out.series2 = std::move(s2);
  out.series3 = std::move(s3);
  return out;
}

// Certificate that the slice curve is the standard cusp: orders (2,3) and,
// after the monic rescalings X = series2/lead2, Y = series3/lead3, the
// relation X^3 - Y^2 = 0 holds through the truncation order. At truncation
// N = 6 a passing residual has order at least 7.
struct CuspCertificate {
  std::array<int, 2> orders{0, 0};
  Rational lead2, lead3;
  int residual_order = 0;
  bool pass = false;
  int truncation = 0;
};

inline CuspCertificate cusp_normal_form_check(const SliceCurve& slice) {
  CuspCertificate cert;
  cert.orders = {slice.order2, slice.order3};
  cert.lead2 = slice.lead2;
  cert.lead3 = slice.lead3;
  cert.truncation = slice.truncation;
  if (slice.lead2 == 0 || slice.lead3 == 0)
    throw std::domain_error("cusp_normal_form_check: vanishing leading coefficient");
  const auto x = detail::uni_scale(Rational(1) / slice.lead2, slice.series2);
  const auto y = detail::uni_scale(Rational(1) / slice.lead3, slice.series3);
  const auto x3 = detail::uni_mul(detail::uni_mul(x, x), x);
  const auto y2 = detail::uni_mul(y, y);
  const auto residual = detail::uni_sub(x3, y2);
  cert.residual_order = detail::uni_valuation(residual);  // truncation+1 when zero
  cert.pass = slice.order2 == 2 && slice.order3 == 3 &&
              cert.residual_order > cert.truncation;
  return cert;
}

inline nlohmann::ordered_json to_json(const CuspCertificate& cert) {
  nlohmann::ordered_json j;
  j["orders"] = {cert.orders[0], cert.orders[1]};
  j["lead2"] = is_integer(cert.lead2) ? nlohmann::ordered_json(to_double(cert.lead2))
                                      : nlohmann::ordered_json(to_string(cert.lead2));
  j["lead3"] = is_integer(cert.lead3) ? nlohmann::ordered_json(to_double(cert.lead3))
                                      : nlohmann::ordered_json(to_string(cert.lead3));
  j["residual_order"] = cert.residual_order;
  j["pass"] = cert.pass;
  j["truncation"] = cert.truncation;
  j["lead2_exact"] = to_string(cert.lead2);
  j["lead3_exact"] = to_string(cert.lead3);
  return j;
}

}  // namespace alphalab::cusp
