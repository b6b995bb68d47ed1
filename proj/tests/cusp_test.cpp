#include <catch2/catch_amalgamated.hpp>

#include "alphalab/cusp.hpp"
#include "alphalab/rng.hpp"

#include <vector>

using alphalab::BigInt;
using alphalab::binomial;
using alphalab::CounterRng;
using alphalab::Rational;
using alphalab::series::BivariateSeries;
using namespace alphalab::cusp;

namespace {

// Independent closed-form oracle for the chart: coordinate k of the orbit map
// germ is binom(11,k) a^k + binom(11,k-1) a^{k-1} b, homogeneous of degree k.
BivariateSeries chart_coordinate_oracle(int order, int k) {
  BivariateSeries s(order, "alpha", "beta");
  if (k <= order) {
    s.set_coeff(k, 0, Rational(binomial(11, k)));
    s.set_coeff(k - 1, 1, Rational(binomial(11, k - 1)));
  }
  return s;
}

Chart control_chart(int order, int pow2, int pow3) {
  // Hand-built chart in (u, alpha): coordinates (u, alpha^pow2, alpha^pow3).
  Chart c;
  c.coords.push_back(BivariateSeries::variable(order, "u", "alpha", 0));
  BivariateSeries a(order, "u", "alpha");
  a.set_coeff(0, pow2, Rational(1));
  BivariateSeries b(order, "u", "alpha");
  b.set_coeff(0, pow3, Rational(1));
  c.coords.push_back(a);
  c.coords.push_back(b);
  return c;
}

}  // namespace

TEST_CASE("chart coordinates match the binomial oracle exactly") {
  const int order = 6;
  const Chart chart = mu_local_chart(order);
  REQUIRE(chart.coords.size() == 12);
  for (int k = 1; k <= 12; ++k) {
    INFO("coordinate " << k);
    CHECK(chart.coords[static_cast<std::size_t>(k - 1)] == chart_coordinate_oracle(order, k));
  }
  // First coordinate 11a + b; second has pure-alpha^2 coefficient 55.
  CHECK(chart.coords[0].coeff(1, 0) == 11);
  CHECK(chart.coords[0].coeff(0, 1) == 1);
  CHECK(chart.coords[1].coeff(2, 0) == 55);
  // Centered at the origin: every coordinate vanishes at (0,0).
  for (const auto& s : chart.coords) CHECK(s.coeff(0, 0) == 0);
}

TEST_CASE("truncation below 3 is rejected") {
  CHECK_THROWS_AS(mu_local_chart(2), std::invalid_argument);
}

TEST_CASE("diagonal slice lands on the rational normal curve") {
  const int order = 6;
  const Chart chart = mu_local_chart(order);
  // beta = alpha turns coordinate k into binom(12,k) alpha^k (Pascal).
  const auto a1 = BivariateSeries::variable(order, "alpha", "beta", 0);
  const auto a2 = BivariateSeries::variable(order, "alpha", "beta", 1);
  for (int k = 1; k <= 12; ++k) {
    const auto diag = chart.coords[static_cast<std::size_t>(k - 1)].substituted(a1, a1);
    BivariateSeries expect(order, "alpha", "beta");
    if (k <= order) expect.set_coeff(k, 0, Rational(binomial(12, k)));
    CHECK(diag == expect);
    (void)a2;
  }
}

TEST_CASE("u-substitution reproduces the eliminated chart") {
  const int order = 6;
  const Chart chart_u = substitute_u(mu_local_chart(order));
  REQUIRE(chart_u.coords.size() == 12);
  // First output coordinate is exactly u.
  CHECK(chart_u.coords[0] == BivariateSeries::variable(order, "u", "alpha", 0));
  // Second: (c2 - c1^2) a^2 + c1 a u = -66 a^2 + 11 a u, exactly.
  BivariateSeries y2(order, "u", "alpha");
  y2.set_coeff(0, 2, Rational(-66));
  y2.set_coeff(1, 1, Rational(11));
  CHECK(chart_u.coords[1] == y2);
  // Third: (c3 - c1 c2) a^3 + c2 a^2 u = -440 a^3 + 55 a^2 u, exactly.
  BivariateSeries y3(order, "u", "alpha");
  y3.set_coeff(0, 3, Rational(-440));
  y3.set_coeff(1, 2, Rational(55));
  CHECK(chart_u.coords[2] == y3);
}

TEST_CASE("slice orders and leads") {
  const SliceCurve slice = slice_orders(substitute_u(mu_local_chart(6)));
  CHECK(slice.order2 == 2);
  CHECK(slice.order3 == 3);
  CHECK(slice.lead2 == Rational(-66));
  CHECK(slice.lead3 == Rational(-440));
}

TEST_CASE("slice orders are invariant under ambient changes fixing u") {
  const int order = 6;
  const Chart chart_u = substitute_u(mu_local_chart(order));
  CounterRng rng(97, 12);
  for (int trial = 0; trial < 10; ++trial) {
    // Random unimodular integer change of coordinates 2..12 (shear products),
    // possibly feeding u into them; coordinate 1 stays u.
    std::vector<std::vector<long long>> m(12, std::vector<long long>(12, 0));
    for (int i = 0; i < 12; ++i) m[i][i] = 1;
    for (int step = 0; step < 40; ++step) {
      const int r = 1 + static_cast<int>(rng.next_u64() % 11);
      int c = static_cast<int>(rng.next_u64() % 12);
      if (c == r) c = (c + 1) % 12 == r ? (c + 2) % 12 : (c + 1) % 12;
      const long long k = static_cast<long long>(rng.next_u64() % 4) - 2;
      if (k == 0) continue;
      for (int j = 0; j < 12; ++j) m[r][j] += k * m[c][j];
    }
    Chart mixed;
    for (int i = 0; i < 12; ++i) {
      BivariateSeries s(order, "u", "alpha");
      for (int j = 0; j < 12; ++j)
        if (m[i][j] != 0) s += Rational(m[i][j]) * chart_u.coords[static_cast<std::size_t>(j)];
      mixed.coords.push_back(s);
    }
    const SliceCurve slice = slice_orders(mixed);
    CHECK(slice.order2 == 2);
    CHECK(slice.order3 == 3);
  }
}

TEST_CASE("truncation consistency between orders") {
  const Chart c6 = mu_local_chart(6);
  const Chart c8 = mu_local_chart(8);
  for (std::size_t k = 0; k < 12; ++k) CHECK(c8.coords[k].truncated(6) == c6.coords[k]);
}

TEST_CASE("cusp certificate passes on the orbit chart") {
  const CuspCertificate cert = cusp_normal_form_check(slice_orders(substitute_u(mu_local_chart(6))));
  CHECK(cert.pass);
  CHECK(cert.orders[0] == 2);
  CHECK(cert.orders[1] == 3);
  CHECK(cert.lead2 == Rational(-66));
  CHECK(cert.lead3 == Rational(-440));
  CHECK(cert.residual_order >= 7);

  // Minimal viable truncation still certifies.
  const CuspCertificate c3 = cusp_normal_form_check(slice_orders(substitute_u(mu_local_chart(3))));
  CHECK(c3.pass);
  // Higher truncation: identical orders and leads.
  const CuspCertificate c10 =
      cusp_normal_form_check(slice_orders(substitute_u(mu_local_chart(10))));
  CHECK(c10.pass);
  CHECK(c10.orders == cert.orders);
  CHECK(c10.lead2 == cert.lead2);
  CHECK(c10.lead3 == cert.lead3);
}

TEST_CASE("smooth and tacnode controls fail") {
  // Smooth curve (alpha, alpha^2): orders (1,2).
  const auto smooth = slice_orders(control_chart(6, 1, 2));
  CHECK(smooth.order2 == 1);
  CHECK(smooth.order3 == 2);
  CHECK_FALSE(cusp_normal_form_check(smooth).pass);
  // Tacnode-style curve (alpha^2, alpha^4): orders (2,4).
  const auto tac = slice_orders(control_chart(6, 2, 4));
  CHECK(tac.order2 == 2);
  CHECK(tac.order3 == 4);
  CHECK_FALSE(cusp_normal_form_check(tac).pass);
}

TEST_CASE("degenerate slices are reported") {
  Chart c;
  c.coords.push_back(BivariateSeries::variable(4, "u", "alpha", 0));
  c.coords.push_back(BivariateSeries(4, "u", "alpha"));
  c.coords.push_back(BivariateSeries(4, "u", "alpha"));
  CHECK_THROWS_AS(slice_orders(c), std::domain_error);
}

TEST_CASE("certificate serializes with exact leads") {
  const auto j = to_json(cusp_normal_form_check(slice_orders(substitute_u(mu_local_chart(6)))));
  CHECK(j["orders"][0] == 2);
  CHECK(j["orders"][1] == 3);
  CHECK(j["pass"] == true);
  CHECK(j["lead2_exact"] == "-66");
  CHECK(j["lead3_exact"] == "-440");
}
