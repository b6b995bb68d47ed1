#include <catch2/catch_amalgamated.hpp>

#include "alphalab/green.hpp"

#include <cmath>
#include <numbers>

using namespace alphalab;
using namespace alphalab::green;

namespace {
constexpr std::uint64_t kSeed = 1729;
const double kPi = std::numbers::pi;

TorusField cosine_field(int m, int k1, int k2, double amplitude, double shift = 0) {
  TorusField f(m);
  const double h = 2.0 * kPi / m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) f.at(i, j) = amplitude * std::cos(k1 * h * i + k2 * h * j) + shift;
  return f;
}

}  // namespace

TEST_CASE("poisson solve on an eigenfunction") {
  const int m = 64;
  const TorusField source = cosine_field(m, 1, 0, -1.0);  // -cos x1
  const TorusField u = green_apply(source);
  const TorusField expect = cosine_field(m, 1, 0, 1.0);  // cos x1
  double worst = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(u.at(i, j) - expect.at(i, j)));
  CHECK(worst < 1e-12);

  const TorusField zero(m);
  const TorusField uz = green_apply(zero);
  CHECK(uz.max() == 0.0);
  CHECK(uz.min() == 0.0);
}

TEST_CASE("nonzero-mean sources are rejected") {
  const int m = 32;
  const TorusField bad = cosine_field(m, 1, 1, 1.0, /*shift=*/0.5);
  CHECK_THROWS_AS(green_apply(bad), std::invalid_argument);
}

TEST_CASE("green identity reconstructs band-limited fields") {
  const int m = 64;
  CounterRng rng(kSeed, 1);
  const GreenKernel kernel(m);
  for (int t = 0; t < 5; ++t) {
    const TorusField f = random_band_limited(m, 5, rng);
    const TorusField lap = laplacian(f);
    // f(x) = -K * Lap f + mean(f); here mean(f) = 0.
    double worst = 0;
    for (int i = 0; i < m; i += 7)
      for (int j = 0; j < m; j += 7) {
        const double rebuilt = -kernel.convolve_at(i, j, lap) + f.mean();
        worst = std::max(worst, std::abs(rebuilt - f.at(i, j)));
      }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("kernel symmetry and nonnegativity") {
  const int m = 48;
  const GreenKernel kernel(m);
  double min_value = 1e300;
  double asym = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      min_value = std::min(min_value, kernel.at(i, j));
      asym = std::max(asym, std::abs(kernel.at(i, j) - kernel.at(-i, -j)));
    }
  CHECK(min_value >= 0.0);
  CHECK(min_value < 1e-12);  // the shift is tight
  CHECK(asym < 1e-12);
}

TEST_CASE("spectral and stencil Laplacians agree at second order") {
  CounterRng rng(kSeed, 2);
  double err_64 = 0, err_128 = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const int m = pass == 0 ? 64 : 128;
    CounterRng local(kSeed, 3);
    const TorusField f = random_band_limited(m, 3, local);
    const TorusField a = laplacian(f);
    const TorusField b = laplacian_stencil(f);
    double worst = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(a.at(i, j) - b.at(i, j)));
    (pass == 0 ? err_64 : err_128) = worst;
  }
  CHECK(err_128 < 0.35 * err_64);  // order two means a factor of about 4
}

TEST_CASE("lemma constant scales linearly and converges in the grid") {
  const GreenKernel k128(128);
  CHECK(lemma1_constant(k128, 0.0) == 0.0);
  const double m1 = lemma1_constant(k128, 3.0);
  const double m2 = lemma1_constant(k128, 6.0);
  CHECK(m2 == Catch::Approx(2.0 * m1));
  CHECK_THROWS_AS(lemma1_constant(k128, -1.0), std::invalid_argument);

  const GreenKernel k256(256);
  const double c6_128 = lemma1_constant(k128, 6.0);
  const double c6_256 = lemma1_constant(k256, 6.0);
  CHECK(std::abs(c6_128 - c6_256) / c6_256 < 0.01);
}

TEST_CASE("lower bound on the explicit cosine field") {
  const int m = 128;
  const double c = 6.0;
  const GreenKernel kernel(m);
  // phi = (c/2)(cos x1 - 1): max 0, Lap = -(c/2) cos x1 >= -c.
  TorusField phi = cosine_field(m, 1, 0, c / 2.0, -c / 2.0);
  const auto rep = check_lower_bound(phi, c, kernel);
  CHECK(rep.precondition_ok);
  CHECK(rep.holds);
  // integral phi = -(c/2) V exactly.
  CHECK(rep.integral == Catch::Approx(-(c / 2.0) * kTorusVolume).epsilon(1e-10));
  CHECK(rep.margin >= 0.0);
}

TEST_CASE("trivial field saturates nothing: margin equals M") {
  const int m = 64;
  const GreenKernel kernel(m);
  const TorusField zero(m);
  const auto rep = check_lower_bound(zero, 6.0, kernel);
  CHECK(rep.precondition_ok);
  CHECK(rep.holds);
  CHECK(rep.margin == Catch::Approx(rep.bound_constant));
}

TEST_CASE("random admissible fields satisfy the bound and the chain identity") {
  const int m = 64;
  const double c = 6.0;
  const GreenKernel kernel(m);
  CounterRng rng(kSeed, 4);
  for (int t = 0; t < 25; ++t) {
    const TorusField phi = random_admissible_field(m, c, 5, rng);
    const auto rep = check_lower_bound(phi, c, kernel);
    REQUIRE(rep.precondition_ok);
    CHECK(rep.holds);
    CHECK(rep.margin >= 0.0);
  }
}

TEST_CASE("hypothesis violations are reported as precondition failures") {
  const int m = 64;
  const GreenKernel kernel(m);
  // max phi != 0.
  const TorusField shifted = cosine_field(m, 1, 0, 1.0, 5.0);
  const auto rep1 = check_lower_bound(shifted, 6.0, kernel);
  CHECK_FALSE(rep1.precondition_ok);
  CHECK_FALSE(rep1.max_zero_ok);
  CHECK_FALSE(rep1.holds);
  // Laplacian dips below -c.
  TorusField steep = cosine_field(m, 3, 0, 2.0, -2.0);  // Lap = -18 cos(3x)
  const auto rep2 = check_lower_bound(steep, 6.0, kernel);
  CHECK_FALSE(rep2.laplacian_ok);
  CHECK_FALSE(rep2.precondition_ok);
}

TEST_CASE("bound report serializes") {
  const int m = 32;
  const GreenKernel kernel(m);
  const auto j = to_json(check_lower_bound(TorusField(m), 6.0, kernel));
  CHECK(j["check"] == "torus_lower_bound");
  CHECK(j["holds"] == true);
  CHECK(j.contains("margin"));
  CHECK(j.contains("chain_gap"));
}
