#include <catch2/catch_amalgamated.hpp>

#include "alphalab/forms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace alphalab;
using namespace alphalab::forms;

namespace {

// Greedy multiset match; returns the worst pairing distance.
double match_roots(std::vector<Complex> got, const std::vector<Complex>& expected) {
  REQUIRE(got.size() == expected.size());
  double worst = 0;
  for (const Complex& e : expected) {
    std::size_t best = 0;
    double dist = 1e300;
    for (std::size_t k = 0; k < got.size(); ++k) {
      const double d = std::abs(got[k] - e);
      if (d < dist) {
        dist = d;
        best = k;
      }
    }
    worst = std::max(worst, dist);
    got.erase(got.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

BinaryForm random_form(CounterRng& rng, int degree) {
  std::vector<Complex> c(static_cast<std::size_t>(degree) + 1);
  for (auto& v : c) v = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return BinaryForm(std::move(c));
}

// The 12 icosahedron vertex roots in the standard alignment:
// {0, infinity} plus the two pentagonal rings solving z^10 + 11 z^5 - 1 = 0.
std::vector<Complex> ring_roots() {
  using std::numbers::pi;
  std::vector<Complex> roots;
  const double s1 = (-11.0 + 5.0 * std::sqrt(5.0)) / 2.0;  // positive
  const double s2 = (-11.0 - 5.0 * std::sqrt(5.0)) / 2.0;  // negative
  const double r1 = std::pow(s1, 0.2);
  const double r2 = std::pow(-s2, 0.2);
  for (int k = 0; k < 5; ++k) {
    roots.push_back(r1 * std::exp(Complex(0, 2.0 * pi * k / 5.0)));
    roots.push_back(r2 * std::exp(Complex(0, pi * (2.0 * k + 1.0) / 5.0)));
  }
  return roots;
}

}  // namespace

TEST_CASE("expand_rnc at the origin is z^12") {
  const auto f = expand_rnc(ProjPoint::affine(Complex(0)));
  REQUIRE(f.degree() == 12);
  CHECK(std::abs(f.coeff(0) - Complex(1)) == 0);
  for (int k = 1; k <= 12; ++k) CHECK(std::abs(f.coeff(k)) == 0);
}

TEST_CASE("expand_rnc at 1 gives exact signed binomials") {
  const auto f = expand_rnc(RationalProjPoint::affine(Rational(1)));
  for (int k = 0; k <= 12; ++k) {
    const Rational expect = (k % 2 == 0 ? Rational(binomial(12, k)) : -Rational(binomial(12, k)));
    CHECK(f.coeff(k) == expect);
  }
  CHECK(f.coeff(1) == Rational(-12));
  CHECK(f.coeff(2) == Rational(66));
  CHECK(f.coeff(3) == Rational(-220));
}

TEST_CASE("expand_rnc root multiset is recovered by clustered root finding") {
  const Complex alpha(0.7, -0.4);
  const auto f = expand_rnc(ProjPoint::affine(alpha));
  int inf_mult = 0;
  const auto roots = affine_roots(f, &inf_mult);
  CHECK(inf_mult == 0);
  const auto clusters = cluster_roots(roots);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].multiplicity == 12);
  // Cluster centroids inherit the well-conditioned eigenvalue sum.
  CHECK(std::abs(clusters[0].center - alpha) < 1e-9);
}

TEST_CASE("invalid projective point is rejected") {
  CHECK_THROWS_AS(ProjPoint(Complex(0), Complex(0)), std::invalid_argument);
}

TEST_CASE("expand_mu coincides with expand_rnc on the diagonal") {
  const auto alpha = RationalProjPoint::affine(Rational(3, 7));
  const auto mu = expand_mu(alpha, alpha);
  const auto rnc = expand_rnc(alpha);
  for (int k = 0; k <= 12; ++k) CHECK(mu.coeff(k) == rnc.coeff(k));

  const auto zero = RationalProjPoint::affine(Rational(0));
  const auto f = expand_mu(zero, zero);
  CHECK(f.coeff(0) == 1);
  for (int k = 1; k <= 12; ++k) CHECK(f.coeff(k) == 0);
}

TEST_CASE("expand_mu coefficients follow the signed binomial expansion") {
  // Symbolic expansion oracle: coefficient k of (z-a)^11 (z-b) equals
  // (-1)^k (binom(11,k) a^k + binom(11,k-1) a^{k-1} b). The displayed
  // unsigned constants c1, c2, c3 = 11, 55, 165 appear with alternating sign.
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const Rational a(static_cast<long long>(rng.next_u64() % 19) - 9, 1 + rng.next_u64() % 7);
    const Rational b(static_cast<long long>(rng.next_u64() % 19) - 9, 1 + rng.next_u64() % 7);
    const auto f = expand_mu(RationalProjPoint::affine(a), RationalProjPoint::affine(b));
    for (int k = 0; k <= 12; ++k) {
      Rational expect(0);
      Rational apow(1);
      for (int i = 0; i < k - 1; ++i) apow *= a;
      if (k >= 1) expect = Rational(binomial(11, k)) * apow * a + Rational(binomial(11, k - 1)) * apow * b;
      if (k == 0) expect = 1;
      if (k % 2 == 1) expect = -expect;
      CHECK(f.coeff(k) == expect);
    }
    // z^11 coefficient is -(11 a + b).
    CHECK(f.coeff(1) == -(Rational(11) * a + b));
  }
}

TEST_CASE("action of the identity and the group law") {
  CounterRng rng(5, 1);
  const auto f = random_form(rng, 12);
  const auto id = GroupElement::identity();
  const auto g = random_su2(rng);
  const auto h = random_su2(rng);

  const auto fid = act(id, f);
  for (int k = 0; k <= 12; ++k) CHECK(std::abs(fid.coeff(k) - f.coeff(k)) < 1e-14);

  const auto lhs = act(g * h, f);
  const auto rhs = act(g, act(h, f));
  CHECK(lhs.degree() == 12);
  for (int k = 0; k <= 12; ++k) CHECK(std::abs(lhs.coeff(k) - rhs.coeff(k)) < 1e-10);
}

TEST_CASE("degenerate group elements are rejected") {
  const BinaryForm f = icosahedral_form();
  std::array<Complex, 4> bad{Complex(2), Complex(0), Complex(0), Complex(1)};
  CHECK_THROWS_AS(act<Complex>(bad, f), std::invalid_argument);
}

TEST_CASE("orbit map is equivariant") {
  CounterRng rng(7, 2);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_su2(rng);
    const ProjPoint alpha(Complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), Complex(1));
    const ProjPoint beta(Complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), Complex(1));
    const auto moved = act(g, expand_mu(alpha, beta));
    const auto direct = expand_mu(g.apply(alpha), g.apply(beta));
    worst = std::max(worst, projective_distance(moved, direct));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("icosahedral group enumeration") {
  const auto& gamma = icosahedral_group();
  CHECK(gamma.size() == 60);
  // Determinants of the lifts.
  for (const auto& g : gamma) CHECK(std::abs(g.det() - Complex(1)) < 1e-12);
  // Rotation orders 1, 2, 3, 5 with the classical counts 1 + 15 + 20 + 24.
  int counts[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& g : gamma) {
    const int ord = psl_order(g);
    REQUIRE((ord == 1 || ord == 2 || ord == 3 || ord == 5));
    ++counts[ord];
  }
  CHECK(counts[1] == 1);
  CHECK(counts[2] == 15);
  CHECK(counts[3] == 20);
  CHECK(counts[5] == 24);
}

TEST_CASE("commutator closure regenerates the whole group") {
  const auto& gamma = icosahedral_group();
  std::vector<GroupElement> pool;
  auto insert = [&pool](const GroupElement& g) {
    const auto c = forms::detail::canonical_sign(g);
    for (const auto& e : pool)
      if (forms::detail::matches(e, c)) return false;
    pool.push_back(c);
    return true;
  };
  for (const auto& a : gamma)
    for (const auto& b : gamma) insert(a * b * a.inverse() * b.inverse());
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t n = pool.size();
    for (std::size_t i = 0; i < n && !grew; ++i)
      for (std::size_t j = 0; j < n && !grew; ++j)
        if (insert(pool[i] * pool[j])) grew = true;
  }
  CHECK(pool.size() == 60);
}

TEST_CASE("icosahedral form matches the vertex root product") {
  // Product oracle over {0, infinity} and the ten ring roots: the infinity
  // vertex drops one homogeneous degree.
  std::vector<Complex> coeffs{Complex(1)};
  auto mul_linear = [&coeffs](const Complex& a, const Complex& b) {
    // multiply by (a z1 + b z2) in z2-degree indexing
    std::vector<Complex> next(coeffs.size() + 1, Complex(0));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      next[k] += coeffs[k] * a;
      next[k + 1] += coeffs[k] * b;
    }
    coeffs = std::move(next);
  };
  mul_linear(Complex(1), Complex(0));   // root 0: factor z1
  mul_linear(Complex(0), Complex(1));   // root infinity: factor z2
  for (const Complex& rho : ring_roots()) mul_linear(Complex(1), -rho);
  const BinaryForm oracle(coeffs);

  const BinaryForm f = icosahedral_form();
  CHECK(projective_distance(f, oracle) < 1e-9);

  // Twelve distinct roots: eleven affine plus one at infinity.
  int inf_mult = 0;
  const auto roots = affine_roots(f, &inf_mult);
  CHECK(inf_mult == 1);
  REQUIRE(roots.size() == 11);
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      CHECK(std::abs(roots[i] - roots[j]) > 1e-6);
}

TEST_CASE("icosahedral form is fixed coefficientwise by all sixty rotations") {
  const BinaryForm f = icosahedral_form();
  double worst = 0;
  for (const auto& g : icosahedral_group()) {
    const auto moved = act(g, f);
    for (int k = 0; k <= 12; ++k) worst = std::max(worst, std::abs(moved.coeff(k) - f.coeff(k)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("minus identity acts trivially on even degree") {
  const BinaryForm f = icosahedral_form();
  const auto moved = act(GroupElement::identity().negated(), f);
  for (int k = 0; k <= 12; ++k) CHECK(std::abs(moved.coeff(k) - f.coeff(k)) < 1e-14);
}

TEST_CASE("stabilizer probe") {
  const auto rep = stabilizer_probe(icosahedral_form(), 50, 2024);
  CHECK(rep.gamma_fixed == 60);
  CHECK(rep.worst_gamma_error < 1e-10);
  CHECK(rep.random_moved == 50);
  CHECK(rep.min_random_move > 1e-6);
  CHECK(rep.pass);
}

TEST_CASE("root coefficient duality for separated simple roots") {
  CounterRng rng(31, 4);
  for (int trial = 0; trial < 20; ++trial) {
    // Twelve well-separated roots on a jittered circle.
    std::vector<Complex> expected;
    for (int k = 0; k < 12; ++k) {
      const double angle = 2.0 * std::numbers::pi * (k + 0.2 * rng.uniform()) / 12.0;
      const double radius = 0.8 + 0.8 * rng.uniform();
      expected.push_back(radius * std::exp(Complex(0, angle)));
    }
    std::vector<Complex> coeffs{Complex(1)};
    for (const Complex& rho : expected) {
      std::vector<Complex> next(coeffs.size() + 1, Complex(0));
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        next[k] += coeffs[k];
        next[k + 1] -= coeffs[k] * rho;
      }
      coeffs = std::move(next);
    }
    const auto roots = affine_roots(BinaryForm(coeffs));
    CHECK(match_roots(roots, expected) < 1e-8);
  }
}

TEST_CASE("projective comparison is scale free") {
  CounterRng rng(17, 8);
  const auto f = random_form(rng, 12);
  const Complex lambda(rng.uniform(0.5, 2.0), rng.uniform(-1, 1));
  std::vector<Complex> scaled;
  for (int k = 0; k <= 12; ++k) scaled.push_back(lambda * f.coeff(k));
  CHECK(projective_distance(f, BinaryForm(scaled)) < 1e-12);
  const auto g = random_form(rng, 12);
  CHECK(projective_distance(f, g) > 1e-3);
}

TEST_CASE("degree and coefficient count are preserved by the action") {
  CounterRng rng(23, 9);
  for (int d : {4, 7, 12}) {
    const auto f = random_form(rng, d);
    const auto g = random_su2(rng);
    const auto moved = act(g, f);
    CHECK(moved.degree() == d);
    CHECK(moved.coefficients().size() == static_cast<std::size_t>(d) + 1);
  }
}
