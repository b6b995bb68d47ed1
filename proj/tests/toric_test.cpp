#include <catch2/catch_amalgamated.hpp>

#include "alphalab/lct.hpp"
#include "alphalab/toric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace alphalab;
using namespace alphalab::toric;

namespace {
constexpr std::uint64_t kSeed = 1729;

PolytopeSymmetry reflection_only() {
  // x-axis reflection subgroup of the diamond symmetries.
  return PolytopeSymmetry{{detail::identity_matrix(2), IntMat{{1, 0}, {0, -1}}}};
}

}  // namespace

TEST_CASE("polytope validation") {
  CHECK_THROWS_AS(LatticePolytope(2, {{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
  // (1,1) inside the hull of the others: not extreme.
  CHECK_THROWS_AS(LatticePolytope(2, {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticePolytope(2, {{0, 0}, {1, 0}}), std::invalid_argument);
  CHECK_NOTHROW(hexagon());
  CHECK_NOTHROW(diamond());
  CHECK_NOTHROW(asym_triangle());
}

TEST_CASE("facets of the hexagon") {
  const auto p = hexagon();
  CHECK(p.facets().size() == 6);
  // Every vertex saturates exactly two facets.
  for (const auto& v : p.vertices()) {
    int on = 0;
    for (const auto& f : p.facets()) {
      long long dot = 0;
      for (int k = 0; k < 2; ++k) dot += f.normal[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
      CHECK(dot <= f.offset);
      if (dot == f.offset) ++on;
    }
    CHECK(on == 2);
  }
}

TEST_CASE("symmetry group orders") {
  CHECK(symmetry_group(hexagon()).order() == 12);
  CHECK(symmetry_group(diamond()).order() == 8);
  CHECK(symmetry_group(asym_triangle()).order() == 1);
}

TEST_CASE("group axioms hold exhaustively") {
  const auto g = symmetry_group(hexagon());
  const auto contains = [&g](const IntMat& m) {
    return std::find(g.elements.begin(), g.elements.end(), m) != g.elements.end();
  };
  CHECK(contains(detail::identity_matrix(2)));
  for (const auto& a : g.elements) {
    // Integer entries with determinant +-1 by construction; closure below.
    const auto d = detail::det(detail::to_rational(a));
    CHECK((d == 1 || d == -1));
    for (const auto& b : g.elements) CHECK(contains(detail::multiply(a, b)));
    // Inverses: some power of a is the identity, so a^(order-1) inverts it.
    IntMat inv = detail::identity_matrix(2);
    IntMat power = a;
    while (power != detail::identity_matrix(2)) {
      inv = power;
      power = detail::multiply(power, a);
    }
    CHECK(contains(inv));
  }
}

TEST_CASE("generating sets regenerate the group") {
  const auto g = symmetry_group(hexagon());
  const auto gens = generating_set(g);
  REQUIRE(!gens.empty());
  CHECK(gens.size() <= 3);  // greedy, not minimal
  // Closure of the generators recovers every element.
  std::vector<IntMat> closed{detail::identity_matrix(2)};
  auto contains = [&closed](const IntMat& m) {
    return std::find(closed.begin(), closed.end(), m) != closed.end();
  };
  for (const auto& e : gens)
    if (!contains(e)) closed.push_back(e);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t count = closed.size();
    for (std::size_t a = 0; a < count && !grew; ++a)
      for (std::size_t b = 0; b < count && !grew; ++b) {
        const IntMat prod = detail::multiply(closed[a], closed[b]);
        if (!contains(prod)) {
          closed.push_back(prod);
          grew = true;
        }
      }
  }
  CHECK(closed.size() == g.elements.size());
}

TEST_CASE("fixed subspaces") {
  const auto hex = fixed_points(symmetry_group(hexagon()));
  CHECK(hex.unique);
  CHECK(hex.dimension == 0);
  CHECK(hex.fixed_point == RatVec{Rational(0), Rational(0)});

  const auto trivial = fixed_points(symmetry_group(asym_triangle()));
  CHECK_FALSE(trivial.unique);
  CHECK(trivial.dimension == 2);

  const auto refl = fixed_points(reflection_only());
  CHECK_FALSE(refl.unique);
  CHECK(refl.dimension == 1);  // the fixed line
}

TEST_CASE("lattice points of the hexagon") {
  const auto points = hexagon().lattice_points();
  CHECK(points.size() == 7);  // six vertices and the origin
  CHECK(std::find(points.begin(), points.end(), IntVec{0, 0}) != points.end());
}

TEST_CASE("lse potential value, invariance, convexity") {
  const auto p = hexagon();
  const LsePotential f(p);
  const std::vector<double> origin{0.0, 0.0};
  CHECK(f.value(origin) == Catch::Approx(std::log(7.0)).epsilon(1e-14));

  // Invariance under the transpose action of every symmetry.
  const auto g = symmetry_group(p);
  CounterRng rng(kSeed, 1);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double fx = f.value(x);
    for (const auto& e : g.elements) {
      const std::vector<double> gx{
          static_cast<double>(e[0][0]) * x[0] + static_cast<double>(e[1][0]) * x[1],
          static_cast<double>(e[0][1]) * x[0] + static_cast<double>(e[1][1]) * x[1]};
      CHECK(std::abs(f.value(gx) - fx) < 1e-12 * (1.0 + std::abs(fx)));
    }
  }

  // Convexity along random segments by centered second differences.
  double min_quotient = 1e300;
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> a{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const std::vector<double> b{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const double h = 1e-3;
    for (const double s : {0.3, 0.5, 0.7}) {
      auto at = [&](double t_) {
        return f.value(std::vector<double>{a[0] + t_ * (b[0] - a[0]), a[1] + t_ * (b[1] - a[1])});
      };
      min_quotient = std::min(min_quotient, (at(s - h) - 2 * at(s) + at(s + h)) / (h * h));
    }
  }
  CHECK(min_quotient > -1e-8);
}

TEST_CASE("gradient image stays inside and approaches vertices") {
  const auto p = hexagon();
  const auto rep = gradient_image_check(p, 10000, 10.0, kSeed);
  CHECK(rep.inside == rep.samples);
  CHECK(rep.min_margin > 0);
  CHECK(rep.centroid_norm < 1e-14);  // symmetric point set averages to zero
  CHECK(rep.worst_vertex_gap < 1e-3);
  CHECK(rep.pass);
}

TEST_CASE("invariant minimization on the dual space") {
  const auto p = hexagon();
  const auto g = symmetry_group(p);
  const auto rep = invariant_min_on_dual(p, g, 10, kSeed);
  CHECK(rep.precondition_ok);
  CHECK(rep.bound_failures == 0);
  CHECK(rep.chord_failures == 0);
  CHECK(rep.worst_argmin_distance < 1e-4);
  CHECK(rep.lse_argmin_distance < 1e-4);
  CHECK(rep.pass);
}

TEST_CASE("reflection-only subgroup fails the precondition") {
  const auto rep = invariant_min_on_dual(diamond(), reflection_only(), 5, kSeed);
  CHECK_FALSE(rep.precondition_ok);
  CHECK(rep.fixed_dimension == 1);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("polytope json round trip") {
  const auto p = hexagon();
  const auto j = p.to_json();
  const auto q = LatticePolytope::from_json(j);
  CHECK(q.vertices() == p.vertices());
  CHECK(q.dimension() == 2);

  const auto sym = symmetry_json(symmetry_group(p), fixed_points(symmetry_group(p)));
  CHECK(sym["order"] == 12);
  CHECK(sym["fixed_point_unique"] == true);
  CHECK(sym["fixed_point"][0] == 0.0);
  CHECK(sym["generators"].size() <= 3);
}

TEST_CASE("monomial threshold linkage") {
  // The local integrability exponent of the coordinate-hyperplane models is
  // 1, independent of how many variables are active.
  for (int p = 1; p <= 4; ++p)
    CHECK(lct::predicted_threshold(lct::monomial_spec(p)) == Rational(1));
}
