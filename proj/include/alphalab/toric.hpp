#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphalab/minimize.hpp"
#include "alphalab/rational.hpp"
#include "alphalab/rng.hpp"

// Lattice polytope symmetry machinery: brute-force unimodular symmetry
// groups, fixed subspaces, the log-sum-exp potential on the dual space, its
// gradient image, and the invariant minimization mirroring the hyperbolic
// argument.
namespace alphalab::toric {

using IntVec = std::vector<long long>;
using IntMat = std::vector<IntVec>;
using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

namespace detail {

inline RatMat to_rational(const IntMat& m) {
  RatMat out;
  out.reserve(m.size());
  for (const auto& row : m) {
    RatVec r;
    r.reserve(row.size());
    for (long long v : row) r.emplace_back(v);
    out.push_back(std::move(r));
  }
  return out;
}

// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<int> rref(RatMat& m) {
  std::vector<int> pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int sel = -1;
    for (int r = row; r < rows; ++r)
      if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(m[static_cast<std::size_t>(sel)], m[static_cast<std::size_t>(row)]);
    const Rational inv = Rational(1) / m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    for (auto& v : m[static_cast<std::size_t>(row)]) v *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row) continue;
      const Rational factor = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      if (factor == 0) continue;
      for (int c = 0; c < cols; ++c)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
            factor * m[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int rank(RatMat m) { return static_cast<int>(rref(m).size()); }

// Basis of the right null space.
inline std::vector<RatVec> nullspace(RatMat m) {
  const int cols = m.empty() ? 0 : static_cast<int>(m[0].size());
  const std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  std::vector<RatVec> basis;
  for (int freecol = 0; freecol < cols; ++freecol) {
    if (is_pivot[static_cast<std::size_t>(freecol)]) continue;
    RatVec v(static_cast<std::size_t>(cols), Rational(0));
    v[static_cast<std::size_t>(freecol)] = 1;
    for (std::size_t prow = 0; prow < pivots.size(); ++prow) {
      const int pcol = pivots[prow];
      if (prow < m.size())
        v[static_cast<std::size_t>(pcol)] = -m[prow][static_cast<std::size_t>(freecol)];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solves the square system A x = b exactly; empty optional when singular.
inline std::optional<RatVec> solve(RatMat a, RatVec b) {
  const int n = static_cast<int>(a.size());
  for (int r = 0; r < n; ++r) a[static_cast<std::size_t>(r)].push_back(b[static_cast<std::size_t>(r)]);
  const auto pivots = rref(a);
  if (static_cast<int>(pivots.size()) != n) return std::nullopt;
  for (int p : pivots)
    if (p >= n) return std::nullopt;  // pivot in the augmented column
  RatVec x(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) x[static_cast<std::size_t>(pivots[static_cast<std::size_t>(r)])] =
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)];
  return x;
}

inline Rational det(RatMat m) {
  const int n = static_cast<int>(m.size());
  Rational out(1);
  for (int col = 0; col < n; ++col) {
    int sel = -1;
    for (int r = col; r < n; ++r)
      if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) return Rational(0);
    if (sel != col) {
      std::swap(m[static_cast<std::size_t>(sel)], m[static_cast<std::size_t>(col)]);
      out = -out;
    }
    const Rational pivot = m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    out *= pivot;
    for (int r = col + 1; r < n; ++r) {
      const Rational factor =
          m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / pivot;
      if (factor == 0) continue;
      for (int c = col; c < n; ++c)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
            factor * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
    }
  }
  return out;
}

}  // namespace detail

struct Facet {
  IntVec normal;    // primitive integer outer normal
  long long offset;  // <normal, x> <= offset on the polytope

  double margin(std::span<const double> x) const {
    double dot = 0, norm2 = 0;
    for (std::size_t k = 0; k < normal.size(); ++k) {
      dot += static_cast<double>(normal[k]) * x[k];
      norm2 += static_cast<double>(normal[k]) * normal[k];
    }
    return (static_cast<double>(offset) - dot) / std::sqrt(norm2);
  }
};

class LatticePolytope {
 public:
  LatticePolytope(int dimension, std::vector<IntVec> vertices)
      : dim_(dimension), vertices_(std::move(vertices)) {
    validate();
    facets_ = enumerate_facets();
  }

  int dimension() const { return dim_; }
  const std::vector<IntVec>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }

  bool contains(const IntVec& p) const {
    for (const auto& f : facets_) {
      long long dot = 0;
      for (int k = 0; k < dim_; ++k) dot += f.normal[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
      if (dot > f.offset) return false;
    }
    return true;
  }

  // Interior margin (> 0 strictly inside) of a real point.
  double interior_margin(std::span<const double> x) const {
    double m = 1e300;
    for (const auto& f : facets_) m = std::min(m, f.margin(x));
    return m;
  }

  std::vector<IntVec> lattice_points() const {
    IntVec lo(static_cast<std::size_t>(dim_), 0), hi(static_cast<std::size_t>(dim_), 0);
    for (int k = 0; k < dim_; ++k) {
      long long a = vertices_[0][static_cast<std::size_t>(k)], b = a;
      for (const auto& v : vertices_) {
        a = std::min(a, v[static_cast<std::size_t>(k)]);
        b = std::max(b, v[static_cast<std::size_t>(k)]);
      }
      lo[static_cast<std::size_t>(k)] = a;
      hi[static_cast<std::size_t>(k)] = b;
    }
    std::vector<IntVec> points;
    IntVec p = lo;
    while (true) {
      if (contains(p)) points.push_back(p);
      int k = 0;
      while (k < dim_ && ++p[static_cast<std::size_t>(k)] > hi[static_cast<std::size_t>(k)]) {
        p[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)];
        ++k;
      }
      if (k == dim_) break;
    }
    return points;
  }

  static LatticePolytope from_json(const nlohmann::json& j) {
    const int dim = j.at("dimension").get<int>();
    std::vector<IntVec> vertices;
    for (const auto& row : j.at("vertices")) vertices.push_back(row.get<IntVec>());
    return LatticePolytope(dim, std::move(vertices));
  }

  nlohmann::ordered_json to_json() const {
    return nlohmann::ordered_json{{"dimension", dim_}, {"vertices", vertices_}};
  }

 private:
  void validate() const {
    if (dim_ < 1) throw std::invalid_argument("polytope: dimension must be positive");
    if (vertices_.size() < static_cast<std::size_t>(dim_) + 1)
      throw std::invalid_argument("polytope: too few vertices");
    for (const auto& v : vertices_)
      if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("polytope: vertex dimension mismatch");
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        if (vertices_[i] == vertices_[j])
          throw std::invalid_argument("polytope: duplicate vertices");
    // Full-dimensional hull: the difference set spans.
    RatMat diffs;
    for (std::size_t k = 1; k < vertices_.size(); ++k) {
      RatVec row;
      for (int c = 0; c < dim_; ++c)
        row.emplace_back(vertices_[k][static_cast<std::size_t>(c)] -
                         vertices_[0][static_cast<std::size_t>(c)]);
      diffs.push_back(std::move(row));
    }
    if (detail::rank(diffs) != dim_)
      throw std::invalid_argument("polytope: hull is not full-dimensional");
    // Extremality: no vertex is a convex combination of the others.
    for (std::size_t k = 0; k < vertices_.size(); ++k)
      if (in_hull_of_others(k)) throw std::invalid_argument("polytope: vertex is not extreme");
  }

  // Caratheodory search: is vertex k inside the hull of the rest?
  bool in_hull_of_others(std::size_t skip) const {
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < vertices_.size(); ++k)
      if (k != skip) others.push_back(k);
    const int pts = static_cast<int>(others.size());
    std::vector<int> pick(static_cast<std::size_t>(dim_) + 1);
    std::function<bool(int, int)> search = [&](int from, int chosen) {
      if (chosen == dim_ + 1) {
        RatMat a(static_cast<std::size_t>(dim_) + 1,
                 RatVec(static_cast<std::size_t>(dim_) + 1, Rational(0)));
        RatVec b(static_cast<std::size_t>(dim_) + 1, Rational(0));
        for (int c = 0; c <= dim_; ++c) {
          const auto& u = vertices_[others[static_cast<std::size_t>(pick[static_cast<std::size_t>(c)])]];
          for (int r = 0; r < dim_; ++r) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = u[static_cast<std::size_t>(r)];
          a[static_cast<std::size_t>(dim_)][static_cast<std::size_t>(c)] = 1;
        }
        for (int r = 0; r < dim_; ++r) b[static_cast<std::size_t>(r)] = vertices_[skip][static_cast<std::size_t>(r)];
        b[static_cast<std::size_t>(dim_)] = 1;
        if (const auto lambda = detail::solve(a, b)) {
          bool ok = true;
          for (const auto& l : *lambda) ok = ok && l >= 0;
          if (ok) return true;
        }
        return false;
      }
      for (int k = from; k < pts; ++k) {
        pick[static_cast<std::size_t>(chosen)] = k;
        if (search(k + 1, chosen + 1)) return true;
      }
      return false;
    };
    return search(0, 0);
  }

  // Brute-force facet enumeration over vertex n-subsets; adequate for the
  // small vertex counts handled here.
  std::vector<Facet> enumerate_facets() const {
    std::vector<Facet> facets;
    const int m = static_cast<int>(vertices_.size());
    std::vector<int> pick(static_cast<std::size_t>(dim_));
    std::function<void(int, int)> search = [&](int from, int chosen) {
      if (chosen == dim_) {
        // Hyperplane <n, x> = c through the chosen vertices: null space of
        // the homogeneous system over (n, c).
        RatMat sys;
        for (int k = 0; k < dim_; ++k) {
          RatVec row;
          for (int c = 0; c < dim_; ++c)
            row.emplace_back(vertices_[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])]
                                      [static_cast<std::size_t>(c)]);
          row.emplace_back(-1);
          sys.push_back(std::move(row));
        }
        const auto basis = detail::nullspace(sys);
        if (basis.size() != 1) return;
        const RatVec& h = basis[0];
        // Scale to a primitive integer vector.
        BigInt denom_lcm = 1;
        for (const auto& q : h) denom_lcm = boost::multiprecision::lcm(denom_lcm, denominator(q));
        std::vector<BigInt> scaled;
        BigInt g = 0;
        for (const auto& q : h) {
          scaled.push_back(numerator(q) * (denom_lcm / denominator(q)));
          g = boost::multiprecision::gcd(g, scaled.back());
        }
        if (g == 0) return;
        IntVec normal(static_cast<std::size_t>(dim_));
        long long offset = 0;
        for (int k = 0; k <= dim_; ++k) {
          const BigInt v = scaled[static_cast<std::size_t>(k)] / g;
          if (k < dim_)
            normal[static_cast<std::size_t>(k)] = v.convert_to<long long>();
          else
            offset = v.convert_to<long long>();
        }
        // All vertices on one side, flipped to <= offset.
        int above = 0, below = 0, on = 0;
        for (const auto& v : vertices_) {
          long long dot = 0;
          for (int k = 0; k < dim_; ++k) dot += normal[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
          if (dot > offset) ++above;
          else if (dot < offset) ++below;
          else ++on;
        }
        if (above > 0 && below > 0) return;
        if (on < dim_) return;
        if (above > 0) {
          for (auto& v : normal) v = -v;
          offset = -offset;
        }
        Facet f{std::move(normal), offset};
        for (const auto& existing : facets)
          if (existing.normal == f.normal && existing.offset == f.offset) return;
        facets.push_back(std::move(f));
        return;
      }
      for (int k = from; k < m; ++k) {
        pick[static_cast<std::size_t>(chosen)] = k;
        search(k + 1, chosen + 1);
      }
    };
    search(0, 0);
    if (facets.size() < static_cast<std::size_t>(dim_) + 1)
      throw std::logic_error("polytope: facet enumeration failed");
    return facets;
  }

  int dim_;
  std::vector<IntVec> vertices_;
  std::vector<Facet> facets_;
};

struct PolytopeSymmetry {
  std::vector<IntMat> elements;

  int order() const { return static_cast<int>(elements.size()); }
};

namespace detail {

inline IntVec apply(const IntMat& a, const IntVec& v) {
  const std::size_t n = a.size();
  IntVec out(n, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r] += a[r][c] * v[c];
  return out;
}

inline IntMat multiply(const IntMat& a, const IntMat& b) {
  const std::size_t n = a.size();
  IntMat out(n, IntVec(n, 0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < n; ++c) out[r][c] += a[r][k] * b[k][c];
  return out;
}

inline IntMat identity_matrix(int n) {
  IntMat out(static_cast<std::size_t>(n), IntVec(static_cast<std::size_t>(n), 0));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1;
  return out;
}

}  // namespace detail

// All integer linear maps permuting the vertex set, found by solving for the
// matrix from the images of a spanning vertex subset over all candidate
// ordered image tuples. Every match is unimodular since it preserves the
// hull.
inline PolytopeSymmetry symmetry_group(const LatticePolytope& p) {
  const auto& verts = p.vertices();
  const int n = p.dimension();
  const int m = static_cast<int>(verts.size());
  if (m > 12) throw std::invalid_argument("symmetry_group: more than 12 vertices");

  // Spanning base tuple (first linearly independent n-subset).
  std::vector<int> base;
  {
    RatMat rows;
    for (int k = 0; k < m && static_cast<int>(base.size()) < n; ++k) {
      RatMat trial = rows;
      RatVec row;
      for (int c = 0; c < n; ++c) row.emplace_back(verts[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)]);
      trial.push_back(row);
      if (detail::rank(trial) == static_cast<int>(trial.size())) {
        rows = std::move(trial);
        base.push_back(k);
      }
    }
    if (static_cast<int>(base.size()) != n)
      throw std::invalid_argument("symmetry_group: vertex set does not span");
  }

  // B has the base vertices as columns.
  RatMat b_cols(static_cast<std::size_t>(n), RatVec(static_cast<std::size_t>(n), Rational(0)));
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      b_cols[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
          verts[static_cast<std::size_t>(base[static_cast<std::size_t>(c)])][static_cast<std::size_t>(r)];

  std::vector<IntMat> found;
  std::vector<int> image(static_cast<std::size_t>(n));
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  std::function<void(int)> enumerate = [&](int slot) {
    if (slot == n) {
      // Solve A * base_c = image_c column by column: A^T rows from B^T.
      RatMat bt(static_cast<std::size_t>(n), RatVec(static_cast<std::size_t>(n)));
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) bt[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            b_cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
      IntMat a(static_cast<std::size_t>(n), IntVec(static_cast<std::size_t>(n), 0));
      for (int r = 0; r < n; ++r) {
        RatVec rhs(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c)
          rhs[static_cast<std::size_t>(c)] =
              verts[static_cast<std::size_t>(image[static_cast<std::size_t>(c)])][static_cast<std::size_t>(r)];
        const auto row = detail::solve(bt, rhs);
        if (!row) return;
        for (int c = 0; c < n; ++c) {
          if (!is_integer((*row)[static_cast<std::size_t>(c)])) return;
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
              numerator((*row)[static_cast<std::size_t>(c)]).convert_to<long long>();
        }
      }
      // Must permute the vertex set.
      std::vector<bool> hit(static_cast<std::size_t>(m), false);
      for (const auto& v : verts) {
        const IntVec moved = detail::apply(a, v);
        bool matched = false;
        for (int k = 0; k < m; ++k)
          if (!hit[static_cast<std::size_t>(k)] && verts[static_cast<std::size_t>(k)] == moved) {
            hit[static_cast<std::size_t>(k)] = true;
            matched = true;
            break;
          }
        if (!matched) return;
      }
      const Rational d = detail::det(detail::to_rational(a));
      if (d != 1 && d != -1) return;
      found.push_back(std::move(a));
      return;
    }
    for (int k = 0; k < m; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      used[static_cast<std::size_t>(k)] = true;
      image[static_cast<std::size_t>(slot)] = k;
      enumerate(slot + 1);
      used[static_cast<std::size_t>(k)] = false;
    }
  };
  enumerate(0);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return PolytopeSymmetry{std::move(found)};
}

struct FixedSpace {
  int dimension = 0;
  bool unique = false;
  std::vector<RatVec> basis;  // of the common fixed subspace
  RatVec fixed_point;         // the origin whenever unique
};

// Common kernel of (g - I) over the group: the fixed subspace of the linear
// action. A zero-dimensional kernel means the origin is the unique fixed
// point.
inline FixedSpace fixed_points(const PolytopeSymmetry& g) {
  if (g.elements.empty()) throw std::invalid_argument("fixed_points: empty group");
  const int n = static_cast<int>(g.elements[0].size());
  RatMat stacked;
  for (const auto& e : g.elements)
    for (int r = 0; r < n; ++r) {
      RatVec row;
      for (int c = 0; c < n; ++c)
        row.emplace_back(e[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
                         (r == c ? 1 : 0));
      stacked.push_back(std::move(row));
    }
  FixedSpace out;
  out.basis = detail::nullspace(std::move(stacked));
  out.dimension = static_cast<int>(out.basis.size());
  out.unique = out.dimension == 0;
  out.fixed_point.assign(static_cast<std::size_t>(n), Rational(0));
  return out;
}

// f(x) = log sum over the lattice points v of P of exp(<v, x>). Convex, and
// invariant under the transpose action of any vertex symmetry because the
// lattice point set is stable.
class LsePotential {
 public:
  explicit LsePotential(const LatticePolytope& p) : points_(p.lattice_points()) {
    if (points_.empty()) throw std::logic_error("lse potential: no lattice points");
    dim_ = p.dimension();
  }

  int dimension() const { return dim_; }
  std::size_t point_count() const { return points_.size(); }

  double value(std::span<const double> x) const {
    double top = -1e300;
    for (const auto& v : points_) top = std::max(top, dot(v, x));
    double sum = 0;
    for (const auto& v : points_) sum += std::exp(dot(v, x) - top);
    return top + std::log(sum);
  }

  std::vector<double> gradient(std::span<const double> x) const {
    double top = -1e300;
    for (const auto& v : points_) top = std::max(top, dot(v, x));
    double total = 0;
    std::vector<double> grad(static_cast<std::size_t>(dim_), 0.0);
    for (const auto& v : points_) {
      const double w = std::exp(dot(v, x) - top);
      total += w;
      for (int k = 0; k < dim_; ++k) grad[static_cast<std::size_t>(k)] += w * static_cast<double>(v[static_cast<std::size_t>(k)]);
    }
    for (auto& gk : grad) gk /= total;
    return grad;
  }

 private:
  static double dot(const IntVec& v, std::span<const double> x) {
    double s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += static_cast<double>(v[k]) * x[k];
    return s;
  }

  std::vector<IntVec> points_;
  int dim_;
};

struct GradientReport {
  int samples = 0;
  int inside = 0;
  double min_margin = 0;
  double centroid_norm = 0;       // |grad at 0|; zero for a symmetric point set
  double worst_vertex_gap = 0;    // max over vertices of |grad(R d) - v|
  double approach_radius = 0;
  bool pass = false;
};

// The gradient is a lattice-point convex combination, so it must stay inside
// the polytope; pushing along a vertex-exposing direction drives it
// exponentially close to that vertex.
inline GradientReport gradient_image_check(const LatticePolytope& p, int samples, double radius,
                                           std::uint64_t seed, double approach_radius = 50.0,
                                           double vertex_tol = 1e-3) {
  const LsePotential f(p);
  const int n = p.dimension();
  GradientReport rep;
  rep.samples = samples;
  rep.approach_radius = approach_radius;
  rep.min_margin = 1e300;
  CounterRng rng(seed, 0x9badu);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int t = 0; t < samples; ++t) {
    double norm2 = 0;
    for (auto& v : x) {
      v = rng.gaussian();
      norm2 += v * v;
    }
    const double r = radius * std::pow(rng.uniform(), 1.0 / n);
    const double scale = norm2 > 0 ? r / std::sqrt(norm2) : 0.0;
    for (auto& v : x) v *= scale;
    const auto grad = f.gradient(x);
    const double margin = p.interior_margin(grad);
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin > 0) ++rep.inside;
  }

  std::vector<double> origin(static_cast<std::size_t>(n), 0.0);
  const auto g0 = f.gradient(origin);
  for (double v : g0) rep.centroid_norm += v * v;
  rep.centroid_norm = std::sqrt(rep.centroid_norm);

  // Vertex approach along the sum of the adjacent facet normals.
  for (const auto& v : p.vertices()) {
    std::vector<double> dir(static_cast<std::size_t>(n), 0.0);
    for (const auto& facet : p.facets()) {
      long long dot = 0;
      for (int k = 0; k < n; ++k) dot += facet.normal[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
      if (dot == facet.offset)
        for (int k = 0; k < n; ++k) dir[static_cast<std::size_t>(k)] += static_cast<double>(facet.normal[static_cast<std::size_t>(k)]);
    }
    double norm = 0;
    for (double d : dir) norm += d * d;
    norm = std::sqrt(norm);
    if (!(norm > 0)) throw std::logic_error("gradient_image_check: vertex has no facet cone");
    std::vector<double> probe(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) probe[static_cast<std::size_t>(k)] = approach_radius * dir[static_cast<std::size_t>(k)] / norm;
    const auto grad = f.gradient(probe);
    double gap = 0;
    for (int k = 0; k < n; ++k) {
      const double d = grad[static_cast<std::size_t>(k)] - static_cast<double>(v[static_cast<std::size_t>(k)]);
      gap += d * d;
    }
    rep.worst_vertex_gap = std::max(rep.worst_vertex_gap, std::sqrt(gap));
  }
  rep.pass = rep.inside == rep.samples && rep.worst_vertex_gap < vertex_tol;
  return rep;
}

struct DualMinReport {
  bool precondition_ok = false;
  int fixed_dimension = -1;
  int trials = 0;
  int bound_failures = 0;
  double worst_argmin_distance = 0;
  int chord_failures = 0;
  double worst_chord_margin = 0;
  double lse_argmin_distance = 0;
  bool pass = false;
};

// Invariant convex minimization on the dual space: for group-averaged strictly
// convex quadratics the minimum must land on the unique fixed point (the
// origin), and the Euclidean chord bound holds along rays from it. Mirrors
// the hyperbolic check with the flat metric. The caller may restrict to a
// subgroup; a positive-dimensional fixed space is a precondition failure.
inline DualMinReport invariant_min_on_dual(const LatticePolytope& p, const PolytopeSymmetry& g,
                                           int trials, std::uint64_t seed) {
  DualMinReport rep;
  const auto fixed = fixed_points(g);
  rep.fixed_dimension = fixed.dimension;
  rep.precondition_ok = fixed.unique;
  rep.trials = trials;
  if (!rep.precondition_ok) return rep;

  const int n = p.dimension();
  CounterRng rng(seed, 0xd0a1u);
  const double two_pi = 2.0 * std::numbers::pi;
  rep.worst_chord_margin = 1e300;

  for (int trial = 0; trial < trials; ++trial) {
    // Random positive-definite quadratic with a shifted center, averaged over
    // the transpose action of the group.
    std::vector<std::vector<double>> q(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = rng.gaussian();
    std::vector<double> center(static_cast<std::size_t>(n));
    for (auto& v : center) v = rng.uniform(-2.0, 2.0);
    const auto quad = [&](std::span<const double> x) {
      // (x - c)^T (Q^T Q + I/2) (x - c)
      double out = 0;
      std::vector<double> d(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) d[static_cast<std::size_t>(k)] = x[k] - center[static_cast<std::size_t>(k)];
      for (int r = 0; r < n; ++r) {
        double row = 0;
        for (int c = 0; c < n; ++c) row += q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * d[static_cast<std::size_t>(c)];
        out += row * row;
      }
      for (double v : d) out += 0.5 * v * v;
      return out;
    };
    const auto symmetrized = [&](std::span<const double> x) {
      double sum = 0;
      std::vector<double> moved(static_cast<std::size_t>(n));
      for (const auto& e : g.elements) {
        for (int r = 0; r < n; ++r) {
          double v = 0;
          for (int c = 0; c < n; ++c) v += static_cast<double>(e[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]) * x[static_cast<std::size_t>(c)];
          moved[static_cast<std::size_t>(r)] = v;
        }
        sum += quad(moved);
      }
      return sum / static_cast<double>(g.elements.size());
    };

    // Sampled bound and refined argmin.
    const std::vector<double> origin(static_cast<std::size_t>(n), 0.0);
    const double f0 = symmetrized(origin);
    double best = f0;
    std::vector<double> best_x = origin;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int t = 0; t < 200; ++t) {
      for (auto& v : x) v = rng.uniform(-3.0, 3.0);
      const double fx = symmetrized(x);
      if (fx < f0 - 1e-9 * (1.0 + std::abs(f0))) ++rep.bound_failures;
      if (fx < best) {
        best = fx;
        best_x = x;
      }
    }
    const auto xmin = pattern_minimize(symmetrized, best_x, 0.5, 1e-7);
    double dist = 0;
    for (double v : xmin) dist += v * v;
    rep.worst_argmin_distance = std::max(rep.worst_argmin_distance, std::sqrt(dist));

    // Euclidean chord bound along rays from the fixed point.
    const double b = -f0 / two_pi;
    double ball_max = f0;
    struct Sample {
      double s, value;
    };
    std::vector<Sample> samples;
    for (int t = 0; t < 200; ++t) {
      double norm2 = 0;
      for (auto& v : x) {
        v = rng.gaussian();
        norm2 += v * v;
      }
      const double s = rng.uniform(0.0, 1.0);
      const double unit = norm2 > 0 ? 1.0 / std::sqrt(norm2) : 0.0;
      std::vector<double> boundary(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        boundary[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] * unit;
        x[static_cast<std::size_t>(k)] *= unit * s;
      }
      samples.push_back({s, symmetrized(x)});
      ball_max = std::max({ball_max, symmetrized(boundary), samples.back().value});
    }
    const double a_bar = ball_max / two_pi;
    for (const auto& sample : samples) {
      const double margin = (-b + (a_bar + b) * sample.s) - sample.value / two_pi;
      rep.worst_chord_margin = std::min(rep.worst_chord_margin, margin);
      if (margin < -1e-9 * (1.0 + std::abs(f0))) ++rep.chord_failures;
    }
  }

  // The polytope potential itself: symmetric log-sum-exp minimizes at 0.
  const LsePotential lse(p);
  const auto lse_eval = [&lse](std::span<const double> x) { return lse.value(x); };
  std::vector<double> start(static_cast<std::size_t>(n), 0.3);
  const auto lse_min = pattern_minimize(lse_eval, start, 0.5, 1e-7);
  for (double v : lse_min) rep.lse_argmin_distance += v * v;
  rep.lse_argmin_distance = std::sqrt(rep.lse_argmin_distance);

  rep.pass = rep.bound_failures == 0 && rep.chord_failures == 0 &&
             rep.worst_argmin_distance < 1e-4 && rep.lse_argmin_distance < 1e-4;
  return rep;
}

// Fixtures.
inline LatticePolytope hexagon() {
  return LatticePolytope(2, {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}});
}
inline LatticePolytope diamond() {
  return LatticePolytope(2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
}
inline LatticePolytope asym_triangle() {
  return LatticePolytope(2, {{0, 0}, {1, 0}, {0, 2}});
}

// Greedy generating subset: add elements until the closure reaches the group.
inline std::vector<IntMat> generating_set(const PolytopeSymmetry& g) {
  if (g.elements.empty()) return {};
  const int n = static_cast<int>(g.elements[0].size());
  std::vector<IntMat> gens;
  std::vector<IntMat> closed{detail::identity_matrix(n)};
  auto contains = [&closed](const IntMat& m) {
    return std::find(closed.begin(), closed.end(), m) != closed.end();
  };
  for (const auto& e : g.elements) {
    if (contains(e)) continue;
    gens.push_back(e);
    closed.push_back(e);
    bool grew = true;
    while (grew) {
      grew = false;
      const std::size_t count = closed.size();
      for (std::size_t a = 0; a < count; ++a)
        for (std::size_t b = 0; b < count; ++b) {
          const IntMat prod = detail::multiply(closed[a], closed[b]);
          if (!contains(prod)) {
            closed.push_back(prod);
            grew = true;
          }
        }
    }
    if (closed.size() == g.elements.size()) break;
  }
  return gens;
}

inline nlohmann::ordered_json symmetry_json(const PolytopeSymmetry& g, const FixedSpace& fixed) {
  nlohmann::ordered_json j;
  j["order"] = g.order();
  j["generators"] = nlohmann::ordered_json::array();
  for (const auto& e : generating_set(g)) j["generators"].push_back(e);
  j["fixed_point_unique"] = fixed.unique;
  if (fixed.unique) {
    std::vector<double> fp;
    for (const auto& q : fixed.fixed_point) fp.push_back(to_double(q));
    j["fixed_point"] = fp;
  } else {
    j["fixed_point"] = nullptr;
    j["fixed_dimension"] = fixed.dimension;
  }
  return j;
}

}  // namespace alphalab::toric
