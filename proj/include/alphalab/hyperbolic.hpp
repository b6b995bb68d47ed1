#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "alphalab/forms.hpp"
#include "alphalab/minimize.hpp"
#include "alphalab/rng.hpp"

// Hyperbolic 3-space modeled by positive-definite Hermitian matrices of
// determinant 1, with the rotation group acting by congruence about the
// basepoint. Hosts the convexity, fixed-point and chord checks.
namespace alphalab::hyp {

using Matrix2 = Eigen::Matrix2cd;
using forms::Complex;

namespace detail {

struct EigSystem {
  Matrix2 vectors;
  double l1 = 0, l2 = 0;
};

inline EigSystem hermitian_eig(const Matrix2& m) {
  Eigen::SelfAdjointEigenSolver<Matrix2> es(m);
  EigSystem out;
  out.vectors = es.eigenvectors();
  out.l1 = es.eigenvalues()(0);
  out.l2 = es.eigenvalues()(1);
  return out;
}

inline Matrix2 hermitian_function(const Matrix2& m, const std::function<double(double)>& fn) {
  const EigSystem es = hermitian_eig(m);
  Eigen::Vector2d mapped(fn(es.l1), fn(es.l2));
  return es.vectors * mapped.asDiagonal() * es.vectors.adjoint();
}

// Re-Hermitize and renormalize the determinant to 1; keeps long geodesic
// chains machine-checkable against the class invariants.
inline Matrix2 clean(Matrix2 m) {
  m = (Matrix2(m + m.adjoint()) * 0.5).eval();
  const double det = m.determinant().real();
  if (!(det > 0)) throw std::domain_error("hpoint: nonpositive determinant");
  return m / std::sqrt(det);
}

}  // namespace detail

class HPoint {
 public:
  explicit HPoint(const Matrix2& m, double tol = 1e-12) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (!((m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale)))
      throw std::invalid_argument("hpoint: matrix is not Hermitian");
    const auto es = detail::hermitian_eig((Matrix2(m + m.adjoint()) * 0.5).eval());
    if (!(es.l1 > 0 && es.l2 > 0))
      throw std::invalid_argument("hpoint: matrix is not positive definite");
    if (std::abs(es.l1 * es.l2 - 1.0) > 1e-9)
      throw std::invalid_argument("hpoint: determinant is not 1");
    m_ = detail::clean(m);
  }

  static HPoint base() { return HPoint(Matrix2::Identity()); }

  const Matrix2& matrix() const { return m_; }

 private:
  HPoint() = default;
  Matrix2 m_;
};

// Coset projection g -> g g*; right rotations of g collapse to the same
// point and the identity coset is the basepoint.
inline HPoint from_group(const forms::GroupElement& g, double det_tol = 1e-9) {
  if (std::abs(g.det() - Complex(1)) > det_tol)
    throw std::invalid_argument("from_group: determinant is not 1");
  Matrix2 m;
  m << g.m[0], g.m[1], g.m[2], g.m[3];
  return HPoint(detail::clean(m * m.adjoint()));
}

// Root-sum-square of the log-eigenvalues of A^{-1}B. With this normalization
// distance(base, diag(e^t, e^-t)) = t sqrt(2), and congruence by any
// determinant-1 matrix is an isometry.
inline double distance(const HPoint& a, const HPoint& b) {
  const Matrix2 isqrt =
      detail::hermitian_function(a.matrix(), [](double l) { return 1.0 / std::sqrt(l); });
  const Matrix2 w = detail::clean(isqrt * b.matrix() * isqrt);
  const auto es = detail::hermitian_eig(w);
  return std::hypot(std::log(es.l1), std::log(es.l2));
}

// A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}; affine in arclength on [0, 1] and
// valid for any real t along the same line.
inline HPoint geodesic(const HPoint& a, const HPoint& b, double t) {
  const Matrix2 sqrt_a =
      detail::hermitian_function(a.matrix(), [](double l) { return std::sqrt(l); });
  const Matrix2 isqrt_a =
      detail::hermitian_function(a.matrix(), [](double l) { return 1.0 / std::sqrt(l); });
  const Matrix2 w = detail::clean(isqrt_a * b.matrix() * isqrt_a);
  const Matrix2 wt = detail::hermitian_function(w, [t](double l) { return std::pow(l, t); });
  return HPoint(detail::clean(sqrt_a * wt * sqrt_a));
}

// exp of the traceless Hermitian [[x0, x1 + i x2], [x1 - i x2, -x0]].
inline HPoint exp_base(const std::array<double, 3>& x) {
  const double lambda = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  Matrix2 h;
  h << Complex(x[0], 0), Complex(x[1], x[2]), Complex(x[1], -x[2]), Complex(-x[0], 0);
  const double c = std::cosh(lambda);
  const double s = lambda > 1e-300 ? std::sinh(lambda) / lambda : 1.0;
  return HPoint(detail::clean(c * Matrix2::Identity() + s * h));
}

inline std::array<double, 3> log_base(const HPoint& p) {
  const Matrix2 h = detail::hermitian_function(p.matrix(), [](double l) { return std::log(l); });
  return {h(0, 0).real(), h(0, 1).real(), h(0, 1).imag()};
}

// Exponential-map sampling: unit direction times a uniform radius, so
// distance(base, sample) is exactly the drawn radius.
inline HPoint random_point(CounterRng& rng, double radius) {
  std::array<double, 3> x{};
  double norm2 = 0;
  do {
    norm2 = 0;
    for (auto& v : x) {
      v = rng.gaussian();
      norm2 += v * v;
    }
  } while (norm2 < 1e-12);
  const double t = rng.uniform(0.0, radius);
  // |x| = 1/sqrt(2) makes the Frobenius norm of the direction 1.
  const double scale = t / std::sqrt(2.0 * norm2);
  for (auto& v : x) v *= scale;
  return exp_base(x);
}

// The 60 congruence translates u P u*; the basepoint is fixed by all of them.
inline std::vector<HPoint> gamma_orbit(const HPoint& p) {
  std::vector<HPoint> orbit;
  orbit.reserve(60);
  for (const auto& u : forms::icosahedral_group()) {
    Matrix2 g;
    g << u.m[0], u.m[1], u.m[2], u.m[3];
    orbit.push_back(HPoint(detail::clean(g * p.matrix() * g.adjoint())));
  }
  return orbit;
}

struct InvariantFunction {
  std::function<double(const HPoint&)> fn;
  bool symmetrized = false;

  double operator()(const HPoint& p) const { return fn(p); }
};

// Group average; preserves convexity since each translate is an isometry.
inline InvariantFunction symmetrize(const std::function<double(const HPoint&)>& f) {
  InvariantFunction out;
  out.symmetrized = true;
  out.fn = [f](const HPoint& p) {
    double sum = 0;
    for (const auto& q : gamma_orbit(p)) sum += f(q);
    return sum / 60.0;
  };
  return out;
}

struct ConvexityReport {
  int trials = 0;
  int violations = 0;
  double min_second_difference = 0;  // second-difference quotient D2/h^2
  double tolerance = 0;
  bool pass = false;
};

// Centered second differences of f along random geodesic segments. The
// quotient D2/h^2 approximates the second derivative in the affine
// parameter; a convex function keeps it nonnegative up to float noise.
inline ConvexityReport convexity_check(const std::function<double(const HPoint&)>& f, int trials,
                                       int steps, double tol, std::uint64_t seed,
                                       double radius = 2.0) {
  ConvexityReport rep;
  rep.trials = trials;
  rep.tolerance = tol;
  rep.min_second_difference = 1e300;
  CounterRng rng(seed, 0xc011u);
  const double h = 1e-3;  // relative step in the affine parameter
  for (int trial = 0; trial < trials; ++trial) {
    const HPoint a = random_point(rng, radius);
    const HPoint b = random_point(rng, radius);
    for (int k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) / (steps + 1);
      const double fm = f(geodesic(a, b, t - h));
      const double f0 = f(geodesic(a, b, t));
      const double fp = f(geodesic(a, b, t + h));
      const double quotient = (fm - 2.0 * f0 + fp) / (h * h);
      rep.min_second_difference = std::min(rep.min_second_difference, quotient);
      if (quotient < -tol * (1.0 + std::abs(f0))) ++rep.violations;
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

struct MinimumReport {
  int trials = 0;
  int failures = 0;
  bool invariance_ok = false;
  bool degenerate = false;
  double base_value = 0;
  double min_sampled_value = 0;
  double argmin_distance = 0;  // distance of the refined argmin to the basepoint
  double tolerance = 0;
  bool pass = false;
};

// Verifies that an invariant function is minimized at the basepoint: sampled
// values never undercut f(base), and a local refinement from the best sample
// lands back at the basepoint. A constant function passes with the
// degenerate flag set.
inline MinimumReport invariant_min_check(const InvariantFunction& f, int trials,
                                         std::uint64_t seed, double radius = 5.0) {
  MinimumReport rep;
  rep.trials = trials;
  CounterRng rng(seed, 0x317bu);
  const double f0 = f(HPoint::base());
  rep.base_value = f0;
  const double tol = 1e-8 * (1.0 + std::abs(f0));
  rep.tolerance = tol;

  // Invariance precondition, sampled.
  rep.invariance_ok = true;
  for (int t = 0; t < 10 && rep.invariance_ok; ++t) {
    const HPoint p = random_point(rng, radius);
    const double fp = f(p);
    for (const auto& q : gamma_orbit(p))
      if (std::abs(f(q) - fp) > 1e-8 * (1.0 + std::abs(fp))) {
        rep.invariance_ok = false;
        break;
      }
  }

  double best = f0;
  std::array<double, 3> best_x{0, 0, 0};
  double spread_min = f0, spread_max = f0;
  for (int t = 0; t < trials; ++t) {
    const HPoint q = random_point(rng, radius);
    const double fq = f(q);
    spread_min = std::min(spread_min, fq);
    spread_max = std::max(spread_max, fq);
    if (fq < f0 - tol) ++rep.failures;
    if (fq < best) {
      best = fq;
      best_x = log_base(q);
    }
  }
  rep.min_sampled_value = spread_min;
  rep.degenerate = spread_max - spread_min <= 1e-12 * (1.0 + std::abs(f0));

  const auto objective = [&f](std::span<const double> x) {
    return f(exp_base({x[0], x[1], x[2]}));
  };
  const auto xmin = pattern_minimize(objective, {best_x[0], best_x[1], best_x[2]}, 0.25, 1e-7);
  rep.argmin_distance = distance(exp_base({xmin[0], xmin[1], xmin[2]}), HPoint::base());
  rep.pass = rep.invariance_ok && rep.failures == 0;
  return rep;
}

struct ChordReport {
  int trials = 0;
  int failures = 0;
  double a_bar = 0;  // max of f/(2 pi) over the sampled unit ball
  double b = 0;      // -f(base)/(2 pi)
  double worst_margin = 0;
  bool corollary_ok = false;  // f <= pi (a_bar - b) on the half ball
  bool pass = false;
};

// One-dimensional chord bound along radial geodesics: with 2 pi a_bar the
// ball max and f(base) = -2 pi b, every Q in the unit ball satisfies
// f(Q)/(2 pi) <= -b + (a_bar + b) dist(Q, base). The radius-1 extension of
// each sampled ray joins the max pool, so the bound is implied by convexity.
inline ChordReport chord_bound_check(const InvariantFunction& f, int trials, std::uint64_t seed) {
  ChordReport rep;
  rep.trials = trials;
  CounterRng rng(seed, 0xc402u);
  const double two_pi = 2.0 * std::numbers::pi;
  const double f0 = f(HPoint::base());
  rep.b = -f0 / two_pi;

  struct Sample {
    double s;      // distance to the basepoint
    double value;  // f at the sample
  };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(trials));
  double ball_max = f0;
  for (int t = 0; t < trials; ++t) {
    std::array<double, 3> x{};
    double norm2 = 0;
    do {
      norm2 = 0;
      for (auto& v : x) {
        v = rng.gaussian();
        norm2 += v * v;
      }
    } while (norm2 < 1e-12);
    const double s = rng.uniform(0.0, 1.0);
    const double unit = 1.0 / std::sqrt(2.0 * norm2);
    const std::array<double, 3> dir{x[0] * unit, x[1] * unit, x[2] * unit};
    const HPoint q = exp_base({dir[0] * s, dir[1] * s, dir[2] * s});
    const HPoint boundary = exp_base(dir);
    samples.push_back({s, f(q)});
    ball_max = std::max({ball_max, f(boundary), samples.back().value});
  }
  rep.a_bar = ball_max / two_pi;

  const double tol = 1e-9 * (1.0 + std::abs(f0) / two_pi);
  rep.worst_margin = 1e300;
  rep.corollary_ok = true;
  const double half_ball_bound = std::numbers::pi * (rep.a_bar - rep.b);
  for (const auto& sample : samples) {
    const double margin =
        (-rep.b + (rep.a_bar + rep.b) * sample.s) - sample.value / two_pi;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -tol) ++rep.failures;
    if (sample.s <= 0.5 && sample.value > half_ball_bound + two_pi * tol)
      rep.corollary_ok = false;
  }
  rep.pass = rep.failures == 0 && rep.corollary_ok;
  return rep;
}

struct CstarReport {
  int resolution = 0;
  int checked = 0;
  int excluded = 0;
  int agreements = 0;
  double max_identity_error = 0;  // max |Lap F . r^2 - h''| over checked points
  bool identity_second_order = false;
  bool pass = false;
};

namespace detail {

struct CstarPass {
  int checked = 0, excluded = 0, agreements = 0;
  double max_identity_error = 0;
  // Same error restricted to a fixed middle band, comparable across
  // resolutions for the second-order convergence check.
  double band_identity_error = 0;
};

inline CstarPass cstar_pass(const std::function<double(double)>& h, int m) {
  const double r_lo = std::exp(-1.0), r_hi = std::exp(1.0);
  const double extent = r_hi;
  const double hc = 2.0 * extent / (m - 1);
  const double delta = 1e-4;  // step for the reference h'' difference

  auto value = [&](double x, double y) { return h(0.5 * std::log(x * x + y * y)); };

  // Scan for the reference scale of h'' first.
  double hpp_max = 0;
  for (int k = 0; k < m; ++k) {
    const double t = -1.0 + 2.0 * k / (m - 1);
    const double hpp = (h(t + delta) - 2.0 * h(t) + h(t - delta)) / (delta * delta);
    hpp_max = std::max(hpp_max, std::abs(hpp));
  }
  const double floor = std::max(1e-9, 0.03 * hpp_max);

  CstarPass out;
  for (int i = 0; i < m; ++i) {
    const double x = -extent + hc * i;
    for (int j = 0; j < m; ++j) {
      const double y = -extent + hc * j;
      const double r = std::hypot(x, y);
      if (r < r_lo + 2 * hc || r > r_hi - 2 * hc) continue;
      const double lap = (value(x + hc, y) + value(x - hc, y) + value(x, y + hc) +
                          value(x, y - hc) - 4.0 * value(x, y)) /
                         (hc * hc);
      const double t = std::log(r);
      const double hpp = (h(t + delta) - 2.0 * h(t) + h(t - delta)) / (delta * delta);
      const double identity_error = std::abs(lap * r * r - hpp);
      out.max_identity_error = std::max(out.max_identity_error, identity_error);
      if (r >= r_lo + 0.25 && r <= r_hi - 0.25)
        out.band_identity_error = std::max(out.band_identity_error, identity_error);
      if (std::abs(hpp) < floor) {
        ++out.excluded;
        continue;
      }
      ++out.checked;
      if ((lap > 0) == (hpp > 0)) ++out.agreements;
    }
  }
  return out;
}

}  // namespace detail

// Toy model of the invariant-psh/convex correspondence on the punctured
// plane: F(z) = h(log|z|) satisfies Lap F = h''(log r)/r^2, so the Laplacian
// sign field matches the convexity sign of h. The Laplacian is formed by
// five-point differences on a Cartesian annulus grid; the identity error is
// required to shrink at second order when the grid is refined.
inline CstarReport cstar_psh_check(const std::function<double(double)>& h, int resolution) {
  if (resolution < 32) throw std::invalid_argument("cstar_psh_check: grid too coarse");
  const auto fine = detail::cstar_pass(h, resolution);
  const auto coarse = detail::cstar_pass(h, resolution / 2);
  CstarReport rep;
  rep.resolution = resolution;
  rep.checked = fine.checked;
  rep.excluded = fine.excluded;
  rep.agreements = fine.agreements;
  rep.max_identity_error = fine.max_identity_error;
  rep.identity_second_order = fine.band_identity_error <= 0.4 * coarse.band_identity_error + 1e-9;
  rep.pass = rep.checked > 0 && rep.agreements == rep.checked && rep.identity_second_order;
  return rep;
}

inline nlohmann::ordered_json check_json(const std::string& check, int trials, int failures,
                                         double worst_margin, double tolerance) {
  return nlohmann::ordered_json{{"check", check},
                                {"trials", trials},
                                {"failures", failures},
                                {"worst_margin", worst_margin},
                                {"tolerance", tolerance}};
}

}  // namespace alphalab::hyp
