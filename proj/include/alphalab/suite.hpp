#pragma once

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphalab/cusp.hpp"
#include "alphalab/forms.hpp"
#include "alphalab/green.hpp"
#include "alphalab/hyperbolic.hpp"
#include "alphalab/lct.hpp"
#include "alphalab/toric.hpp"

// End-to-end verification suite. Each criterion pins its tolerances in code
// and reports one pass/fail line; the full run is deterministic for a fixed
// seed and finishes within the five-minute budget on a small machine.
namespace alphalab::suite {

inline constexpr std::uint64_t kDefaultSeed = 1729;

struct CriterionResult {
  int id = 0;
  std::string label;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

namespace detail {

inline std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

}  // namespace detail

// 1. Exact threshold 5/6 for the (2,3) cusp, recovered by bisection.
inline CriterionResult criterion_threshold(std::uint64_t seed) {
  CriterionResult out{1, "alpha threshold 5/6 for the (2,3) cusp", false, "", 0};
  const auto spec = lct::binomial_cusp_spec(2, 3);
  const bool exact = lct::predicted_threshold(spec) == Rational(5, 6);
  const auto start = std::chrono::steady_clock::now();
  const auto est = lct::estimate_threshold(spec, 0.02, 24000000, seed);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool close = std::abs(est.beta_hat - 5.0 / 6.0) <= 0.02;
  const bool fast = elapsed < 60.0;
  out.pass = exact && close && fast && est.samples_per_annulus >= 1000000;
  out.detail = detail::fmt("predicted=5/6 exact=%d beta_hat=%.4f (|err|=%.4f<=0.02) %.1fs",
                           exact, est.beta_hat, std::abs(est.beta_hat - 5.0 / 6.0), elapsed);
  return out;
}

// 2. Dyadic recursion I_{r+1} = 2^{12 beta - 10} I_r and the pointwise
// scaling identity behind it.
inline CriterionResult criterion_scaling(std::uint64_t seed) {
  CriterionResult out{2, "dyadic annulus recursion ratio 2^(12b-10)", false, "", 0};
  const auto spec = lct::binomial_cusp_spec(2, 3);
  const double qh = lct::quasi_homogeneity_error(spec, 10000, seed);
  bool ratios_ok = true;
  double worst_pull = 0;
  for (const double beta : {0.0, 0.4, 0.8}) {
    std::vector<lct::IntegralEstimate> est;
    for (int r = 0; r <= 3; ++r)
      est.push_back(lct::annulus_integral(spec, beta, r, 2000000, seed));
    const double expect = std::exp2(lct::scaling_exponent(spec, beta));
    for (int r = 0; r < 3; ++r) {
      const auto& a = est[static_cast<std::size_t>(r)];
      const auto& b = est[static_cast<std::size_t>(r) + 1];
      const double ratio = b.mean / a.mean;
      const double sigma = ratio * std::hypot(a.stderr_ / a.mean, b.stderr_ / b.mean);
      const double pull = std::abs(ratio - expect) / sigma;
      worst_pull = std::max(worst_pull, pull);
      ratios_ok = ratios_ok && pull <= 3.0;
    }
  }
  out.pass = ratios_ok && qh < 1e-12;
  out.detail = detail::fmt("worst ratio pull=%.2f sigma (<=3), identity err=%.1e (<=1e-12)",
                           worst_pull, qh);
  return out;
}

// 3. Sum of the annulus integrals: finite below the threshold, divergence
// evidence above it.
inline CriterionResult criterion_convergence(std::uint64_t seed) {
  CriterionResult out{3, "series of annulus integrals: converges at b=0.5, diverges at b=0.9",
                      false, "", 0};
  const auto spec = lct::binomial_cusp_spec(2, 3);
  const auto low = lct::partial_sums(spec, 0.5, 6, 400000, seed);
  const auto high = lct::partial_sums(spec, 0.9, 6, 400000, seed);
  out.pass = !low.divergence_evidence && low.total.has_value() && high.divergence_evidence &&
             high.ratio_geomean > 1.0;
  out.detail = detail::fmt("b=0.5 total=%.4f (tail=%.2e), b=0.9 geometric ratio=%.3f>1",
                           low.total.value_or(-1.0), low.tail_bound.value_or(-1.0),
                           high.ratio_geomean);
  return out;
}

// 4. Monomial threshold 1 with the closed polydisc integral, cross-checked by
// an independent midpoint quadrature of the disc integral at beta = 1/2.
inline CriterionResult criterion_monomial(std::uint64_t) {
  CriterionResult out{4, "monomial integrability threshold 1", false, "", 0};
  const auto near = lct::monomial_integral(2, 2, 0.9);
  const auto at = lct::monomial_integral(2, 2, 1.0);
  const auto disc = lct::monomial_integral(1, 1, 0.5);
  // Midpoint quadrature of |z|^{-1} over the unit disc, independent of the
  // closed form.
  const int m = 2048;
  const double h = 2.0 / m;
  double quad = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = -1.0 + (i + 0.5) * h;
      const double y = -1.0 + (j + 0.5) * h;
      const double r2 = x * x + y * y;
      if (r2 <= 1.0) quad += h * h / std::sqrt(r2);
    }
  const double rel = std::abs(quad - disc.value) / disc.value;
  out.pass = !near.divergent && at.divergent && !disc.divergent && rel < 0.01;
  out.detail = detail::fmt("finite at b=0.9, divergent at b=1, disc quadrature rel err=%.4f<0.01",
                           rel);
  return out;
}

// 5. Cusp certificate: slice orders (2,3), exact leads (-66, -440), controls
// rejected.
inline CriterionResult criterion_cusp(std::uint64_t) {
  CriterionResult out{5, "transverse slice cusp z1^2 = z2^3 with weights (2,3)", false, "", 0};
  const auto cert = cusp::cusp_normal_form_check(cusp::slice_orders(cusp::substitute_u(cusp::mu_local_chart(6))));
  const bool main_ok = cert.pass && cert.orders[0] == 2 && cert.orders[1] == 3 &&
                       cert.lead2 == Rational(-66) && cert.lead3 == Rational(-440) &&
                       cert.residual_order >= 7;
  // Smooth and tacnode controls.
  auto control = [](int pow2, int pow3) {
    cusp::Chart c;
    c.coords.push_back(series::BivariateSeries::variable(6, "u", "alpha", 0));
    series::BivariateSeries a(6, "u", "alpha"), b(6, "u", "alpha");
    a.set_coeff(0, pow2, Rational(1));
    b.set_coeff(0, pow3, Rational(1));
    c.coords.push_back(a);
    c.coords.push_back(b);
    return cusp::cusp_normal_form_check(cusp::slice_orders(c));
  };
  const bool controls_fail = !control(1, 2).pass && !control(2, 4).pass;
  out.pass = main_ok && controls_fail;
  out.detail = detail::fmt("orders=(%d,%d) leads=(%s,%s) residual_order=%d controls rejected=%d",
                           cert.orders[0], cert.orders[1], to_string(cert.lead2).c_str(),
                           to_string(cert.lead3).c_str(), cert.residual_order, controls_fail);
  return out;
}

// 6. Equivariance of the orbit map under the Moebius substitution action.
inline CriterionResult criterion_equivariance(std::uint64_t seed) {
  CriterionResult out{6, "orbit map equivariance under the group action", false, "", 0};
  CounterRng rng(seed, 0x0e41u);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const auto g = forms::random_su2(rng);
    const forms::ProjPoint alpha(forms::Complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                                 forms::Complex(1));
    const forms::ProjPoint beta(forms::Complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                                forms::Complex(1));
    worst = std::max(worst, forms::projective_distance(
                                forms::act(g, forms::expand_mu(alpha, beta)),
                                forms::expand_mu(g.apply(alpha), g.apply(beta))));
  }
  out.pass = worst < 1e-9;
  out.detail = detail::fmt("100 random (g,a,b): worst projective error=%.2e<1e-9", worst);
  return out;
}

// 7. Icosahedral invariance, enumeration and perfectness.
inline CriterionResult criterion_icosahedral(std::uint64_t) {
  CriterionResult out{7, "icosahedral invariance and perfectness of the vertex form", false, "", 0};
  const auto& gamma = forms::icosahedral_group();
  const auto f = forms::icosahedral_form();
  double worst = 0;
  for (const auto& g : gamma) {
    const auto moved = forms::act(g, f);
    for (int k = 0; k <= 12; ++k)
      worst = std::max(worst, std::abs(moved.coeff(k) - f.coeff(k)));
  }
  // Commutator closure.
  std::vector<forms::GroupElement> pool;
  auto insert = [&pool](const forms::GroupElement& g) {
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
  out.pass = gamma.size() == 60 && worst < 1e-10 && pool.size() == 60;
  out.detail = detail::fmt("order=%zu, worst fix error=%.2e<1e-10, commutator closure=%zu/60",
                           gamma.size(), worst, pool.size());
  return out;
}

// 8. Invariant convex functions minimize at the basepoint; the fixed point is
// unique in the sampled sense.
inline CriterionResult criterion_fixed_point(std::uint64_t seed) {
  CriterionResult out{8, "invariant convex minima at the rotation fixed point", false, "", 0};
  CounterRng rng(seed, 0x8ccu);
  int ok = 0;
  double worst_dist = 0;
  for (int t = 0; t < 50; ++t) {
    const hyp::HPoint q = hyp::random_point(rng, 2.0);
    const auto sym = hyp::symmetrize([q](const hyp::HPoint& p) {
      const double d = hyp::distance(q, p);
      return d * d;
    });
    const auto rep = hyp::invariant_min_check(sym, 200, seed + static_cast<std::uint64_t>(t));
    worst_dist = std::max(worst_dist, rep.argmin_distance);
    if (rep.pass && rep.argmin_distance < 1e-4) ++ok;
  }
  int moved_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    hyp::HPoint p = hyp::random_point(rng, 3.0);
    while (hyp::distance(p, hyp::HPoint::base()) <= 1e-3) p = hyp::random_point(rng, 3.0);
    double moved = 0;
    for (const auto& q : hyp::gamma_orbit(p)) moved = std::max(moved, hyp::distance(p, q));
    if (moved > 1e-6) ++moved_ok;
  }
  out.pass = ok == 50 && moved_ok == 1000;
  out.detail = detail::fmt("argmin at base %d/50 (worst=%.1e<1e-4), uniqueness evidence %d/1000",
                           ok, worst_dist, moved_ok);
  return out;
}

// 9. Chord inequality and its half-ball corollary for the same family.
inline CriterionResult criterion_chord(std::uint64_t seed) {
  CriterionResult out{9, "chord bound -b + (a+b) dist along radial geodesics", false, "", 0};
  CounterRng rng(seed, 0x9cdu);
  int ok = 0;
  double worst = 1e300;
  for (int t = 0; t < 50; ++t) {
    const hyp::HPoint q = hyp::random_point(rng, 1.5);
    const auto sym = hyp::symmetrize([q](const hyp::HPoint& p) {
      const double d = hyp::distance(q, p);
      return d * d;
    });
    const auto rep = hyp::chord_bound_check(sym, 1000, seed + static_cast<std::uint64_t>(t));
    worst = std::min(worst, rep.worst_margin);
    if (rep.pass && rep.corollary_ok) ++ok;
  }
  out.pass = ok == 50;
  out.detail = detail::fmt("%d/50 functions pass 1000-point chord and half-ball corollary "
                           "(worst margin=%.1e)",
                           ok, worst);
  return out;
}

// 10. Punctured-plane toy of the psh/convex correspondence.
inline CriterionResult criterion_cstar(std::uint64_t) {
  CriterionResult out{10, "circle-invariant psh vs convex sign agreement", false, "", 0};
  std::vector<std::function<double(double)>> funcs;
  funcs.push_back([](double t) { return t * t; });
  funcs.push_back([](double t) { return -t * t; });  // non-convex control
  funcs.push_back([](double t) { return std::log(1.0 + std::exp(2.0 * t)); });
  funcs.push_back([](double t) { return std::exp(t); });
  funcs.push_back([](double t) { return std::cosh(t); });
  funcs.push_back([](double t) { return -std::cosh(t); });
  funcs.push_back([](double t) { return std::sin(2.0 * t); });  // mixed-sign control
  funcs.push_back([](double t) { return t * t * t; });
  funcs.push_back([](double t) { return std::exp(-t); });
  funcs.push_back([](double t) { return (t - 0.3) * (t - 0.3); });
  for (int k = 1; k <= 10; ++k) {
    const double a = 0.25 * k;
    funcs.push_back([a](double t) { return std::cosh(a * t) + 0.1 * t * t; });
  }
  int ok = 0;
  int checked_total = 0;
  for (const auto& h : funcs) {
    const auto rep = hyp::cstar_psh_check(h, 128);
    checked_total += rep.checked;
    if (rep.pass && rep.agreements == rep.checked) ++ok;
  }
  out.pass = ok == static_cast<int>(funcs.size());
  out.detail = detail::fmt("%d/%zu functions at resolution 128, %d grid points checked", ok,
                           funcs.size(), checked_total);
  return out;
}

// 11. Torus lower bound with the kernel constant, the chain identity, and
// spectral reconstruction.
inline CriterionResult criterion_torus_bound(std::uint64_t seed) {
  CriterionResult out{11, "mean lower bound -M from the nonnegative kernel", false, "", 0};
  const int m = 128;
  const double c = 6.0;
  const green::GreenKernel kernel(m);
  CounterRng rng(seed, 0xb11u);
  int held = 0;
  double worst_gap = 0;
  for (int t = 0; t < 100; ++t) {
    const auto phi = green::random_admissible_field(m, c, 5, rng);
    const auto rep = green::check_lower_bound(phi, c, kernel);
    worst_gap = std::max(worst_gap, rep.chain_gap);
    if (rep.precondition_ok && rep.holds) ++held;
  }
  double recon = 0;
  for (int t = 0; t < 3; ++t) {
    const auto f = green::random_band_limited(m, 5, rng);
    const auto lap = green::laplacian(f);
    for (int i = 0; i < m; i += 13)
      for (int j = 0; j < m; j += 13)
        recon = std::max(recon, std::abs(-kernel.convolve_at(i, j, lap) + f.mean() - f.at(i, j)));
  }
  out.pass = held == 100 && recon < 1e-8;
  out.detail = detail::fmt("bound held %d/100 (worst chain gap=%.1e), reconstruction err=%.1e<1e-8",
                           held, worst_gap, recon);
  return out;
}

// 12. Toric side: hexagon symmetries, unique fixed point, gradient image.
inline CriterionResult criterion_toric(std::uint64_t seed) {
  CriterionResult out{12, "hexagon symmetry group, fixed point and moment image", false, "", 0};
  const auto p = toric::hexagon();
  const auto g = toric::symmetry_group(p);
  const auto fixed = toric::fixed_points(g);
  const auto grad = toric::gradient_image_check(p, 10000, 10.0, seed);
  // Reflection-only control on the diamond: fixed space is a line.
  const toric::PolytopeSymmetry refl{
      {toric::detail::identity_matrix(2), toric::IntMat{{1, 0}, {0, -1}}}};
  const auto refl_fixed = toric::fixed_points(refl);
  const auto control = toric::invariant_min_on_dual(toric::diamond(), refl, 2, seed);
  out.pass = g.order() == 12 && fixed.unique && grad.pass && grad.inside == grad.samples &&
             grad.worst_vertex_gap < 1e-3 && !refl_fixed.unique && !control.precondition_ok;
  out.detail = detail::fmt("order=%d unique_fixed=%d inside=%d/%d vertex gap=%.1e<1e-3 "
                           "control non-unique=%d",
                           g.order(), fixed.unique, grad.inside, grad.samples,
                           grad.worst_vertex_gap, !refl_fixed.unique);
  return out;
}

inline std::vector<CriterionResult> run_all(std::uint64_t seed = kDefaultSeed) {
  using Runner = std::function<CriterionResult(std::uint64_t)>;
  const std::vector<Runner> runners{
      criterion_threshold,  criterion_scaling,     criterion_convergence, criterion_monomial,
      criterion_cusp,       criterion_equivariance, criterion_icosahedral, criterion_fixed_point,
      criterion_chord,      criterion_cstar,       criterion_torus_bound, criterion_toric};
  std::vector<CriterionResult> results;
  results.reserve(runners.size());
  for (const auto& run : runners) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = run(seed);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

inline nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : results)
    j.push_back({{"id", r.id},
                 {"label", r.label},
                 {"pass", r.pass},
                 {"detail", r.detail},
                 {"seconds", r.seconds}});
  return j;
}

}  // namespace alphalab::suite
