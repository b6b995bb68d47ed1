#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphalab/rational.hpp"
#include "alphalab/rng.hpp"

namespace alphalab::lct {

using Complex = std::complex<double>;

// Quasi-homogeneous singularity model: f(l^{w_1} z_1, ..., l^{w_n} z_n) =
// l^d f(z) for every complex l.
struct QuasiHomogSpec {
  std::string name;
  int n = 0;
  std::vector<int> weights;
  int degree = 0;
  std::function<Complex(std::span<const Complex>)> eval;

  int weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0); }

  void validate() const {
    if (n < 1 || static_cast<int>(weights.size()) != n || degree < 1 || !eval)
      throw std::invalid_argument("quasi-homogeneous spec: malformed");
    for (int w : weights)
      if (w < 1) throw std::invalid_argument("quasi-homogeneous spec: weights must be positive");
  }
};

// f(z, w) = z^p - w^q with weights (lcm/p, lcm/q) and degree lcm(p, q).
inline QuasiHomogSpec binomial_cusp_spec(int p, int q) {
  if (p < 2 || q < 2) throw std::invalid_argument("cusp spec: exponents must be at least 2");
  const int d = std::lcm(p, q);
  QuasiHomogSpec s;
  s.name = "cusp" + std::to_string(p) + std::to_string(q);
  s.n = 2;
  s.weights = {d / p, d / q};
  s.degree = d;
  s.eval = [p, q](std::span<const Complex> z) {
    Complex zp(1), wq(1);
    for (int k = 0; k < p; ++k) zp *= z[0];
    for (int k = 0; k < q; ++k) wq *= z[1];
    return zp - wq;
  };
  return s;
}

// f(z_1, ..., z_p) = z_1 ... z_p with unit weights; inert extra variables are
// handled by the closed-form monomial_integral instead.
inline QuasiHomogSpec monomial_spec(int p) {
  if (p < 1) throw std::invalid_argument("monomial spec: p must be positive");
  QuasiHomogSpec s;
  s.name = "monomial" + std::to_string(p);
  s.n = p;
  s.weights.assign(static_cast<std::size_t>(p), 1);
  s.degree = p;
  s.eval = [p](std::span<const Complex> z) {
    Complex out(1);
    for (int k = 0; k < p; ++k) out *= z[k];
    return out;
  };
  return s;
}

// Exponent e with I_{r+1} = 2^e I_r: e = 2 d beta - 2 sum(w). For the (3,2)
// cusp this is 12 beta - 10.
inline double scaling_exponent(const QuasiHomogSpec& spec, double beta) {
  spec.validate();
  return 2.0 * spec.degree * beta - 2.0 * spec.weight_sum();
}

// The beta at which the dyadic ratio crosses 1: sum(w)/d, exact.
inline Rational predicted_threshold(const QuasiHomogSpec& spec) {
  spec.validate();
  return Rational(spec.weight_sum(), spec.degree);
}

// Relative error of the scaling identity |f(l^w z)| = |l|^d |f(z)| over
// random points; the substitution identity behind the annulus recursion.
inline double quasi_homogeneity_error(const QuasiHomogSpec& spec, int points,
                                      std::uint64_t seed) {
  spec.validate();
  CounterRng rng(seed, 0x7172u);
  std::vector<Complex> z(static_cast<std::size_t>(spec.n)),
      zs(static_cast<std::size_t>(spec.n));
  double worst = 0;
  for (int t = 0; t < points; ++t) {
    for (auto& v : z) v = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Complex l(rng.uniform(0.3, 1.7), rng.uniform(-0.7, 0.7));
    for (int i = 0; i < spec.n; ++i) {
      Complex lp(1);
      for (int k = 0; k < spec.weights[static_cast<std::size_t>(i)]; ++k) lp *= l;
      zs[static_cast<std::size_t>(i)] = lp * z[static_cast<std::size_t>(i)];
    }
    Complex ld(1);
    for (int k = 0; k < spec.degree; ++k) ld *= l;
    const Complex lhs = spec.eval(zs);
    const Complex rhs = ld * spec.eval(z);
    const double scale = std::max({1e-30, std::abs(lhs), std::abs(rhs)});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

struct IntegralEstimate {
  int r = 0;
  double beta = 0;
  long long samples = 0;
  double mean = 0;
  double stderr_ = 0;
  long long resampled = 0;   // draws landing numerically on the zero set
  long long overflowed = 0;  // non-finite integrand values (divergence evidence)
};

// Monte Carlo estimate of the integral of |f|^{-2 beta} over the product
// annulus Omega_r = prod_i {2^{-w_i(r+1)} <= |z_i| <= 2^{-w_i r}} against
// Lebesgue measure. Sampling is log-uniform in each radius and uniform in
// each angle, with the exact importance weight prod_i 2 pi (w_i log 2) r_i^2.
// The (seed, r) pair fixes the stream, so estimates are reproducible and
// independent across annuli.
inline IntegralEstimate annulus_integral(const QuasiHomogSpec& spec, double beta, int r,
                                         long long samples, std::uint64_t seed) {
  spec.validate();
  if (beta < 0) throw std::invalid_argument("annulus_integral: beta must be nonnegative");
  if (r < 0) throw std::invalid_argument("annulus_integral: negative annulus index");
  if (samples < 1000) throw std::invalid_argument("annulus_integral: need at least 1000 samples");

  CounterRng rng(seed, 0x0a00u + static_cast<std::uint64_t>(r));
  const double ln2 = std::numbers::ln2;
  double base_weight = 1.0;
  for (int w : spec.weights) base_weight *= 2.0 * std::numbers::pi * w * ln2;

  IntegralEstimate est;
  est.r = r;
  est.beta = beta;
  est.samples = samples;

  std::vector<Complex> z(static_cast<std::size_t>(spec.n));
  double mean = 0, m2 = 0;
  long long accepted = 0;
  for (long long t = 0; t < samples; ++t) {
    double value = 0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      double weight = base_weight;
      for (int i = 0; i < spec.n; ++i) {
        const double w = spec.weights[static_cast<std::size_t>(i)];
        const double radius = std::exp2(-w * (r + rng.uniform()));
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        z[static_cast<std::size_t>(i)] = std::polar(radius, angle);
        weight *= radius * radius;
      }
      const double fmod = std::abs(spec.eval(z));
      if (fmod < 1e-300) {
        ++est.resampled;  // measure-zero event; retry with fresh draws
        continue;
      }
      value = std::pow(fmod, -2.0 * beta) * weight;
      break;
    }
    if (!std::isfinite(value)) {
      ++est.overflowed;
      continue;
    }
    ++accepted;
    const double delta = value - mean;
    mean += delta / static_cast<double>(accepted);
    m2 += delta * (value - mean);
  }
  est.mean = mean;
  if (accepted > 1)
    est.stderr_ = std::sqrt(m2 / (static_cast<double>(accepted) - 1.0) /
                            static_cast<double>(accepted));
  return est;
}

struct PartialSums {
  std::vector<IntegralEstimate> annuli;
  std::vector<double> partial;  // cumulative sums of the means
  double ratio_observed = 0;    // last measured I_{r+1}/I_r
  double ratio_geomean = 0;     // (I_R/I_0)^{1/R}, stable under per-annulus noise
  bool divergence_evidence = false;
  std::optional<double> tail_bound;  // geometric tail I_R rho/(1-rho)
  std::optional<double> total;       // partial sum plus tail bound
};

// Estimates sum_r I_r over r = 0..R. A measured trailing ratio below 1 - eps
// yields a geometric tail bound; ratios at or above 1 - eps across at least
// three consecutive annuli are reported as divergence evidence, never as
// proof.
inline PartialSums partial_sums(const QuasiHomogSpec& spec, double beta, int annuli,
                                long long samples, std::uint64_t seed) {
  if (annuli < 2) throw std::invalid_argument("partial_sums: need at least two annuli");
  constexpr double kEps = 0.02;
  PartialSums out;
  double running = 0;
  for (int r = 0; r <= annuli; ++r) {
    out.annuli.push_back(annulus_integral(spec, beta, r, samples, seed));
    running += out.annuli.back().mean;
    out.partial.push_back(running);
  }
  int streak = 0, longest_streak = 0;
  for (std::size_t k = 0; k + 1 < out.annuli.size(); ++k) {
    const double ratio = out.annuli[k + 1].mean / out.annuli[k].mean;
    out.ratio_observed = ratio;
    streak = ratio >= 1.0 - kEps ? streak + 1 : 0;
    longest_streak = std::max(longest_streak, streak);
  }
  if (out.annuli.front().mean > 0 && out.annuli.back().mean > 0)
    out.ratio_geomean =
        std::pow(out.annuli.back().mean / out.annuli.front().mean, 1.0 / annuli);
  bool overflow_seen = false;
  for (const auto& a : out.annuli) overflow_seen = overflow_seen || a.overflowed > 0;
  if (longest_streak >= 3 || overflow_seen) {
    out.divergence_evidence = true;
  } else if (out.ratio_observed < 1.0 - kEps) {
    const double rho = std::max(0.0, out.ratio_observed);
    out.tail_bound = out.annuli.back().mean * rho / (1.0 - rho);
    out.total = running + *out.tail_bound;
  }
  return out;
}

struct MonomialIntegral {
  double value = 0;
  bool divergent = false;
};

// Closed form over the unit polydisc in C^n with p active variables:
// (2 pi/(2 - 2 beta))^p pi^{n-p} for beta < 1, divergent otherwise.
inline MonomialIntegral monomial_integral(int p, int n, double beta) {
  if (p < 1 || p > n) throw std::invalid_argument("monomial_integral: need 1 <= p <= n");
  MonomialIntegral out;
  if (beta >= 1.0) {
    out.divergent = true;
    return out;
  }
  out.value = std::pow(2.0 * std::numbers::pi / (2.0 - 2.0 * beta), p) *
              std::pow(std::numbers::pi, n - p);
  return out;
}

struct ThresholdEstimate {
  double beta_hat = 0;
  double tol = 0;
  long long samples_per_annulus = 0;
  long long samples_used = 0;
  int evaluations = 0;
  bool bracketed = false;
};

// Bisection over beta of the measured dyadic ratio I_1/I_0 against 1. The
// total sample budget is split evenly over the planned annulus evaluations;
// the (seed, r) streams are shared across evaluations, so the measured ratio
// is a smooth function of beta and the bisection is deterministic.
inline ThresholdEstimate estimate_threshold(const QuasiHomogSpec& spec, double tol,
                                            long long budget, std::uint64_t seed) {
  spec.validate();
  if (tol < 0.005) throw std::invalid_argument("estimate_threshold: tolerance below 0.005");
  if (budget < 4000) throw std::invalid_argument("estimate_threshold: budget too small");

  constexpr int kMaxBracketSteps = 8;
  const double bracket_step = 0.25;
  int bisect_steps = 1;
  while (bracket_step / std::exp2(bisect_steps) > tol && bisect_steps < 40) ++bisect_steps;
  const long long per_annulus =
      std::max<long long>(1000, budget / (2 * (kMaxBracketSteps + bisect_steps)));

  ThresholdEstimate out;
  out.tol = tol;
  out.samples_per_annulus = per_annulus;

  auto ratio_at = [&](double beta) {
    const auto i0 = annulus_integral(spec, beta, 0, per_annulus, seed);
    const auto i1 = annulus_integral(spec, beta, 1, per_annulus, seed);
    out.samples_used += 2 * per_annulus;
    ++out.evaluations;
    if (i1.overflowed > 0 || i0.overflowed > 0 || !(i0.mean > 0)) return 2.0;
    return i1.mean / i0.mean;
  };

  double lo = 0.0, hi = 0.0;
  for (int step = 1; step <= kMaxBracketSteps; ++step) {
    const double beta = bracket_step * step;
    if (ratio_at(beta) >= 1.0) {
      hi = beta;
      break;
    }
    lo = beta;
  }
  if (hi == 0.0) throw std::runtime_error("estimate_threshold: budget exhausted before bracket found");
  out.bracketed = true;
  for (int step = 0; step < bisect_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (ratio_at(mid) >= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  out.beta_hat = 0.5 * (lo + hi);
  return out;
}

// Product-annulus membership. The closed annuli share boundary circles; ties
// resolve to the smaller index. Not every point of the punctured polydisc
// lies in one of these: the product regions cover a scale-invariant
// neighbourhood of the zero set, while the dyadic shells below partition the
// whole punctured polydisc.
inline std::optional<int> annulus_index(const QuasiHomogSpec& spec,
                                        std::span<const Complex> z) {
  spec.validate();
  if (static_cast<int>(z.size()) != spec.n)
    throw std::invalid_argument("annulus_index: dimension mismatch");
  const double w0 = spec.weights[0];
  const double a0 = std::abs(z[0]);
  if (!(a0 > 0) || a0 > 1.0) return std::nullopt;
  const int r_lo = std::max(0, static_cast<int>(std::floor(-std::log2(a0) / w0)) - 1);
  for (int r = r_lo; r <= r_lo + 2; ++r) {
    bool inside = true;
    for (int i = 0; i < spec.n && inside; ++i) {
      const double w = spec.weights[static_cast<std::size_t>(i)];
      const double m = std::abs(z[static_cast<std::size_t>(i)]);
      inside = m >= std::exp2(-w * (r + 1)) && m <= std::exp2(-w * r);
    }
    if (inside) return r;
  }
  return std::nullopt;
}

// Dyadic shell index: the unique r with 2^{-(r+1)} <= max_i |z_i|^{1/w_i} <=
// 2^{-r}. The shells partition the punctured polydisc, contain the product
// annuli of the same index, and obey the same 2^{2 d beta - 2 sum w}
// recursion under the weighted scaling.
inline std::optional<int> shell_index(const QuasiHomogSpec& spec, std::span<const Complex> z) {
  spec.validate();
  if (static_cast<int>(z.size()) != spec.n)
    throw std::invalid_argument("shell_index: dimension mismatch");
  double rho = 0;
  for (int i = 0; i < spec.n; ++i)
    rho = std::max(rho, std::pow(std::abs(z[static_cast<std::size_t>(i)]),
                                 1.0 / spec.weights[static_cast<std::size_t>(i)]));
  if (!(rho > 0) || rho > 1.0) return std::nullopt;
  return static_cast<int>(std::floor(-std::log2(rho)));
}

inline nlohmann::ordered_json report(const QuasiHomogSpec& spec, double beta,
                                     const std::vector<IntegralEstimate>& annuli,
                                     const std::optional<ThresholdEstimate>& threshold = {}) {
  nlohmann::ordered_json j;
  j["spec"] = {{"name", spec.name}, {"weights", spec.weights}, {"degree", spec.degree}};
  j["beta"] = beta;
  j["annuli"] = nlohmann::ordered_json::array();
  for (const auto& a : annuli)
    j["annuli"].push_back({{"r", a.r},
                           {"mean", a.mean},
                           {"stderr", a.stderr_},
                           {"samples", a.samples},
                           {"resampled", a.resampled},
                           {"overflowed", a.overflowed}});
  j["exponent_expected"] = scaling_exponent(spec, beta);
  if (annuli.size() >= 2 && annuli[annuli.size() - 2].mean > 0)
    j["ratio_observed"] = annuli.back().mean / annuli[annuli.size() - 2].mean;
  else
    j["ratio_observed"] = nullptr;
  j["threshold_predicted"] = to_double(predicted_threshold(spec));
  j["threshold_predicted_exact"] = to_string(predicted_threshold(spec));
  if (threshold)
    j["threshold_estimated"] = threshold->beta_hat;
  else
    j["threshold_estimated"] = nullptr;
  return j;
}

}  // namespace alphalab::lct
