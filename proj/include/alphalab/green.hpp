#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "alphalab/rng.hpp"

// Flat-torus testbed for the Green's-function lower bound: periodic fields on
// [0, 2 pi)^2, the spectral Laplacian, the nonnegative-normalized kernel and
// the mean-value bound it implies for functions with a one-sided Laplacian
// bound and max zero.
namespace alphalab::green {

inline constexpr double kTorusVolume = 4.0 * std::numbers::pi * std::numbers::pi;

// Periodic samples on the m x m grid x_ij = (2 pi i/m, 2 pi j/m).
class TorusField {
 public:
  explicit TorusField(int m) : m_(m), v_(static_cast<std::size_t>(m) * m, 0.0) {
    if (m < 4) throw std::invalid_argument("torus field: grid too small");
  }

  int resolution() const { return m_; }
  double& at(int i, int j) { return v_[index(i, j)]; }
  double at(int i, int j) const { return v_[index(i, j)]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  double mean() const {
    double s = 0;
    for (double x : v_) s += x;
    return s / static_cast<double>(v_.size());
  }

  double max() const {
    double best = v_[0];
    for (double x : v_) best = std::max(best, x);
    return best;
  }

  double min() const {
    double best = v_[0];
    for (double x : v_) best = std::min(best, x);
    return best;
  }

  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v_.size(); ++k)
      if (v_[k] > v_[best]) best = k;
    return best;
  }

  // Grid quadrature of the integral over the torus.
  double integral() const { return mean() * kTorusVolume; }

 private:
  std::size_t index(int i, int j) const {
    const int mi = ((i % m_) + m_) % m_;
    const int mj = ((j % m_) + m_) % m_;
    return static_cast<std::size_t>(mi) * m_ + mj;
  }

  int m_;
  std::vector<double> v_;
};

namespace detail {

// RAII wrapper around a pair of complex-to-complex FFTW plans of size m x m.
class Fft2 {
 public:
  explicit Fft2(int m) : m_(m), buf_(static_cast<std::size_t>(m) * m) {
    auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
    forward_ = fftw_plan_dft_2d(m, m, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(m, m, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw std::runtime_error("fftw plan creation failed");
  }
  ~Fft2() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  // Unnormalized coefficients X(k) = sum_n x(n) e^{-i k.x_n}.
  std::vector<std::complex<double>> forward(const TorusField& f) {
    for (std::size_t k = 0; k < buf_.size(); ++k) buf_[k] = f.values()[k];
    fftw_execute(forward_);
    return buf_;
  }

  // x(n) = (1/m^2) sum_k X(k) e^{+i k.x_n}.
  TorusField backward(const std::vector<std::complex<double>>& spec) {
    buf_ = spec;
    fftw_execute(backward_);
    TorusField out(m_);
    const double scale = 1.0 / (static_cast<double>(m_) * m_);
    for (std::size_t k = 0; k < buf_.size(); ++k) out.values()[k] = buf_[k].real() * scale;
    return out;
  }

  int signed_freq(int i) const { return i <= m_ / 2 ? i : i - m_; }

 private:
  int m_;
  std::vector<std::complex<double>> buf_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace detail

// Spectral Laplacian: multiplier -|k|^2 on the integer frequencies.
inline TorusField laplacian(const TorusField& f) {
  const int m = f.resolution();
  detail::Fft2 fft(m);
  auto spec = fft.forward(f);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double k1 = fft.signed_freq(i), k2 = fft.signed_freq(j);
      spec[static_cast<std::size_t>(i) * m + j] *= -(k1 * k1 + k2 * k2);
    }
  return fft.backward(spec);
}

// Five-point stencil Laplacian, h = 2 pi/m; second-order consistency control
// for the spectral route.
inline TorusField laplacian_stencil(const TorusField& f) {
  const int m = f.resolution();
  const double h = 2.0 * std::numbers::pi / m;
  TorusField out(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out.at(i, j) =
          (f.at(i + 1, j) + f.at(i - 1, j) + f.at(i, j + 1) + f.at(i, j - 1) - 4.0 * f.at(i, j)) /
          (h * h);
  return out;
}

// Solves Lap u = source for the unique zero-mean u by spectral division.
inline TorusField green_apply(const TorusField& source) {
  const int m = source.resolution();
  double rms = 0;
  for (double v : source.values()) rms += v * v;
  rms = std::sqrt(rms / (static_cast<double>(m) * m));
  if (std::abs(source.mean()) > 1e-9 * (1.0 + rms))
    throw std::invalid_argument("green_apply: source must have zero mean");
  detail::Fft2 fft(m);
  auto spec = fft.forward(source);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double k1 = fft.signed_freq(i), k2 = fft.signed_freq(j);
      const double k2norm = k1 * k1 + k2 * k2;
      auto& c = spec[static_cast<std::size_t>(i) * m + j];
      c = k2norm > 0 ? c / (-k2norm) : 0.0;
    }
  return fft.backward(spec);
}

// Translation kernel of the mean-free inverse Laplacian, shifted so K >= 0.
// K(x, y) = k0(x - y); the shift leaves the reconstruction identity intact
// because the Laplacian it convolves against has zero mean. On the discrete
// torus the kernel is finite on the diagonal.
class GreenKernel {
 public:
  explicit GreenKernel(int m) : k0_(m) {
    detail::Fft2 fft(m);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double k1 = fft.signed_freq(i), k2 = fft.signed_freq(j);
        const double k2norm = k1 * k1 + k2 * k2;
        if (k2norm > 0)
          spec[static_cast<std::size_t>(i) * m + j] = 1.0 / (kTorusVolume * k2norm);
      }
    // Backward transform without the 1/m^2 factor is exactly the Fourier sum.
    TorusField raw = fft.backward(spec);
    for (double& v : raw.values()) v *= static_cast<double>(m) * m;
    shift_ = -raw.min();
    for (double& v : raw.values()) v += shift_;
    k0_ = raw;
  }

  int resolution() const { return k0_.resolution(); }
  double at(int dx, int dy) const { return k0_.at(dx, dy); }
  double shift() const { return shift_; }

  // integral over y of K(x, y); independent of x by translation invariance.
  double row_integral() const { return k0_.integral(); }

  // Quadrature of K(x, .) * g for the grid point x = (i, j).
  double convolve_at(int i, int j, const TorusField& g) const {
    const int m = k0_.resolution();
    if (g.resolution() != m) throw std::invalid_argument("kernel/field resolution mismatch");
    double s = 0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) s += k0_.at(i - a, j - b) * g.at(a, b);
    return s * kTorusVolume / (static_cast<double>(m) * m);
  }

 private:
  TorusField k0_;
  double shift_ = 0;
};

// M = c V max_x integral K(x, y) dy, the lower-bound constant for fields
// with Lap >= -c and max zero. c = 6 is the three-complex-dimension analogue;
// c = 0 degenerates to M = 0.
inline double lemma1_constant(const GreenKernel& kernel, double c) {
  if (c < 0) throw std::invalid_argument("lemma1_constant: c must be nonnegative");
  return c * kTorusVolume * kernel.row_integral();
}

struct BoundReport {
  bool max_zero_ok = false;
  bool laplacian_ok = false;
  bool precondition_ok = false;
  double c = 0;
  double bound_constant = 0;  // M
  double integral = 0;        // integral of phi
  double margin = 0;          // integral + M, nonnegative when the bound holds
  double chain_middle = 0;    // V . (K(x*, .) * Lap phi)
  double chain_gap = 0;       // |integral - chain_middle|, an exact identity on the grid
  bool holds = false;
};

// Checks integral(phi) >= -M for an admissible phi (max phi = 0 and
// Lap phi >= -c on the grid), and reproduces the chain identity through the
// argmax point x*: integral(phi) = V K(x*,.)*Lap(phi) >= -c V K-row.
inline BoundReport check_lower_bound(const TorusField& phi, double c, const GreenKernel& kernel) {
  const int m = phi.resolution();
  if (kernel.resolution() != m)
    throw std::invalid_argument("check_lower_bound: kernel resolution mismatch");
  BoundReport rep;
  rep.c = c;

  double scale = 0;
  for (double v : phi.values()) scale = std::max(scale, std::abs(v));
  rep.max_zero_ok = std::abs(phi.max()) <= 1e-12 * (1.0 + scale);

  const TorusField lap = laplacian(phi);
  double lap_scale = 0;
  for (double v : lap.values()) lap_scale = std::max(lap_scale, std::abs(v));
  rep.laplacian_ok = lap.min() >= -c - 1e-8 * (1.0 + lap_scale);
  rep.precondition_ok = rep.max_zero_ok && rep.laplacian_ok;
  if (!rep.precondition_ok) return rep;

  rep.bound_constant = lemma1_constant(kernel, c);
  rep.integral = phi.integral();
  rep.margin = rep.integral + rep.bound_constant;

  const std::size_t star = phi.argmax();
  const int si = static_cast<int>(star) / m, sj = static_cast<int>(star) % m;
  rep.chain_middle = kTorusVolume * kernel.convolve_at(si, sj, lap);
  rep.chain_gap = std::abs(rep.integral - rep.chain_middle);
  const double grid_tol = 1e-7 * (1.0 + std::abs(rep.integral) + kTorusVolume * scale);
  rep.holds = rep.margin >= -grid_tol && rep.chain_gap <= grid_tol &&
              rep.chain_middle >= -rep.bound_constant - grid_tol;
  return rep;
}

// Band-limited random field with zero mean: cosine modes with frequencies up
// to band in each axis.
inline TorusField random_band_limited(int m, int band, CounterRng& rng) {
  if (2 * band >= m / 2) throw std::invalid_argument("random_band_limited: band too wide");
  TorusField out(m);
  const double step = 2.0 * std::numbers::pi / m;
  std::vector<std::array<double, 3>> modes;
  for (int k1 = -band; k1 <= band; ++k1)
    for (int k2 = 0; k2 <= band; ++k2) {
      if (k2 == 0 && k1 <= 0) continue;  // one representative per +-k pair
      modes.push_back({static_cast<double>(k1), static_cast<double>(k2), 0.0});
    }
  std::vector<double> amp(modes.size()), phase(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    amp[k] = rng.gaussian();
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = step * i, y = step * j;
      double v = 0;
      for (std::size_t k = 0; k < modes.size(); ++k)
        v += amp[k] * std::cos(modes[k][0] * x + modes[k][1] * y + phase[k]);
      out.at(i, j) = v;
    }
  // Cosine modes with nonzero frequency have zero grid mean already; remove
  // the residual rounding drift.
  const double mean = out.mean();
  for (double& v : out.values()) v -= mean;
  return out;
}

// Admissible field construction: scale a zero-mean source so its minimum is
// -c, solve for the potential, then shift the max to zero. By construction
// Lap phi >= -c and max phi = 0.
inline TorusField random_admissible_field(int m, double c, int band, CounterRng& rng) {
  TorusField source = random_band_limited(m, band, rng);
  const double low = source.min();
  if (low >= 0) throw std::logic_error("random source is one-sided");
  const double scale = c / (-low);
  for (double& v : source.values()) v *= scale;
  TorusField phi = green_apply(source);
  const double top = phi.max();
  for (double& v : phi.values()) v -= top;
  return phi;
}

inline nlohmann::ordered_json to_json(const BoundReport& rep) {
  return nlohmann::ordered_json{{"check", "torus_lower_bound"},
                                {"precondition_ok", rep.precondition_ok},
                                {"max_zero_ok", rep.max_zero_ok},
                                {"laplacian_ok", rep.laplacian_ok},
                                {"c", rep.c},
                                {"bound_constant", rep.bound_constant},
                                {"integral", rep.integral},
                                {"margin", rep.margin},
                                {"chain_gap", rep.chain_gap},
                                {"holds", rep.holds}};
}

}  // namespace alphalab::green
