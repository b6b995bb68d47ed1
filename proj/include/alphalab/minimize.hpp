#pragma once

#include <functional>
#include <span>
#include <vector>

namespace alphalab {

// Derivative-free coordinate pattern search. Polls +-step along each axis,
// restarting the sweep from any improving point, and halves the step when a
// full sweep fails. Deterministic; intended for smooth strictly convex
// objectives where it converges to the minimizer at roughly the final step
// scale.
inline std::vector<double> pattern_minimize(
    const std::function<double(std::span<const double>)>& objective, std::vector<double> x,
    double step, double final_step, int max_sweeps = 100000) {
  double fx = objective(x);
  while (step > final_step && max_sweeps-- > 0) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double saved = x[i];
      for (const double delta : {step, -step}) {
        x[i] = saved + delta;
        const double ft = objective(x);
        if (ft < fx) {
          fx = ft;
          improved = true;
          break;
        }
        x[i] = saved;
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

}  // namespace alphalab
