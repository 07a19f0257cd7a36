#ifndef REGRETSIM_MC_HPP
#define REGRETSIM_MC_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "regretsim/report.hpp"

namespace regretsim {

struct McSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean and standard error of per-path values, accumulated in index
// order so the result never depends on how paths were scheduled.
inline McSummary summarize_paths(const std::vector<double>& values) {
  McSummary out;
  const auto n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (const double v : values) sum += v;
  out.mean = sum / double(n);
  if (n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / double(n - 1) / double(n));
  }
  return out;
}

// Step indices (1-based step counts) at which the plotting curve is
// sampled: roughly kCurvePoints evenly spaced, always ending at `steps`.
inline std::vector<std::int64_t> curve_checkpoint_steps(std::int64_t steps) {
  const std::int64_t every = steps / kCurvePoints > 0 ? steps / kCurvePoints : 1;
  std::vector<std::int64_t> out;
  for (std::int64_t c = every; c < steps; c += every) out.push_back(c);
  out.push_back(steps);
  return out;
}

}  // namespace regretsim

#endif  // REGRETSIM_MC_HPP
