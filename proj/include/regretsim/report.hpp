#ifndef REGRETSIM_REPORT_HPP
#define REGRETSIM_REPORT_HPP

#include <vector>

namespace regretsim {

// Outcome of one regret measurement against its theoretical bound.
// For deterministic runs std_error and ci_halfwidth are zero and the
// violation test is measured > bound + slack. For Monte Carlo runs the
// one-sided test is (measured - 3 * std_error) > bound + slack, since
// the bound constrains an expectation.
struct RegretReport {
  double measured_regret = 0.0;
  double theoretical_bound = 0.0;
  int best_comparator_index = 0;
  bool bound_violated = false;
  double ci_halfwidth = 0.0;  // 95% half-width (1.96 * std_error)
  double std_error = 0.0;
  double slack = 0.0;  // quadrature / discretization allowance used
};

// Running regret estimate sampled on a fixed-size subgrid, for plotting.
struct RegretCurve {
  std::vector<double> time;
  std::vector<double> regret;
};

inline constexpr int kCurvePoints = 100;

}  // namespace regretsim

#endif  // REGRETSIM_REPORT_HPP
