#ifndef REGRETSIM_REWARDS_HPP
#define REGRETSIM_REWARDS_HPP

#include <string>
#include <vector>

#include "regretsim/numerics.hpp"
#include "regretsim/types.hpp"

// Oblivious adversary model: a deterministic reward path r(t) in [0,1]^d
// fixed before the run, with built-in generators and a CSV schedule
// format for piecewise-constant paths.

namespace regretsim {

// Piecewise-constant reward values over right-open intervals
// [breakpoints[i], breakpoints[i+1]). The first breakpoint must be 0.
struct RewardSchedule {
  std::vector<double> breakpoints;
  std::vector<Vector> values;

  int dim() const { return values.empty() ? 0 : int(values.front().size()); }
  void validate(double horizon) const;
};

// Parses the CSV form (header `t,r_1,...,r_d`, rows sorted by t).
// Throws parse_error naming the offending 1-based row.
RewardSchedule load_schedule(const std::string& csv_text);

// Inverse of load_schedule; evaluations round-trip exactly.
std::string serialize_schedule(const RewardSchedule& schedule);

class RewardPath {
 public:
  enum class Kind { kConstant, kPiecewiseConstant, kSinusoid };

  static RewardPath constant(Vector values, double horizon);
  // r_a(t) = (1 + sin(omega_a t + phase_a)) / 2, always in [0, 1].
  static RewardPath sinusoid(Vector omega, Vector phase, double horizon);
  static RewardPath piecewise(RewardSchedule schedule, double horizon);
  static RewardPath from_csv(const std::string& csv_text, double horizon);

  // r(t), componentwise in [0, 1]; t must lie in [0, T].
  Vector eval(double t) const;

  // s(t) = integral of r over [0, t] as a left Riemann sum on the grid;
  // exact for piecewise-constant paths whose breakpoints align with it.
  Vector cumulative(double t, const TimeGrid& grid) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double horizon() const { return horizon_; }
  const RewardSchedule& schedule() const;

 private:
  RewardPath(Kind kind, int dim, double horizon)
      : kind_(kind), dim_(dim), horizon_(horizon) {}

  Kind kind_;
  int dim_;
  double horizon_;
  Vector constant_;
  Vector omega_;
  Vector phase_;
  RewardSchedule schedule_;
};

}  // namespace regretsim

#endif  // REGRETSIM_REWARDS_HPP
