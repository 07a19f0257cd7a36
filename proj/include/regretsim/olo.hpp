#ifndef REGRETSIM_OLO_HPP
#define REGRETSIM_OLO_HPP

#include <vector>

#include "regretsim/legendre.hpp"
#include "regretsim/numerics.hpp"
#include "regretsim/report.hpp"
#include "regretsim/rewards.hpp"

// Online linear optimization with full information: continuous-time
// follow-the-regularized-leader (deterministic, no noise) measured
// against the ln(d)/beta bound, plus the discrete-time FTRL baseline.

namespace regretsim {

struct OloRunConfig {
  int d;
  double horizon;
  Temperature beta;
  TimeGrid grid;
  RewardPath path;

  void validate() const;
};

enum class OloMode { kContinuous, kDiscrete };

// Default beta for the continuous mode, where the bound ln(d)/beta
// shrinks as beta grows.
inline constexpr double kContinuousOloBeta = 1e3;

// sqrt(2 ln d / T) for discrete rounds; the configured large constant
// for continuous time.
double beta_schedule_olo(int d, double horizon, OloMode mode);

// Deterministic continuous-time FTRL: x(t_i) = grad_G(s(t_i)) with s the
// cumulative reward, regret measured against the best simplex vertex.
// Optionally records the running regret on the plotting subgrid.
RegretReport run_continuous_ftrl(const OloRunConfig& cfg,
                                 RegretCurve* curve = nullptr);

// Discrete FTRL over T_rounds with rewards in [0,1]^d:
// x_t = grad_G(sum_{z<t} r_z), bound sqrt(2 T ln d).
RegretReport run_discrete_ftrl(int d, int t_rounds, Temperature beta,
                               const std::vector<Vector>& rewards,
                               RegretCurve* curve = nullptr);

}  // namespace regretsim

#endif  // REGRETSIM_OLO_HPP
