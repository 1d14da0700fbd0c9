#pragma once

#include <span>

#include "mcnsim/appmodel.hpp"
#include "mcnsim/platform.hpp"

namespace mcnsim {

/// Weights of the finish-time, resource and power terms of the allocation cost.
class RewardWeights {
 public:
  /// Defaults tuned on the bundled synthetic workloads.
  RewardWeights() = default;
  /// Throws `Error(kInvalidInput)` unless all weights are >= 0 with a positive sum.
  RewardWeights(double h1, double h2, double h3);

  double h1() const noexcept { return h1_; }
  double h2() const noexcept { return h2_; }
  double h3() const noexcept { return h3_; }

  bool operator==(const RewardWeights&) const = default;

 private:
  double h1_ = 1.0;
  double h2_ = 0.5;
  double h3_ = 0.5;
};

struct CostBreakdown {
  Time eft_cost = 0.0;
  double resource_cost = 0.0;
  double power_cost = 0.0;  // watts
  double total = 0.0;       // h1*eft + h2*resource + h3*power
};

/// Computation plus communication resource cost of running a task on `core`:
/// `eft * eta[core] + zeta_comm * sum(pred_comms)`.
double resource_cost(CoreId core, Time eft_value, std::span<const Time> pred_comms,
                     const Platform& p);
double resource_cost(CoreId core, Time eft_value, Time comm_sum, const Platform& p);

/// Instantaneous draw: static power always, dynamic power only when `active`.
double power_draw(const PowerParams& params, bool active);

CostBreakdown cost_breakdown(Time eft_value, double resource, double power,
                             const RewardWeights& w);

/// Full cost of a candidate placement; the chosen core is active.
CostBreakdown placement_cost(const Placement& pl, const Platform& p, const RewardWeights& w);

/// Negated weighted cost, so maximising reward minimises cost.
double reward(const CostBreakdown& costs);
double reward(Time eft_value, double resource, double power, const RewardWeights& w);

}  // namespace mcnsim
