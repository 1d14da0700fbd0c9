#include "mcnsim/costs.hpp"

#include <cmath>

namespace mcnsim {

RewardWeights::RewardWeights(double h1, double h2, double h3) : h1_(h1), h2_(h2), h3_(h3) {
  const auto ok = [](double h) { return std::isfinite(h) && h >= 0.0; };
  if (!ok(h1) || !ok(h2) || !ok(h3)) {
    throw Error(ErrorKind::kInvalidInput, "reward weights must be finite and >= 0");
  }
  if (h1 + h2 + h3 <= 0.0) {
    throw Error(ErrorKind::kInvalidInput, "reward weights must not all be zero");
  }
}

double resource_cost(CoreId core, Time eft_value, Time comm_sum, const Platform& p) {
  return eft_value * p.comp_cost_rate[core] + comm_sum * p.comm_cost_rate;
}

double resource_cost(CoreId core, Time eft_value, std::span<const Time> pred_comms,
                     const Platform& p) {
  Time sum = 0.0;
  for (Time c : pred_comms) sum += c;
  return resource_cost(core, eft_value, sum, p);
}

double power_draw(const PowerParams& params, bool active) {
  return params.static_watts() + (active ? params.dynamic_watts() : 0.0);
}

CostBreakdown cost_breakdown(Time eft_value, double resource, double power,
                             const RewardWeights& w) {
  return {eft_value, resource, power, w.h1() * eft_value + w.h2() * resource + w.h3() * power};
}

CostBreakdown placement_cost(const Placement& pl, const Platform& p, const RewardWeights& w) {
  return cost_breakdown(pl.eft, resource_cost(pl.core, pl.eft, pl.comm_sum, p),
                        power_draw(p.power[pl.core], true), w);
}

double reward(const CostBreakdown& costs) { return -costs.total; }

double reward(Time eft_value, double resource, double power, const RewardWeights& w) {
  return reward(cost_breakdown(eft_value, resource, power, w));
}

}  // namespace mcnsim
