#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mcnsim/allocation.hpp"
#include "mcnsim/costs.hpp"

namespace mcnsim {

enum class UcbIndex {
  kMean,        // reward_sum / pulls + sigma * sqrt(ln q / n)
  kCumulative,  // reward_sum + sigma * sqrt(ln q / n), as literally printed
};

/// Per-arm statistics of an upper-confidence-bound bandit. One arm per core.
class BanditState {
 public:
  BanditState(std::size_t num_arms, double sigma, std::uint64_t rng_seed = 0,
              UcbIndex index = UcbIndex::kMean);

  std::size_t num_arms() const noexcept { return pulls_.size(); }
  std::uint64_t pulls(CoreId arm) const { return pulls_.at(arm); }
  double reward_sum(CoreId arm) const { return reward_sum_.at(arm); }
  double mean(CoreId arm) const;
  std::uint64_t total_plays() const noexcept { return total_plays_; }
  double sigma() const noexcept { return sigma_; }
  std::uint64_t rng_seed() const noexcept { return rng_seed_; }
  UcbIndex index_kind() const noexcept { return index_; }

  /// UCB index of an arm that has been pulled at least once.
  double ucb_index(CoreId arm) const;

  /// Throws `Error(kArmOutOfRange)`.
  void record_reward(CoreId arm, double x);

 private:
  std::vector<std::uint64_t> pulls_;
  std::vector<double> reward_sum_;
  std::uint64_t total_plays_ = 0;
  double sigma_;
  std::uint64_t rng_seed_;
  UcbIndex index_;
};

/// Lowest-id unpulled arm while any remains (warm-up), else the arm with the
/// largest UCB index, lowest id on ties. When `candidates` is non-empty only
/// those arms (ascending ids) are considered.
CoreId select_arm(const BanditState& s, std::span<const CoreId> candidates = {});

/// Regret of a policy against the best fixed arm: `max_j(J_j) - J_policy`.
/// Negative when the policy outperforms every fixed arm.
/// Throws `Error(kInvalidInput)` when `per_arm_rewards` is empty.
double regret(double policy_reward, std::span<const double> per_arm_rewards);

struct RegretLedger {
  double best_regret = std::numeric_limits<double>::infinity();
  std::size_t best_iteration = 0;
  Allocation best_sequence;
  std::vector<double> per_iteration_regret;
  std::vector<double> best_regret_trace;  // best_regret after each iteration
  std::vector<double> per_iteration_reward;
};

enum class BanditScope {
  kGlobal,   // one bandit over all cores
  kPerNode,  // a bandit over nodes, then one over the chosen node's cores
};

struct MabOptions {
  RewardWeights weights;
  double sigma = 2.0;
  std::size_t iterations = 200;
  std::uint64_t seed = 0;
  BanditScope scope = BanditScope::kGlobal;
  UcbIndex index = UcbIndex::kMean;
  // Stop after this many iterations without a strict best-regret improvement; 0 disables.
  std::size_t plateau = 0;
};

struct MabResult {
  Allocation allocation;
  RegretLedger ledger;
  std::vector<double> fixed_arm_rewards;  // one entry per feasible core
};

/// Cumulative reward of placing every task, in topological order, on `core`.
/// Empty when some task cannot run there.
std::optional<double> fixed_arm_reward(const TaskGraph& g, const Platform& p, CoreId core,
                                       const RewardWeights& w);

/// Iterated UCB allocation with regret bookkeeping. Each iteration schedules
/// all tasks in topological order, one arm pull per task, on a fresh schedule;
/// the bandit statistics persist across iterations. The returned allocation is
/// the sequence of the iteration with the lowest regret (ties: latest).
MabResult run_mab(const TaskGraph& g, const Platform& p, const MabOptions& options);

}  // namespace mcnsim
