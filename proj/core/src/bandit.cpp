#include "mcnsim/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mcnsim {

BanditState::BanditState(std::size_t num_arms, double sigma, std::uint64_t rng_seed,
                         UcbIndex index)
    : pulls_(num_arms, 0),
      reward_sum_(num_arms, 0.0),
      sigma_(sigma),
      rng_seed_(rng_seed),
      index_(index) {
  if (num_arms == 0) throw Error(ErrorKind::kInvalidInput, "bandit needs at least one arm");
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorKind::kInvalidInput, "sigma must be finite and >= 0");
  }
}

double BanditState::mean(CoreId arm) const {
  const auto n = pulls(arm);
  return n == 0 ? 0.0 : reward_sum_[arm] / static_cast<double>(n);
}

double BanditState::ucb_index(CoreId arm) const {
  const double n = static_cast<double>(pulls(arm));
  const double bonus = sigma_ * std::sqrt(std::log(static_cast<double>(total_plays_)) / n);
  const double base = index_ == UcbIndex::kMean ? reward_sum_[arm] / n : reward_sum_[arm];
  return base + bonus;
}

void BanditState::record_reward(CoreId arm, double x) {
  if (arm >= pulls_.size()) {
    throw Error(ErrorKind::kArmOutOfRange,
                "arm " + std::to_string(arm) + " >= " + std::to_string(pulls_.size()));
  }
  ++pulls_[arm];
  reward_sum_[arm] += x;
  ++total_plays_;
}

CoreId select_arm(const BanditState& s, std::span<const CoreId> candidates) {
  const std::size_t count = candidates.empty() ? s.num_arms() : candidates.size();
  const auto arm_at = [&](std::size_t i) { return candidates.empty() ? i : candidates[i]; };
  for (std::size_t i = 0; i < count; ++i) {
    if (s.pulls(arm_at(i)) == 0) return arm_at(i);
  }
  CoreId best = arm_at(0);
  double best_index = s.ucb_index(best);
  for (std::size_t i = 1; i < count; ++i) {
    const double v = s.ucb_index(arm_at(i));
    if (v > best_index) {
      best_index = v;
      best = arm_at(i);
    }
  }
  return best;
}

double regret(double policy_reward, std::span<const double> per_arm_rewards) {
  if (per_arm_rewards.empty()) {
    throw Error(ErrorKind::kInvalidInput, "regret needs at least one fixed-arm reward");
  }
  return *std::max_element(per_arm_rewards.begin(), per_arm_rewards.end()) - policy_reward;
}

std::optional<double> fixed_arm_reward(const TaskGraph& g, const Platform& p, CoreId core,
                                       const RewardWeights& w) {
  for (TaskId t = 0; t < g.num_tasks(); ++t) {
    if (!g.runnable(t, core)) return std::nullopt;
  }
  Schedule s(g, p);
  double total = 0.0;
  for (TaskId t : g.topological_order()) {
    const Placement pl = s.probe(t, core);
    total += reward(placement_cost(pl, p, w));
    s.commit(pl);
  }
  return total;
}

namespace {

// Chooses arms for one task. Global scope: a single bandit. Per-node scope: a
// bandit over nodes picks the node, that node's bandit picks the core.
class ArmChooser {
 public:
  ArmChooser(const TaskGraph& g, const Platform& p, const MabOptions& o)
      : g_(g), p_(p), scope_(o.scope), global_(p.num_cores(), o.sigma, o.seed, o.index),
        nodes_(p.mesh.nodes(), o.sigma, o.seed, o.index) {
    if (scope_ == BanditScope::kPerNode) {
      per_node_.reserve(p.mesh.nodes());
      for (std::size_t n = 0; n < p.mesh.nodes(); ++n) {
        per_node_.emplace_back(p.cores_per_node, o.sigma, o.seed, o.index);
      }
    }
  }

  CoreId choose(TaskId task) {
    if (scope_ == BanditScope::kGlobal) {
      candidates_.clear();
      for (CoreId k = 0; k < p_.num_cores(); ++k) {
        if (g_.runnable(task, k)) candidates_.push_back(k);
      }
      return select_arm(global_, candidates_);
    }
    const std::size_t cpn = p_.cores_per_node;
    node_candidates_.clear();
    for (std::size_t n = 0; n < p_.mesh.nodes(); ++n) {
      for (std::size_t i = 0; i < cpn; ++i) {
        if (g_.runnable(task, n * cpn + i)) {
          node_candidates_.push_back(n);
          break;
        }
      }
    }
    const std::size_t node = select_arm(nodes_, node_candidates_);
    candidates_.clear();
    for (std::size_t i = 0; i < cpn; ++i) {
      if (g_.runnable(task, node * cpn + i)) candidates_.push_back(i);
    }
    return node * cpn + select_arm(per_node_[node], candidates_);
  }

  void record(CoreId core, double x) {
    if (scope_ == BanditScope::kGlobal) {
      global_.record_reward(core, x);
      return;
    }
    const std::size_t node = core / p_.cores_per_node;
    nodes_.record_reward(node, x);
    per_node_[node].record_reward(core % p_.cores_per_node, x);
  }

 private:
  const TaskGraph& g_;
  const Platform& p_;
  BanditScope scope_;
  BanditState global_;
  BanditState nodes_;
  std::vector<BanditState> per_node_;
  std::vector<CoreId> candidates_;
  std::vector<CoreId> node_candidates_;
};

}  // namespace

MabResult run_mab(const TaskGraph& g, const Platform& p, const MabOptions& options) {
  if (options.iterations == 0) throw Error(ErrorKind::kInvalidInput, "iterations must be >= 1");
  check_compatible(g, p);

  MabResult result;
  // The task sequence is the same topological order every iteration, so the
  // fixed-arm comparators are computed once.
  for (CoreId k = 0; k < p.num_cores(); ++k) {
    if (auto j = fixed_arm_reward(g, p, k, options.weights)) result.fixed_arm_rewards.push_back(*j);
  }
  // Without any feasible fixed arm the comparator is zero and regret reduces
  // to the iteration's total cost.
  const std::vector<double> comparator =
      result.fixed_arm_rewards.empty() ? std::vector<double>{0.0} : result.fixed_arm_rewards;

  ArmChooser chooser(g, p, options);
  Schedule schedule(g, p);
  std::vector<Assignment> sequence;
  sequence.reserve(g.num_tasks());
  RegretLedger& ledger = result.ledger;
  std::size_t since_improvement = 0;

  for (std::size_t itr = 0; itr < options.iterations; ++itr) {
    schedule.reset();
    sequence.clear();
    double policy_reward = 0.0;
    for (TaskId t : g.topological_order()) {
      const CoreId arm = chooser.choose(t);
      const Placement pl = schedule.probe(t, arm);
      const double x = reward(placement_cost(pl, p, options.weights));
      chooser.record(arm, x);
      schedule.commit(pl);
      sequence.push_back({t, arm});
      policy_reward += x;
    }
    const double delta = regret(policy_reward, comparator);
    ledger.per_iteration_regret.push_back(delta);
    ledger.per_iteration_reward.push_back(policy_reward);
    const bool improved = delta < ledger.best_regret;
    if (delta <= ledger.best_regret) {
      ledger.best_regret = delta;
      ledger.best_iteration = itr;
      ledger.best_sequence = allocation_from("mab", sequence, schedule);
    }
    ledger.best_regret_trace.push_back(ledger.best_regret);
    since_improvement = improved ? 0 : since_improvement + 1;
    if (options.plateau > 0 && since_improvement >= options.plateau) break;
  }
  result.allocation = ledger.best_sequence;
  return result;
}

}  // namespace mcnsim
