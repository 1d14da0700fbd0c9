#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mcnsim/allocation.hpp"
#include "mcnsim/bandit.hpp"
#include "mcnsim/costs.hpp"

namespace mcnsim {

/// Memory node holding each task's dominant data.
class AffinityMap {
 public:
  AffinityMap() = default;
  explicit AffinityMap(std::vector<NodeCoord> nodes) : nodes_(std::move(nodes)) {}

  /// Every task on `node`.
  static AffinityMap uniform(std::size_t num_tasks, NodeCoord node);

  /// Entry tasks are hashed onto nodes; every other task inherits the node of
  /// the predecessor sending it the most bytes (lowest id on ties).
  static AffinityMap derive(const TaskGraph& g, const Platform& p, std::uint64_t salt = 0);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<NodeCoord>& nodes() const noexcept { return nodes_; }
  NodeCoord at(TaskId task) const;

  /// Throws `Error(kMissingAffinity)` if a task is unmapped, `kInvalidInput`
  /// for nodes outside the mesh.
  void validate(const TaskGraph& g, const Platform& p) const;

 private:
  std::vector<NodeCoord> nodes_;
};

enum class Strategy { kRandom, kGrouped, kGreedy, kMab };

std::string_view to_string(Strategy s);
/// Throws `Error(kInvalidInput)` for unknown names.
Strategy parse_strategy(std::string_view name);

/// Each task goes to a uniformly drawn core among those idle when its inputs
/// are produced, or among all runnable cores when none is idle. Draws are
/// counter-based on (seed, task).
Allocation allocate_random(const TaskGraph& g, const Platform& p, std::uint64_t seed);

/// Each task goes to the lowest-id idle core of its affinity node, else to the
/// node's earliest-available core. Never leaves the node.
Allocation allocate_grouped(const TaskGraph& g, const Platform& p, const AffinityMap& affinity);

/// Each task goes to the core with the smallest finish time as seen at
/// dispatch: input arrival plus execution time. Core backlogs are not
/// consulted when choosing, so fast cores accumulate queues.
Allocation allocate_greedy(const TaskGraph& g, const Platform& p, const RewardWeights& w);

MabResult allocate_mab(const TaskGraph& g, const Platform& p, const MabOptions& options);

struct StrategyParams {
  std::uint64_t seed = 0;
  MabOptions mab;
  std::optional<AffinityMap> affinity;  // grouped: derived when absent
};

struct StrategyOutput {
  Allocation allocation;
  std::optional<RegretLedger> ledger;  // mab only
};

StrategyOutput allocate(Strategy strategy, const TaskGraph& g, const Platform& p,
                        const StrategyParams& params);

}  // namespace mcnsim
