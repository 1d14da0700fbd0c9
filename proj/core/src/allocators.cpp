#include "mcnsim/allocators.hpp"

#include <limits>
#include <string>

#include "mcnsim/rng.hpp"

namespace mcnsim {
namespace {

constexpr std::uint64_t kRandomStream = 0x52414e44;    // "RAND"
constexpr std::uint64_t kAffinityStream = 0x41464e54;  // "AFNT"

}  // namespace

AffinityMap AffinityMap::uniform(std::size_t num_tasks, NodeCoord node) {
  return AffinityMap(std::vector<NodeCoord>(num_tasks, node));
}

AffinityMap AffinityMap::derive(const TaskGraph& g, const Platform& p, std::uint64_t salt) {
  std::vector<NodeCoord> nodes(g.num_tasks());
  for (TaskId t : g.topological_order()) {
    const auto in = g.in_edges(t);
    if (in.empty()) {
      nodes[t] = node_at(counter_draw(salt, kAffinityStream, t) % p.mesh.nodes(), p);
      continue;
    }
    const Edge* dominant = &in.front();
    for (const Edge& e : in) {
      if (e.bytes > dominant->bytes) dominant = &e;
    }
    nodes[t] = nodes[dominant->src];
  }
  return AffinityMap(std::move(nodes));
}

NodeCoord AffinityMap::at(TaskId task) const {
  if (task >= nodes_.size()) {
    throw Error(ErrorKind::kMissingAffinity, "no affinity for task " + std::to_string(task));
  }
  return nodes_[task];
}

void AffinityMap::validate(const TaskGraph& g, const Platform& p) const {
  if (nodes_.size() < g.num_tasks()) {
    throw Error(ErrorKind::kMissingAffinity, "affinity covers " + std::to_string(nodes_.size()) +
                                                 " of " + std::to_string(g.num_tasks()) +
                                                 " tasks");
  }
  for (const NodeCoord& n : nodes_) {
    if (n.row >= p.mesh.rows || n.col >= p.mesh.cols) {
      throw Error(ErrorKind::kInvalidInput, "affinity node outside the mesh");
    }
  }
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kRandom: return "random";
    case Strategy::kGrouped: return "grouped";
    case Strategy::kGreedy: return "greedy";
    case Strategy::kMab: return "mab";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::kRandom, Strategy::kGrouped, Strategy::kGreedy, Strategy::kMab}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::kInvalidInput, "unknown strategy '" + std::string(name) + "'");
}

Allocation allocate_random(const TaskGraph& g, const Platform& p, std::uint64_t seed) {
  Schedule s(g, p);
  std::vector<Assignment> seq;
  std::vector<CoreId> idle;
  std::vector<CoreId> runnable;
  for (TaskId t : g.topological_order()) {
    const Time ready = s.data_ready(t);
    idle.clear();
    runnable.clear();
    for (CoreId k = 0; k < p.num_cores(); ++k) {
      if (!g.runnable(t, k)) continue;
      runnable.push_back(k);
      if (s.avail(k) <= ready) idle.push_back(k);
    }
    const auto& pool = idle.empty() ? runnable : idle;
    const std::uint64_t draw = counter_draw(seed, kRandomStream, t);
    const CoreId core = pool[static_cast<std::size_t>(to_unit(draw) * static_cast<double>(pool.size()))];
    s.place(t, core);
    seq.push_back({t, core});
  }
  return allocation_from("random", seq, s);
}

Allocation allocate_grouped(const TaskGraph& g, const Platform& p, const AffinityMap& affinity) {
  affinity.validate(g, p);
  Schedule s(g, p);
  std::vector<Assignment> seq;
  for (TaskId t : g.topological_order()) {
    const CoreId first = node_index(affinity.at(t), p) * p.cores_per_node;
    const Time ready = s.data_ready(t);
    std::optional<CoreId> idle;
    std::optional<CoreId> earliest;
    for (CoreId k = first; k < first + p.cores_per_node; ++k) {
      if (!g.runnable(t, k)) continue;
      if (!idle && s.avail(k) <= ready) idle = k;
      if (!earliest || s.avail(k) < s.avail(*earliest)) earliest = k;
    }
    if (!earliest) {
      throw Error(ErrorKind::kInvalidInput,
                  "no core on the affinity node of task " + std::to_string(t) + " can run it");
    }
    const CoreId core = idle.value_or(*earliest);
    s.place(t, core);
    seq.push_back({t, core});
  }
  return allocation_from("grouped", seq, s);
}

Allocation allocate_greedy(const TaskGraph& g, const Platform& p,
                           [[maybe_unused]] const RewardWeights& w) {
  Schedule s(g, p);
  std::vector<Assignment> seq;
  for (TaskId t : g.topological_order()) {
    CoreId best = 0;
    Time best_finish = std::numeric_limits<Time>::infinity();
    for (CoreId k = 0; k < p.num_cores(); ++k) {
      if (!g.runnable(t, k)) continue;
      const Time finish = s.input_ready(t, k) + g.exec_time(t, k);
      if (finish < best_finish) {
        best_finish = finish;
        best = k;
      }
    }
    s.place(t, best);
    seq.push_back({t, best});
  }
  return allocation_from("greedy", seq, s);
}

MabResult allocate_mab(const TaskGraph& g, const Platform& p, const MabOptions& options) {
  return run_mab(g, p, options);
}

StrategyOutput allocate(Strategy strategy, const TaskGraph& g, const Platform& p,
                        const StrategyParams& params) {
  check_compatible(g, p);
  switch (strategy) {
    case Strategy::kRandom: return {allocate_random(g, p, params.seed), std::nullopt};
    case Strategy::kGrouped: {
      const AffinityMap affinity =
          params.affinity ? *params.affinity : AffinityMap::derive(g, p, params.seed);
      return {allocate_grouped(g, p, affinity), std::nullopt};
    }
    case Strategy::kGreedy: return {allocate_greedy(g, p, params.mab.weights), std::nullopt};
    case Strategy::kMab: {
      MabOptions options = params.mab;
      options.seed = params.seed;
      MabResult r = run_mab(g, p, options);
      return {std::move(r.allocation), std::move(r.ledger)};
    }
  }
  throw Error(ErrorKind::kInvalidInput, "unknown strategy");
}

}  // namespace mcnsim
