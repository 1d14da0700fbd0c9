#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcnsim/allocators.hpp"
#include "mcnsim/engine.hpp"

namespace mcnsim {

enum class WorkloadKind {
  kDataParallel,   // independent blocks, no communication
  kPipeline,       // independent queries, each a chain of five stages
  kFineGrained,    // dense DAG, heavy edges, short tasks
  kLayeredRandom,  // layers with random edges between consecutive layers
};

std::string_view to_string(WorkloadKind kind);
/// Throws `Error(kInvalidSpec)`.
WorkloadKind parse_workload_kind(std::string_view name);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kLayeredRandom;
  std::size_t num_tasks = 64;     // ignored by pipeline (queries * 5)
  std::size_t queries = 4;        // pipeline chains
  std::size_t depth = 8;          // layered_random layers
  double edge_probability = 0.3;  // fine_grained / layered_random density
  double data_volume_scale = 256.0;
  std::pair<Time, Time> exec_time_range{10.0, 100.0};
  double heterogeneity_factor = 2.0;  // fastest core is this much faster than the slowest
  std::uint64_t seed = 0;

  /// Per-kind default scales: fine-grained work is short and communication
  /// heavy, data-parallel work is long and communication free.
  static WorkloadSpec defaults(WorkloadKind kind);

  /// Throws `Error(kInvalidSpec)`.
  void validate() const;
};

inline constexpr std::size_t kPipelineStages = 5;

/// Deterministic for a given spec (including seed) and core count.
TaskGraph generate(const WorkloadSpec& spec, std::size_t num_cores);
TaskGraph generate(const WorkloadSpec& spec, const Platform& p);

/// Per-core speed factors in [1, heterogeneity_factor], drawn from the seed.
std::vector<double> core_speeds(const WorkloadSpec& spec, std::size_t num_cores);

/// Mean computation time over (task, core) divided by mean cross-core
/// transfer time over edges. Infinite when the graph has no edges.
double granularity(const TaskGraph& g, const Platform& p);

/// One named workload of an experiment grid.
struct NamedWorkload {
  std::string name;
  WorkloadSpec spec;
  std::optional<NodeCoord> affinity_node;  // pin every task's affinity to one node
};

struct ExperimentConfig {
  std::string name = "experiment";
  Platform platform = Platform::default_mcn();
  std::vector<NamedWorkload> workloads;
  std::vector<Strategy> strategies;
  std::vector<std::uint64_t> seeds;
  MabOptions mab;
  std::size_t parallel = 1;

  /// Throws `Error(kInvalidInput)` for empty grids.
  void validate() const;
};

struct ExperimentRow {
  std::string workload;
  std::uint64_t seed = 0;
  RunReport report;
};

/// Graph seed for a run: the workload's own seed mixed with the run seed.
std::uint64_t instance_seed(const WorkloadSpec& spec, std::uint64_t run_seed);

/// Generates one instance and runs one strategy on it.
RunReport run_cell(const NamedWorkload& workload, Strategy strategy, std::uint64_t seed,
                   const Platform& p, const MabOptions& mab);

/// Full (workload x strategy x seed) cross product, rows in that nesting
/// order regardless of `parallel`. On the first failing cell no new cells
/// start; `on_partial` receives the rows finished before it (in order) and
/// the error is rethrown.
std::vector<ExperimentRow> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const std::vector<ExperimentRow>&)>& on_partial = {});

struct SummaryRow {
  std::string workload;
  ComparisonRow comparison;
  std::size_t runs = 0;
};

/// Per-workload means, normalised against random when it was run.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);

}  // namespace mcnsim
