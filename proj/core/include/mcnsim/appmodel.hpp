#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mcnsim/platform.hpp"
#include "mcnsim/types.hpp"

namespace mcnsim {

struct Edge {
  TaskId src = 0;
  TaskId dst = 0;
  double bytes = 0.0;

  bool operator==(const Edge&) const = default;
};

/// Kahn's algorithm; among ready tasks the lowest id goes first.
/// Throws `Error(kCycleDetected)`.
std::vector<TaskId> topological_order(std::size_t num_tasks, std::span<const Edge> edges);

/// Static application DAG with its execution-time matrix (Q x N) and the
/// per-edge data volumes. Immutable once constructed.
///
/// An execution time of zero marks the core as unable to run the task; every
/// task must be runnable on at least one core.
class TaskGraph {
 public:
  TaskGraph() = default;

  /// Validates all invariants; throws `Error(kInvalidInput)` or
  /// `Error(kCycleDetected)`.
  TaskGraph(std::size_t num_tasks, std::vector<Edge> edges, Matrix exec_time);

  std::size_t num_tasks() const noexcept { return num_tasks_; }
  std::size_t num_cores() const noexcept { return exec_time_.cols(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Matrix& exec_time_matrix() const noexcept { return exec_time_; }
  Time exec_time(TaskId task, CoreId core) const { return exec_time_(task, core); }
  bool runnable(TaskId task, CoreId core) const { return exec_time_(task, core) > 0.0; }

  /// Bytes sent from `src` to `dst`; zero when there is no edge.
  double data_volume(TaskId src, TaskId dst) const;
  std::optional<double> edge_bytes(TaskId src, TaskId dst) const;
  bool has_edge(TaskId src, TaskId dst) const { return edge_bytes(src, dst).has_value(); }
  Matrix data_volume_matrix() const;

  /// Incoming edges of `task` (edge.dst == task), ordered by source id.
  std::span<const Edge> in_edges(TaskId task) const { return in_edges_[task]; }
  /// Outgoing edges of `task` (edge.src == task), ordered by destination id.
  std::span<const Edge> out_edges(TaskId task) const { return out_edges_[task]; }

  std::vector<TaskId> predecessors(TaskId task) const;
  std::vector<TaskId> successors(TaskId task) const;
  std::vector<TaskId> entry_tasks() const;
  std::vector<TaskId> exit_tasks() const;

  const std::vector<TaskId>& topological_order() const noexcept { return topo_; }

 private:
  std::size_t num_tasks_ = 0;
  std::vector<Edge> edges_;
  Matrix exec_time_;
  std::vector<std::vector<Edge>> in_edges_;
  std::vector<std::vector<Edge>> out_edges_;
  std::vector<TaskId> topo_;
};

struct TaskTiming {
  TaskId task = 0;
  CoreId core = 0;
  Time est = 0.0;
  Time eft = 0.0;
  Time ast = 0.0;
  Time aft = 0.0;

  bool operator==(const TaskTiming&) const = default;
};

/// Transfer time of edge (src_task -> dst_task) when the tasks run on
/// `src_core` and `dst_core`: zero on the same core, otherwise the sender's
/// startup latency plus bytes over the pairwise transfer rate.
/// Throws `Error(kMissingEdge)`.
Time comm_time(TaskId src_task, TaskId dst_task, CoreId src_core, CoreId dst_core,
               const TaskGraph& g, const Platform& p);

/// Earliest start of `task` on `core`: the later of the core's ready time and
/// the arrival of the last predecessor's data. `timings` is indexed by task.
/// Throws `Error(kUnscheduledPredecessor)`.
Time est(TaskId task, CoreId core, const TaskGraph& g, const Platform& p,
         std::span<const std::optional<TaskTiming>> timings, std::span<const Time> avail);

/// Earliest finish: execution time on `core` plus `est_value`.
/// Throws `Error(kInvalidInput)` if the task cannot run on `core`.
Time eft(TaskId task, CoreId core, Time est_value, const TaskGraph& g);

/// Result of evaluating one (task, core) pair against a partial schedule.
struct Placement {
  TaskId task = 0;
  CoreId core = 0;
  Time est = 0.0;
  Time eft = 0.0;
  Time comm_sum = 0.0;  // sum of incoming edge transfer times
};

/// Incremental non-preemptive list schedule: each core runs one task at a time
/// and a task starts no earlier than the core's last finish (no backfilling).
/// Holds references to the graph and platform, which must outlive it.
class Schedule {
 public:
  Schedule(const TaskGraph& g, const Platform& p);

  /// Evaluates placing `task` on `core` without mutating the schedule.
  Placement probe(TaskId task, CoreId core) const;
  /// Places `task` on `core`; the task's predecessors must already be placed.
  const TaskTiming& place(TaskId task, CoreId core);
  const TaskTiming& commit(const Placement& placement);

  void reset();

  /// Latest predecessor finish time (0 for entry tasks). Independent of the
  /// destination core; used by strategies that look at core idleness.
  Time data_ready(TaskId task) const;

  /// Time at which all of `task`'s inputs are available on `core`, ignoring
  /// the core's own backlog.
  Time input_ready(TaskId task, CoreId core) const;

  bool scheduled(TaskId task) const { return timings_[task].has_value(); }
  const std::optional<TaskTiming>& timing(TaskId task) const { return timings_[task]; }
  std::span<const std::optional<TaskTiming>> timings() const { return timings_; }
  Time avail(CoreId core) const { return avail_[core]; }
  std::span<const Time> avail() const { return avail_; }
  Time makespan() const noexcept { return makespan_; }

  const TaskGraph& graph() const noexcept { return *g_; }
  const Platform& platform() const noexcept { return *p_; }

 private:
  const TaskGraph* g_;
  const Platform* p_;
  std::vector<std::optional<TaskTiming>> timings_;
  std::vector<Time> avail_;
  Time makespan_ = 0.0;
};

/// Throws `Error(kInvalidInput)` unless the graph's core count matches the platform.
void check_compatible(const TaskGraph& g, const Platform& p);

}  // namespace mcnsim
