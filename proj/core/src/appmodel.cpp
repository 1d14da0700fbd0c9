#include "mcnsim/appmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

namespace mcnsim {
namespace {

std::string edge_name(TaskId src, TaskId dst) {
  return std::to_string(src) + "->" + std::to_string(dst);
}

}  // namespace

std::vector<TaskId> topological_order(std::size_t num_tasks, std::span<const Edge> edges) {
  std::vector<std::size_t> indegree(num_tasks, 0);
  std::vector<std::vector<TaskId>> succ(num_tasks);
  for (const Edge& e : edges) {
    if (e.src >= num_tasks || e.dst >= num_tasks) {
      throw Error(ErrorKind::kInvalidInput, "edge " + edge_name(e.src, e.dst) + " out of range");
    }
    succ[e.src].push_back(e.dst);
    ++indegree[e.dst];
  }
  std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
  for (TaskId t = 0; t < num_tasks; ++t) {
    if (indegree[t] == 0) ready.push(t);
  }
  std::vector<TaskId> order;
  order.reserve(num_tasks);
  while (!ready.empty()) {
    const TaskId t = ready.top();
    ready.pop();
    order.push_back(t);
    for (TaskId s : succ[t]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (order.size() != num_tasks) {
    throw Error(ErrorKind::kCycleDetected, "edge set contains a cycle");
  }
  return order;
}

TaskGraph::TaskGraph(std::size_t num_tasks, std::vector<Edge> edges, Matrix exec_time)
    : num_tasks_(num_tasks), edges_(std::move(edges)), exec_time_(std::move(exec_time)) {
  if (num_tasks_ == 0) throw Error(ErrorKind::kInvalidInput, "graph needs at least one task");
  if (exec_time_.rows() != num_tasks_ || exec_time_.cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "exec_time must be Q x N with N >= 1");
  }
  for (TaskId t = 0; t < num_tasks_; ++t) {
    bool any = false;
    for (CoreId k = 0; k < exec_time_.cols(); ++k) {
      const double v = exec_time_(t, k);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorKind::kInvalidInput, "exec_time entries must be finite and >= 0");
      }
      any = any || v > 0.0;
    }
    if (!any) {
      throw Error(ErrorKind::kInvalidInput,
                  "task " + std::to_string(t) + " has no core with positive exec_time");
    }
  }
  for (const Edge& e : edges_) {
    if (!std::isfinite(e.bytes) || e.bytes < 0.0) {
      throw Error(ErrorKind::kInvalidInput, "edge " + edge_name(e.src, e.dst) + " has bad bytes");
    }
  }
  topo_ = mcnsim::topological_order(num_tasks_, edges_);

  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].src == edges_[i - 1].src && edges_[i].dst == edges_[i - 1].dst) {
      throw Error(ErrorKind::kInvalidInput,
                  "duplicate edge " + edge_name(edges_[i].src, edges_[i].dst));
    }
  }
  in_edges_.resize(num_tasks_);
  out_edges_.resize(num_tasks_);
  for (const Edge& e : edges_) {
    out_edges_[e.src].push_back(e);
    in_edges_[e.dst].push_back(e);
  }
  for (auto& in : in_edges_) {
    std::sort(in.begin(), in.end(), [](const Edge& a, const Edge& b) { return a.src < b.src; });
  }
}

std::optional<double> TaskGraph::edge_bytes(TaskId src, TaskId dst) const {
  if (src >= num_tasks_) return std::nullopt;
  for (const Edge& e : out_edges_[src]) {
    if (e.dst == dst) return e.bytes;
  }
  return std::nullopt;
}

double TaskGraph::data_volume(TaskId src, TaskId dst) const {
  return edge_bytes(src, dst).value_or(0.0);
}

Matrix TaskGraph::data_volume_matrix() const {
  Matrix d(num_tasks_, num_tasks_);
  for (const Edge& e : edges_) d(e.src, e.dst) = e.bytes;
  return d;
}

std::vector<TaskId> TaskGraph::predecessors(TaskId task) const {
  std::vector<TaskId> out;
  for (const Edge& e : in_edges_[task]) out.push_back(e.src);
  return out;
}

std::vector<TaskId> TaskGraph::successors(TaskId task) const {
  std::vector<TaskId> out;
  for (const Edge& e : out_edges_[task]) out.push_back(e.dst);
  return out;
}

std::vector<TaskId> TaskGraph::entry_tasks() const {
  std::vector<TaskId> out;
  for (TaskId t = 0; t < num_tasks_; ++t) {
    if (in_edges_[t].empty()) out.push_back(t);
  }
  return out;
}

std::vector<TaskId> TaskGraph::exit_tasks() const {
  std::vector<TaskId> out;
  for (TaskId t = 0; t < num_tasks_; ++t) {
    if (out_edges_[t].empty()) out.push_back(t);
  }
  return out;
}

Time comm_time(TaskId src_task, TaskId dst_task, CoreId src_core, CoreId dst_core,
               const TaskGraph& g, const Platform& p) {
  const auto bytes = g.edge_bytes(src_task, dst_task);
  if (!bytes) throw Error(ErrorKind::kMissingEdge, "no edge " + edge_name(src_task, dst_task));
  if (src_core >= p.num_cores() || dst_core >= p.num_cores()) {
    throw Error(ErrorKind::kCoreOutOfRange, "core out of range in comm_time");
  }
  if (src_core == dst_core) return 0.0;
  return p.startup[src_core] + *bytes / p.transfer_rate(src_core, dst_core);
}

namespace {

// Shared by est() and Schedule::probe(); returns {ready time, sum of comms}.
std::pair<Time, Time> data_arrival(TaskId task, CoreId core, const TaskGraph& g,
                                   const Platform& p,
                                   std::span<const std::optional<TaskTiming>> timings) {
  Time ready = 0.0;
  Time comm_sum = 0.0;
  for (const Edge& e : g.in_edges(task)) {
    const auto& pred = timings[e.src];
    if (!pred) {
      throw Error(ErrorKind::kUnscheduledPredecessor,
                  "task " + std::to_string(task) + " waits on unscheduled " +
                      std::to_string(e.src));
    }
    const Time c = pred->core == core
                       ? 0.0
                       : p.startup[pred->core] + e.bytes / p.transfer_rate(pred->core, core);
    comm_sum += c;
    ready = std::max(ready, pred->aft + c);
  }
  return {ready, comm_sum};
}

}  // namespace

Time est(TaskId task, CoreId core, const TaskGraph& g, const Platform& p,
         std::span<const std::optional<TaskTiming>> timings, std::span<const Time> avail) {
  if (core >= avail.size()) throw Error(ErrorKind::kCoreOutOfRange, "core out of range in est");
  return std::max(avail[core], data_arrival(task, core, g, p, timings).first);
}

Time eft(TaskId task, CoreId core, Time est_value, const TaskGraph& g) {
  if (est_value < 0.0) throw Error(ErrorKind::kInvalidInput, "est must be >= 0");
  if (core >= g.num_cores()) throw Error(ErrorKind::kCoreOutOfRange, "core out of range in eft");
  if (!g.runnable(task, core)) {
    throw Error(ErrorKind::kInvalidInput, "task " + std::to_string(task) +
                                              " cannot run on core " + std::to_string(core));
  }
  return g.exec_time(task, core) + est_value;
}

void check_compatible(const TaskGraph& g, const Platform& p) {
  if (g.num_cores() != p.num_cores()) {
    throw Error(ErrorKind::kInvalidInput,
                "graph has exec_time for " + std::to_string(g.num_cores()) +
                    " cores but platform has " + std::to_string(p.num_cores()));
  }
}

Schedule::Schedule(const TaskGraph& g, const Platform& p)
    : g_(&g), p_(&p), timings_(g.num_tasks()), avail_(p.num_cores(), 0.0) {
  check_compatible(g, p);
}

Placement Schedule::probe(TaskId task, CoreId core) const {
  if (core >= avail_.size()) throw Error(ErrorKind::kCoreOutOfRange, "core out of range");
  const auto [ready, comm_sum] = data_arrival(task, core, *g_, *p_, timings_);
  const Time start = std::max(avail_[core], ready);
  return {task, core, start, eft(task, core, start, *g_), comm_sum};
}

const TaskTiming& Schedule::place(TaskId task, CoreId core) { return commit(probe(task, core)); }

const TaskTiming& Schedule::commit(const Placement& pl) {
  if (timings_[pl.task]) {
    throw Error(ErrorKind::kInvalidInput, "task " + std::to_string(pl.task) + " placed twice");
  }
  timings_[pl.task] = TaskTiming{pl.task, pl.core, pl.est, pl.eft, pl.est, pl.eft};
  avail_[pl.core] = pl.eft;
  makespan_ = std::max(makespan_, pl.eft);
  return *timings_[pl.task];
}

void Schedule::reset() {
  std::fill(timings_.begin(), timings_.end(), std::nullopt);
  std::fill(avail_.begin(), avail_.end(), 0.0);
  makespan_ = 0.0;
}

Time Schedule::input_ready(TaskId task, CoreId core) const {
  if (core >= avail_.size()) throw Error(ErrorKind::kCoreOutOfRange, "core out of range");
  return data_arrival(task, core, *g_, *p_, timings_).first;
}

Time Schedule::data_ready(TaskId task) const {
  Time ready = 0.0;
  for (const Edge& e : g_->in_edges(task)) {
    const auto& pred = timings_[e.src];
    if (!pred) {
      throw Error(ErrorKind::kUnscheduledPredecessor,
                  "task " + std::to_string(task) + " waits on unscheduled " +
                      std::to_string(e.src));
    }
    ready = std::max(ready, pred->aft);
  }
  return ready;
}

}  // namespace mcnsim
