#include "mcnsim/allocation.hpp"

#include <algorithm>
#include <string>

namespace mcnsim {

Time Allocation::makespan() const {
  Time m = 0.0;
  for (const auto& t : timings) m = std::max(m, t.aft);
  return m;
}

Allocation allocation_from(std::string strategy, const std::vector<Assignment>& assignments,
                           const TaskGraph& g, const Platform& p) {
  Schedule s(g, p);
  for (const auto& a : assignments) s.place(a.task, a.core);
  return allocation_from(std::move(strategy), assignments, s);
}

Allocation allocation_from(std::string strategy, const std::vector<Assignment>& assignments,
                           const Schedule& schedule) {
  Allocation out;
  out.strategy = std::move(strategy);
  out.assignments = assignments;
  out.timings.reserve(schedule.timings().size());
  for (const auto& t : schedule.timings()) {
    if (!t) throw Error(ErrorKind::kInvalidInput, "schedule is incomplete");
    out.timings.push_back(*t);
  }
  return out;
}

void validate_allocation(const Allocation& alloc, const TaskGraph& g, const Platform& p) {
  const std::size_t q = g.num_tasks();
  if (alloc.assignments.size() != q || alloc.timings.size() != q) {
    throw Error(ErrorKind::kInvalidInput, "allocation does not cover every task exactly once");
  }
  std::vector<std::size_t> position(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    const auto& a = alloc.assignments[i];
    if (a.task >= q || position[a.task] != q) {
      throw Error(ErrorKind::kInvalidInput, "allocation repeats or skips a task");
    }
    if (a.core >= p.num_cores()) {
      throw Error(ErrorKind::kCoreOutOfRange, "core " + std::to_string(a.core) + " out of range");
    }
    if (!g.runnable(a.task, a.core)) {
      throw Error(ErrorKind::kInvalidInput, "task " + std::to_string(a.task) +
                                                " assigned to a core that cannot run it");
    }
    if (alloc.timings[a.task].core != a.core || alloc.timings[a.task].task != a.task) {
      throw Error(ErrorKind::kInvalidInput, "timings disagree with assignments");
    }
    position[a.task] = i;
  }
  for (const Edge& e : g.edges()) {
    if (position[e.src] > position[e.dst]) {
      throw Error(ErrorKind::kInvalidInput, "assignment order violates edge " +
                                                std::to_string(e.src) + "->" +
                                                std::to_string(e.dst));
    }
  }
}

}  // namespace mcnsim
