#pragma once

#include <string>
#include <vector>

#include "mcnsim/appmodel.hpp"

namespace mcnsim {

struct Assignment {
  TaskId task = 0;
  CoreId core = 0;

  bool operator==(const Assignment&) const = default;
};

/// Ordered task-to-core sequence produced by a strategy, with the planned
/// timing of every task (indexed by task id).
struct Allocation {
  std::string strategy;
  std::vector<Assignment> assignments;
  std::vector<TaskTiming> timings;

  CoreId core_of(TaskId task) const { return timings[task].core; }
  Time makespan() const;

  bool operator==(const Allocation&) const = default;
};

/// Builds an Allocation by placing `assignments` in order on a fresh schedule.
Allocation allocation_from(std::string strategy, const std::vector<Assignment>& assignments,
                           const TaskGraph& g, const Platform& p);

/// Snapshot of a fully placed schedule, in placement order.
Allocation allocation_from(std::string strategy, const std::vector<Assignment>& assignments,
                           const Schedule& schedule);

/// Checks that every task appears once, in an order consistent with the
/// edges, on a core that can run it. Throws `Error(kInvalidInput)`.
void validate_allocation(const Allocation& alloc, const TaskGraph& g, const Platform& p);

}  // namespace mcnsim
