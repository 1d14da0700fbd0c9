#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcnsim/allocation.hpp"
#include "mcnsim/bandit.hpp"

namespace mcnsim {

/// One data transfer between tasks placed on different cores.
struct MessageEvent {
  TaskId src_task = 0;
  TaskId dst_task = 0;
  CoreId src_core = 0;
  CoreId dst_core = 0;
  Time depart = 0.0;   // producer finish
  Time arrive = 0.0;   // packet reaches the destination node
  Time latency = 0.0;  // arrive - depart; zero within a node
  Time queueing = 0.0; // part of latency spent waiting on busy links
  bool inter_node = false;
};

struct RunReport {
  std::string strategy;
  std::uint64_t seed = 0;
  Time makespan = 0.0;
  std::vector<Time> per_core_busy;
  double throughput_proxy = 0.0;  // busy time units per makespan; stands in for IPC
  Time avg_packet_latency = 0.0;  // mean over inter-node messages, 0 if none
  double total_energy = 0.0;      // joules
  double total_avg_power = 0.0;   // watts
  std::optional<double> best_regret;
  std::optional<RegretLedger> regret_trace;

  std::vector<TaskTiming> timings;
  std::vector<MessageEvent> messages;
};

/// Discrete-event replay of `alloc`. Each core runs its tasks in assignment
/// order. A consumer starts once the core is free, every input has its
/// analytic transfer time behind it, and every inter-node message has
/// crossed the mesh. Messages follow XY routes; each directed link serves one
/// message at a time for bytes / link_bandwidth, in arrival order. While the
/// mesh keeps up with the analytic transfer times the schedule equals the
/// analytic one and contention only shows in the latency metric.
RunReport execute(const Allocation& alloc, const TaskGraph& g, const Platform& p);

/// `sum_k (P_stat_k * makespan + P_dyn_k * busy_k)`, in joules.
double energy_of(std::span<const Time> per_core_busy, Time makespan, const Platform& p);

struct Metrics {
  double makespan = 0.0;
  double throughput_proxy = 0.0;
  double avg_packet_latency = 0.0;
  double total_energy = 0.0;
  double total_avg_power = 0.0;

  static Metrics of(const RunReport& r);
  static Metrics mean(std::span<const Metrics> runs);
};

struct ComparisonRow {
  std::string strategy;
  Metrics value;
  Metrics ratio;    // value / random's value; NaN when random's value is 0
  Metrics reduced;  // (random - value) / random * 100
};

/// Normalises every strategy against "random". Rows follow the map's key
/// order. Throws `Error(kMissingBaseline)`.
std::vector<ComparisonRow> compare(const std::map<std::string, Metrics>& reports);
std::vector<ComparisonRow> compare(const std::map<std::string, RunReport>& reports);

}  // namespace mcnsim
