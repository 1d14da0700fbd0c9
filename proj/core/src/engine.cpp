#include "mcnsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mcnsim {
namespace {

enum class EventKind { kTaskFinish, kHopArrive, kDeliver };

struct Event {
  Time time;
  std::uint64_t seq;
  EventKind kind;
  std::size_t id;   // task or message index
  std::size_t hop;  // next link on the route (kHopArrive)

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

struct InFlight {
  std::vector<LinkId> route;
  Time service = 0.0;  // link occupancy: bytes / link bandwidth
};

class Simulator {
 public:
  Simulator(const Allocation& alloc, const TaskGraph& g, const Platform& p)
      : alloc_(alloc), g_(g), p_(p),
        queue_(p.num_cores()), head_(p.num_cores(), 0), core_free_(p.num_cores(), 0.0),
        core_running_(p.num_cores(), false), pending_(g.num_tasks()), ready_(g.num_tasks(), 0.0),
        timings_(g.num_tasks()), link_free_(p.mesh.nodes() * 4, 0.0) {
    for (const Assignment& a : alloc.assignments) queue_[a.core].push_back(a.task);
    for (TaskId t = 0; t < g.num_tasks(); ++t) pending_[t] = g.in_edges(t).size();
  }

  RunReport run() {
    for (CoreId k = 0; k < p_.num_cores(); ++k) try_start(k);
    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      switch (ev.kind) {
        case EventKind::kTaskFinish: finish(ev.id, ev.time); break;
        case EventKind::kHopArrive: hop(ev.id, ev.hop, ev.time); break;
        case EventKind::kDeliver: deliver(ev.id, ev.time); break;
      }
    }
    RunReport r;
    r.strategy = alloc_.strategy;
    r.per_core_busy.assign(p_.num_cores(), 0.0);
    r.timings.reserve(g_.num_tasks());
    for (TaskId t = 0; t < g_.num_tasks(); ++t) {
      if (!timings_[t]) {
        throw Error(ErrorKind::kInvalidInput, "task " + std::to_string(t) + " never started");
      }
      r.timings.push_back(*timings_[t]);
      r.makespan = std::max(r.makespan, timings_[t]->aft);
      r.per_core_busy[timings_[t]->core] += timings_[t]->aft - timings_[t]->ast;
    }
    Time busy_total = 0.0;
    for (Time b : r.per_core_busy) busy_total += b;
    r.throughput_proxy = r.makespan > 0.0 ? busy_total / r.makespan : 0.0;
    Time latency_sum = 0.0;
    std::size_t inter_node = 0;
    for (const MessageEvent& m : messages_) {
      if (!m.inter_node) continue;
      latency_sum += m.latency;
      ++inter_node;
    }
    r.avg_packet_latency = inter_node ? latency_sum / static_cast<double>(inter_node) : 0.0;
    r.total_energy = energy_of(r.per_core_busy, r.makespan, p_);
    r.total_avg_power =
        r.makespan > 0.0 ? r.total_energy / (r.makespan * p_.time_unit_seconds) : 0.0;
    r.messages = std::move(messages_);
    return r;
  }

 private:
  void push(Time t, EventKind kind, std::size_t id, std::size_t hop = 0) {
    events_.push({t, seq_++, kind, id, hop});
  }

  void try_start(CoreId core) {
    if (core_running_[core] || head_[core] >= queue_[core].size()) return;
    const TaskId t = queue_[core][head_[core]];
    if (pending_[t] != 0) return;
    const Time start = std::max(core_free_[core], ready_[t]);
    const Time finish = start + g_.exec_time(t, core);
    timings_[t] = TaskTiming{t, core, start, finish, start, finish};
    core_running_[core] = true;
    push(finish, EventKind::kTaskFinish, t);
  }

  void input_done(TaskId t, Time at) {
    ready_[t] = std::max(ready_[t], at);
    if (--pending_[t] == 0) try_start(alloc_.core_of(t));
  }

  void finish(TaskId t, Time now) {
    const CoreId core = timings_[t]->core;
    core_running_[core] = false;
    core_free_[core] = now;
    ++head_[core];
    for (const Edge& e : g_.out_edges(t)) {
      const CoreId dst_core = alloc_.core_of(e.dst);
      if (dst_core == core) {
        input_done(e.dst, now);
        continue;
      }
      const Time analytic = now + comm_time(t, e.dst, core, dst_core, g_, p_);
      ready_[e.dst] = std::max(ready_[e.dst], analytic);
      const NodeCoord a = node_of(core, p_);
      const NodeCoord b = node_of(dst_core, p_);
      messages_.push_back({t, e.dst, core, dst_core, now, now, 0.0, 0.0, a != b});
      if (a == b) {
        flight_.emplace_back();
        input_done(e.dst, now);
        continue;
      }
      flight_.push_back({xy_route(a, b, p_), e.bytes / p_.link_bandwidth});
      push(now, EventKind::kHopArrive, messages_.size() - 1, 0);
    }
    try_start(core);
  }

  void hop(std::size_t msg, std::size_t index, Time now) {
    const InFlight& f = flight_[msg];
    const std::size_t link = f.route[index].index();
    const Time start = std::max(now, link_free_[link]);
    messages_[msg].queueing += start - now;
    link_free_[link] = start + f.service;
    const Time next = start + p_.hop_latency;
    if (index + 1 < f.route.size()) {
      push(next, EventKind::kHopArrive, msg, index + 1);
    } else {
      push(next, EventKind::kDeliver, msg);
    }
  }

  void deliver(std::size_t msg, Time now) {
    MessageEvent& m = messages_[msg];
    m.arrive = now;
    m.latency = now - m.depart;
    input_done(m.dst_task, now);
  }

  const Allocation& alloc_;
  const TaskGraph& g_;
  const Platform& p_;
  std::vector<std::vector<TaskId>> queue_;
  std::vector<std::size_t> head_;
  std::vector<Time> core_free_;
  std::vector<bool> core_running_;
  std::vector<std::size_t> pending_;
  std::vector<Time> ready_;
  std::vector<std::optional<TaskTiming>> timings_;
  std::vector<Time> link_free_;
  std::vector<MessageEvent> messages_;
  std::vector<InFlight> flight_;  // parallel to messages_; empty route within a node
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
};

}  // namespace

double energy_of(std::span<const Time> per_core_busy, Time makespan, const Platform& p) {
  double total = 0.0;
  for (CoreId k = 0; k < per_core_busy.size(); ++k) {
    total += p.power[k].static_watts() * makespan + p.power[k].dynamic_watts() * per_core_busy[k];
  }
  return total * p.time_unit_seconds;
}

RunReport execute(const Allocation& alloc, const TaskGraph& g, const Platform& p) {
  check_compatible(g, p);
  validate_allocation(alloc, g, p);
  return Simulator(alloc, g, p).run();
}

Metrics Metrics::of(const RunReport& r) {
  return {r.makespan, r.throughput_proxy, r.avg_packet_latency, r.total_energy,
          r.total_avg_power};
}

Metrics Metrics::mean(std::span<const Metrics> runs) {
  Metrics m;
  if (runs.empty()) return m;
  for (const Metrics& r : runs) {
    m.makespan += r.makespan;
    m.throughput_proxy += r.throughput_proxy;
    m.avg_packet_latency += r.avg_packet_latency;
    m.total_energy += r.total_energy;
    m.total_avg_power += r.total_avg_power;
  }
  const double n = static_cast<double>(runs.size());
  m.makespan /= n;
  m.throughput_proxy /= n;
  m.avg_packet_latency /= n;
  m.total_energy /= n;
  m.total_avg_power /= n;
  return m;
}

namespace {

Metrics combine(const Metrics& a, const Metrics& b, double (*f)(double, double)) {
  return {f(a.makespan, b.makespan), f(a.throughput_proxy, b.throughput_proxy),
          f(a.avg_packet_latency, b.avg_packet_latency), f(a.total_energy, b.total_energy),
          f(a.total_avg_power, b.total_avg_power)};
}

double ratio(double v, double base) {
  return base != 0.0 ? v / base : std::numeric_limits<double>::quiet_NaN();
}

double reduced(double v, double base) {
  return base != 0.0 ? (base - v) / base * 100.0 : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<ComparisonRow> compare(const std::map<std::string, Metrics>& reports) {
  const auto base = reports.find("random");
  if (base == reports.end()) {
    throw Error(ErrorKind::kMissingBaseline, "comparison needs a 'random' run");
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [name, m] : reports) {
    rows.push_back({name, m, combine(m, base->second, ratio), combine(m, base->second, reduced)});
  }
  return rows;
}

std::vector<ComparisonRow> compare(const std::map<std::string, RunReport>& reports) {
  std::map<std::string, Metrics> metrics;
  for (const auto& [name, r] : reports) metrics.emplace(name, Metrics::of(r));
  return compare(metrics);
}

}  // namespace mcnsim
