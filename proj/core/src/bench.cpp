#include "mcnsim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "mcnsim/rng.hpp"

namespace mcnsim {
namespace {

constexpr std::uint64_t kSpeedStream = 0x53504544;     // "SPED"
constexpr std::uint64_t kGraphStream = 0x47524150;     // "GRAP"
constexpr std::uint64_t kInstanceStream = 0x494e5354;  // "INST"

void require_spec(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidSpec, what);
}

class Builder {
 public:
  Builder(const WorkloadSpec& spec, std::size_t num_cores)
      : spec_(spec), gen_(counter_draw(spec.seed, kGraphStream, 0)),
        speeds_(core_speeds(spec, num_cores)) {}

  TaskId add_task() {
    const double base = uniform(gen_, spec_.exec_time_range.first, spec_.exec_time_range.second);
    base_.push_back(base);
    return base_.size() - 1;
  }

  void add_edge(TaskId src, TaskId dst) {
    edges_.push_back({src, dst, spec_.data_volume_scale * uniform(gen_, 0.5, 1.5)});
  }

  bool coin(double p) { return to_unit(gen_()) < p; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_index(gen_, n)); }

  TaskGraph build() {
    Matrix exec(base_.size(), speeds_.size());
    for (TaskId t = 0; t < base_.size(); ++t) {
      for (CoreId k = 0; k < speeds_.size(); ++k) exec(t, k) = base_[t] / speeds_[k];
    }
    return TaskGraph(base_.size(), std::move(edges_), std::move(exec));
  }

 private:
  const WorkloadSpec& spec_;
  std::mt19937_64 gen_;
  std::vector<double> speeds_;
  std::vector<double> base_;
  std::vector<Edge> edges_;
};

}  // namespace

std::string_view to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kDataParallel: return "data_parallel";
    case WorkloadKind::kPipeline: return "pipeline";
    case WorkloadKind::kFineGrained: return "fine_grained";
    case WorkloadKind::kLayeredRandom: return "layered_random";
  }
  return "unknown";
}

WorkloadKind parse_workload_kind(std::string_view name) {
  for (WorkloadKind k : {WorkloadKind::kDataParallel, WorkloadKind::kPipeline,
                         WorkloadKind::kFineGrained, WorkloadKind::kLayeredRandom}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::kInvalidSpec, "unknown workload kind '" + std::string(name) + "'");
}

WorkloadSpec WorkloadSpec::defaults(WorkloadKind kind) {
  WorkloadSpec s;
  s.kind = kind;
  switch (kind) {
    case WorkloadKind::kDataParallel:
      s.data_volume_scale = 16.0;
      break;
    case WorkloadKind::kPipeline:
      s.queries = 4;
      break;
    case WorkloadKind::kFineGrained:
      s.exec_time_range = {1.0, 10.0};
      s.data_volume_scale = 4096.0;
      s.edge_probability = 0.3;
      break;
    case WorkloadKind::kLayeredRandom:
      break;
  }
  return s;
}

void WorkloadSpec::validate() const {
  if (kind == WorkloadKind::kPipeline) {
    require_spec(queries >= 1, "pipeline needs at least one query");
  } else {
    require_spec(num_tasks >= 1, "num_tasks must be >= 1");
  }
  if (kind == WorkloadKind::kLayeredRandom) {
    require_spec(depth >= 1 && depth <= num_tasks, "depth must lie in [1, num_tasks]");
  }
  require_spec(std::isfinite(edge_probability) && edge_probability >= 0.0 &&
                   edge_probability <= 1.0,
               "edge_probability must lie in [0, 1]");
  require_spec(std::isfinite(data_volume_scale) && data_volume_scale >= 0.0,
               "data_volume_scale must be >= 0");
  require_spec(std::isfinite(exec_time_range.first) && exec_time_range.first > 0.0,
               "exec_time_range.min must be > 0");
  require_spec(std::isfinite(exec_time_range.second) &&
                   exec_time_range.second >= exec_time_range.first,
               "exec_time_range.max must be >= min");
  require_spec(std::isfinite(heterogeneity_factor) && heterogeneity_factor >= 1.0,
               "heterogeneity_factor must be >= 1");
}

std::vector<double> core_speeds(const WorkloadSpec& spec, std::size_t num_cores) {
  std::mt19937_64 gen(counter_draw(spec.seed, kSpeedStream, 0));
  std::vector<double> speeds(num_cores, 1.0);
  for (double& s : speeds) s = uniform(gen, 1.0, spec.heterogeneity_factor);
  return speeds;
}

TaskGraph generate(const WorkloadSpec& spec, std::size_t num_cores) {
  spec.validate();
  require_spec(num_cores >= 1, "platform has no cores");
  Builder b(spec, num_cores);
  switch (spec.kind) {
    case WorkloadKind::kDataParallel:
      for (std::size_t i = 0; i < spec.num_tasks; ++i) b.add_task();
      break;
    case WorkloadKind::kPipeline:
      for (std::size_t q = 0; q < spec.queries; ++q) {
        TaskId prev = b.add_task();
        for (std::size_t stage = 1; stage < kPipelineStages; ++stage) {
          const TaskId t = b.add_task();
          b.add_edge(prev, t);
          prev = t;
        }
      }
      break;
    case WorkloadKind::kFineGrained:
      for (std::size_t i = 0; i < spec.num_tasks; ++i) b.add_task();
      for (TaskId i = 0; i < spec.num_tasks; ++i) {
        for (TaskId j = i + 1; j < spec.num_tasks; ++j) {
          if (b.coin(spec.edge_probability)) b.add_edge(i, j);
        }
      }
      break;
    case WorkloadKind::kLayeredRandom: {
      std::vector<std::vector<TaskId>> layers(spec.depth);
      for (std::size_t i = 0; i < spec.num_tasks; ++i) {
        layers[i * spec.depth / spec.num_tasks].push_back(b.add_task());
      }
      for (std::size_t l = 1; l < layers.size(); ++l) {
        const auto& prev = layers[l - 1];
        for (TaskId t : layers[l]) {
          bool linked = false;
          for (TaskId s : prev) {
            if (b.coin(spec.edge_probability)) {
              b.add_edge(s, t);
              linked = true;
            }
          }
          if (!linked) b.add_edge(prev[b.index(prev.size())], t);
        }
      }
      break;
    }
  }
  return b.build();
}

TaskGraph generate(const WorkloadSpec& spec, const Platform& p) {
  return generate(spec, p.num_cores());
}

double granularity(const TaskGraph& g, const Platform& p) {
  check_compatible(g, p);
  if (g.edges().empty()) return std::numeric_limits<double>::infinity();
  double comp = 0.0;
  std::size_t comp_n = 0;
  for (TaskId t = 0; t < g.num_tasks(); ++t) {
    for (CoreId k = 0; k < g.num_cores(); ++k) {
      if (!g.runnable(t, k)) continue;
      comp += g.exec_time(t, k);
      ++comp_n;
    }
  }
  const std::size_t n = p.num_cores();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double startup = 0.0;
  double inv_rate = 0.0;
  for (CoreId k = 0; k < n; ++k) {
    startup += p.startup[k];
    for (CoreId m = 0; m < n; ++m) {
      if (m != k) inv_rate += 1.0 / p.transfer_rate(k, m);
    }
  }
  startup /= static_cast<double>(n);
  inv_rate /= static_cast<double>(n * (n - 1));
  double comm = 0.0;
  for (const Edge& e : g.edges()) comm += startup + e.bytes * inv_rate;
  comm /= static_cast<double>(g.edges().size());
  return (comp / static_cast<double>(comp_n)) / comm;
}

void ExperimentConfig::validate() const {
  if (workloads.empty()) throw Error(ErrorKind::kInvalidInput, "experiment has no workloads");
  if (strategies.empty()) throw Error(ErrorKind::kInvalidInput, "experiment has no strategies");
  if (seeds.empty()) throw Error(ErrorKind::kInvalidInput, "experiment has no seeds");
  if (parallel == 0) throw Error(ErrorKind::kInvalidInput, "parallel must be >= 1");
  platform.validate();
  for (const auto& w : workloads) w.spec.validate();
}

std::uint64_t instance_seed(const WorkloadSpec& spec, std::uint64_t run_seed) {
  return counter_draw(spec.seed, kInstanceStream, run_seed);
}

RunReport run_cell(const NamedWorkload& workload, Strategy strategy, std::uint64_t seed,
                   const Platform& p, const MabOptions& mab) {
  WorkloadSpec spec = workload.spec;
  spec.seed = instance_seed(workload.spec, seed);
  const TaskGraph g = generate(spec, p);
  StrategyParams params;
  params.seed = seed;
  params.mab = mab;
  if (workload.affinity_node) {
    params.affinity = AffinityMap::uniform(g.num_tasks(), *workload.affinity_node);
  }
  StrategyOutput out = allocate(strategy, g, p, params);
  RunReport report = execute(out.allocation, g, p);
  report.seed = seed;
  if (out.ledger) {
    report.best_regret = out.ledger->best_regret;
    report.regret_trace = std::move(out.ledger);
  }
  return report;
}

std::vector<ExperimentRow> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const std::vector<ExperimentRow>&)>& on_partial) {
  config.validate();
  struct Cell {
    const NamedWorkload* workload;
    Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& w : config.workloads) {
    for (Strategy s : config.strategies) {
      for (std::uint64_t seed : config.seeds) cells.push_back({&w, s, seed});
    }
  }

  std::vector<std::optional<RunReport>> done(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mu;
  std::size_t error_cell = cells.size();
  std::exception_ptr error;

  const auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        done[i] = run_cell(*cells[i].workload, cells[i].strategy, cells[i].seed,
                           config.platform, config.mab);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (i < error_cell) {
          error_cell = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  const std::size_t workers = std::min(config.parallel, cells.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<ExperimentRow> rows;
  for (std::size_t i = 0; i < std::min(error_cell, cells.size()); ++i) {
    if (!done[i]) continue;
    rows.push_back({cells[i].workload->name, cells[i].seed, std::move(*done[i])});
  }
  if (error) {
    if (on_partial) on_partial(rows);
    std::rethrow_exception(error);
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows) {
  std::vector<std::string> workloads;
  for (const auto& r : rows) {
    if (std::find(workloads.begin(), workloads.end(), r.workload) == workloads.end()) {
      workloads.push_back(r.workload);
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& w : workloads) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<Metrics>> runs;
    for (const auto& r : rows) {
      if (r.workload != w) continue;
      if (!runs.count(r.report.strategy)) order.push_back(r.report.strategy);
      runs[r.report.strategy].push_back(Metrics::of(r.report));
    }
    std::map<std::string, Metrics> means;
    for (const auto& [name, ms] : runs) means.emplace(name, Metrics::mean(ms));
    std::map<std::string, ComparisonRow> by_name;
    if (means.count("random")) {
      for (auto& row : compare(means)) by_name.emplace(row.strategy, row);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const Metrics none{nan, nan, nan, nan, nan};
      for (const auto& [name, m] : means) by_name.emplace(name, ComparisonRow{name, m, none, none});
    }
    for (const auto& name : order) out.push_back({w, by_name.at(name), runs.at(name).size()});
  }
  return out;
}

}  // namespace mcnsim
