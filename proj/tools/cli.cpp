#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "mcnsim/io.hpp"

namespace mcnsim::cli {
namespace fs = std::filesystem;
namespace {

struct GenerateArgs {
  std::string kind;
  std::optional<std::size_t> tasks, queries, depth, cores;
  std::optional<double> edge_prob, data_scale, exec_min, exec_max, hetero;
  std::uint64_t seed = 0;
  std::string platform;
  std::string out;
};

struct RunArgs {
  std::string platform;
  std::string workload;
  std::string strategy = "mab";
  std::size_t iterations = 200;
  double sigma = 2.0;
  std::uint64_t seed = 0;
  std::optional<double> h1, h2, h3;
  std::string scope = "global";
  std::size_t plateau = 0;
  bool ucb_cumulative = false;
  bool per_core = false;
  std::vector<std::size_t> affinity_node;
  bool derive_affinity = false;
  bool femtoseconds = false;
  std::string out;
};

struct SweepArgs {
  std::string file;
  std::optional<std::size_t> parallel;
  std::string out;
};

// --out beats MCNSIM_OUT, which beats the built-in default.
fs::path output_dir(const std::string& flag, const fs::path& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MCNSIM_OUT"); env && *env) return env;
  return fallback;
}

template <class F>
std::string render(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const WorkloadKind kind = parse_workload_kind(a.kind);
  WorkloadSpec s = WorkloadSpec::defaults(kind);
  if (a.tasks) s.num_tasks = *a.tasks;
  if (a.queries) s.queries = *a.queries;
  if (a.depth) s.depth = *a.depth;
  if (a.edge_prob) s.edge_probability = *a.edge_prob;
  if (a.data_scale) s.data_volume_scale = *a.data_scale;
  if (a.exec_min) s.exec_time_range.first = *a.exec_min;
  if (a.exec_max) s.exec_time_range.second = *a.exec_max;
  if (a.hetero) s.heterogeneity_factor = *a.hetero;
  s.seed = a.seed;
  s.validate();

  std::size_t cores = Platform::default_mcn().num_cores();
  if (!a.platform.empty()) cores = load_platform(a.platform).platform.num_cores();
  if (a.cores) cores = *a.cores;
  if (cores == 0) throw Error(ErrorKind::kInvalidSpec, "--cores must be positive");

  const std::string text = dump_workload(generate(s, cores));
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
    err << "wrote " << a.out << "\n";
  }
  return 0;
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  PlatformConfig pc{Platform::default_mcn(), std::nullopt};
  if (!a.platform.empty()) pc = load_platform(a.platform);
  const Platform& p = pc.platform;

  std::optional<WorkloadFile> wf;
  if (a.workload.empty()) {
    WorkloadSpec s;
    s.seed = a.seed;
    wf = WorkloadFile{generate(s, p), std::nullopt};
  } else {
    wf = load_workload(a.workload);
  }
  const TaskGraph& g = wf->graph;
  check_compatible(g, p);

  const RewardWeights base = pc.weights.value_or(RewardWeights{});
  StrategyParams params;
  params.seed = a.seed;
  params.mab.weights = RewardWeights(a.h1.value_or(base.h1()), a.h2.value_or(base.h2()),
                                     a.h3.value_or(base.h3()));
  params.mab.sigma = a.sigma;
  params.mab.iterations = a.iterations;
  params.mab.seed = a.seed;
  params.mab.scope = a.scope == "per-node" ? BanditScope::kPerNode : BanditScope::kGlobal;
  params.mab.index = a.ucb_cumulative ? UcbIndex::kCumulative : UcbIndex::kMean;
  params.mab.plateau = a.plateau;

  const Strategy strategy = parse_strategy(a.strategy);
  if (strategy == Strategy::kGrouped) {
    if (!a.affinity_node.empty()) {
      params.affinity = AffinityMap::uniform(g.num_tasks(), {a.affinity_node[0], a.affinity_node[1]});
    } else if (wf->affinity) {
      params.affinity = wf->affinity;
    } else if (a.derive_affinity) {
      params.affinity = AffinityMap::derive(g, p, a.seed);
    } else {
      throw Error(ErrorKind::kMissingAffinity,
                  "grouped needs an affinity map: add 'affinity' to the workload, or pass "
                  "--affinity-node or --derive-affinity");
    }
    params.affinity->validate(g, p);
  }

  const StrategyOutput so = allocate(strategy, g, p, params);
  RunReport report = execute(so.allocation, g, p);
  report.seed = a.seed;
  if (so.ledger) report.best_regret = so.ledger->best_regret;

  const double scale = a.femtoseconds ? p.time_unit_seconds * 1e15 : 1.0;
  const fs::path dir = output_dir(a.out, ".");
  const std::string csv = render([&](std::ostream& os) { write_report_csv(os, report, scale); });
  write_file(dir / "report.csv", csv);
  if (so.ledger) {
    write_file(dir / "regret.csv", render([&](std::ostream& os) { write_regret_csv(os, *so.ledger); }));
  }
  if (a.per_core) {
    write_file(dir / "per_core.csv",
               render([&](std::ostream& os) { write_per_core_csv(os, report, scale); }));
  }
  out << csv;
  err << "wrote " << (dir / "report.csv").string() << "\n";
  return 0;
}

std::string weight_tag(const RewardWeights& w) {
  return "h" + format_number(w.h1()) + "_" + format_number(w.h2()) + "_" + format_number(w.h3());
}

void write_rows(const fs::path& dir, const std::vector<ExperimentRow>& rows) {
  write_file(dir / "raw.csv", render([&](std::ostream& os) { write_raw_csv(os, rows); }));
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  SweepConfig sweep = load_sweep(a.file);
  ExperimentConfig& ex = sweep.experiment;
  if (a.parallel) ex.parallel = *a.parallel;
  const fs::path root = output_dir(a.out, "results") / ex.name;

  for (const RewardWeights& w : sweep.weight_grid) {
    ex.mab.weights = w;
    const fs::path dir = sweep.weight_grid.size() > 1 ? root / weight_tag(w) : root;
    const auto rows = run_experiment(ex, [&](const std::vector<ExperimentRow>& partial) {
      write_rows(dir, partial);
      err << "sweep failed; " << partial.size() << " finished rows flushed to "
          << (dir / "raw.csv").string() << "\n";
    });
    write_rows(dir, rows);
    write_file(dir / "summary.csv",
               render([&](std::ostream& os) { write_summary_csv(os, summarize(rows)); }));
    for (const ExperimentRow& row : rows) {
      if (!row.report.regret_trace) continue;
      write_file(dir / "regret" / row.workload / (std::to_string(row.seed) + ".csv"),
                 render([&](std::ostream& os) { write_regret_csv(os, *row.report.regret_trace); }));
    }
    out << (dir / "summary.csv").string() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Near-memory task allocation simulator", "mcnsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mcnsim 0.1.0");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print progress to stderr");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic workload DAG");
  g->add_option("--kind", gen.kind, "data_parallel | pipeline | fine_grained | layered_random")
      ->required();
  g->add_option("--tasks", gen.tasks, "Task count (ignored by pipeline)");
  g->add_option("--queries", gen.queries, "Pipeline chains");
  g->add_option("--depth", gen.depth, "Layers for layered_random");
  g->add_option("--edge-prob", gen.edge_prob, "Edge probability")->check(CLI::Range(0.0, 1.0));
  g->add_option("--data-scale", gen.data_scale, "Mean bytes per edge");
  g->add_option("--exec-min", gen.exec_min, "Smallest base execution time");
  g->add_option("--exec-max", gen.exec_max, "Largest base execution time");
  g->add_option("--hetero", gen.hetero, "Fastest/slowest core speed ratio");
  g->add_option("--seed", gen.seed, "Generator seed");
  auto* cores = g->add_option("--cores", gen.cores, "Core count of the target platform");
  g->add_option("--platform", gen.platform, "Platform file supplying the core count")
      ->check(CLI::ExistingFile)
      ->excludes(cores);
  g->add_option("--out", gen.out, "Output file (stdout when absent)");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Allocate one workload and simulate it");
  r->add_option("--platform", run.platform, "Platform file")->check(CLI::ExistingFile);
  r->add_option("--workload", run.workload, "Workload file (default: generated layered_random)")
      ->check(CLI::ExistingFile);
  r->add_option("--strategy", run.strategy, "random | grouped | greedy | mab")
      ->check(CLI::IsMember({"random", "grouped", "greedy", "mab"}));
  r->add_option("--R", run.iterations, "Bandit iterations")->check(CLI::PositiveNumber);
  r->add_option("--sigma", run.sigma, "Exploration constant")->check(CLI::NonNegativeNumber);
  r->add_option("--seed", run.seed, "Seed");
  r->add_option("--h1", run.h1, "Weight of the finish-time cost")->check(CLI::NonNegativeNumber);
  r->add_option("--h2", run.h2, "Weight of the resource cost")->check(CLI::NonNegativeNumber);
  r->add_option("--h3", run.h3, "Weight of the power cost")->check(CLI::NonNegativeNumber);
  r->add_option("--bandit-scope", run.scope, "global | per-node")
      ->check(CLI::IsMember({"global", "per-node"}));
  r->add_option("--plateau", run.plateau, "Stop after this many iterations without improvement");
  r->add_flag("--ucb-cumulative", run.ucb_cumulative)->group("");
  r->add_flag("--per-core", run.per_core, "Also write per_core.csv");
  r->add_option("--affinity-node", run.affinity_node, "Pin every task's affinity to ROW COL")
      ->expected(2);
  r->add_flag("--derive-affinity", run.derive_affinity,
              "Derive grouped affinity from the DAG when the workload has none");
  r->add_flag("--femtoseconds", run.femtoseconds, "Report times in femtoseconds");
  r->add_option("--out", run.out, "Output directory (default: MCNSIM_OUT or .)");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Run an experiment grid from a sweep file");
  s->add_option("file", sw.file, "Sweep file")->required()->check(CLI::ExistingFile);
  s->add_option("--parallel", sw.parallel, "Worker threads")->check(CLI::PositiveNumber);
  s->add_option("--out", sw.out, "Results root (default: MCNSIM_OUT or results)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "usage error: " << e.what() << "\n";
    err << "run 'mcnsim --help' for usage\n";
    return 2;
  }

  std::ostringstream quiet;
  std::ostream& log = verbose ? err : quiet;
  try {
    if (g->parsed()) return cmd_generate(gen, out, log);
    if (r->parsed()) return cmd_run(run, out, log);
    return cmd_sweep(sw, out, log);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mcnsim::cli
