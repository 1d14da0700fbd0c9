// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "mcnsim/io.hpp"
#include "oracle.hpp"

using namespace mcnsim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %d. %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool rel_eq(double got, double want, double tol = 1e-12) {
  if (want == 0.0) return std::abs(got) <= tol;
  return std::abs(got - want) <= tol * std::abs(want);
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------
// 1. Equations against hand-computed values.

Platform pair_platform(double rate, Time startup) {
  return Platform::uniform({1, 2}, 1, rate, startup, 1.0, 0.1, 1.0);
}

Matrix filled(std::size_t r, std::size_t c, double v) { return Matrix(r, c, v); }

Outcome equations() {
  std::vector<std::string> bad;
  auto check = [&](const char* what, double got, double want) {
    if (!rel_eq(got, want)) bad.push_back(fmt("%s got %.17g want %.17g", what, got, want));
  };

  {
    const Platform p = pair_platform(25.0, 5.0);
    const TaskGraph g(2, {{0, 1, 100}}, filled(2, 2, 1.0));
    check("comm same core", comm_time(0, 1, 1, 1, g, p), 0.0);
    check("comm 5+100/25", comm_time(0, 1, 0, 1, g, p), 9.0);
    const Platform z = pair_platform(25.0, 0.0);
    const TaskGraph g0(2, {{0, 1, 0}}, filled(2, 2, 1.0));
    check("comm zero data", comm_time(0, 1, 0, 1, g0, z), 0.0);
  }
  {
    const Platform p = pair_platform(25.0, 1.0);
    const TaskGraph g(2, {{0, 1, 50}}, filled(2, 2, 10.0));
    std::vector<std::optional<TaskTiming>> timings(2);
    std::vector<Time> avail{0.0, 0.0};
    check("est entry", est(0, 1, g, p, timings, avail), 0.0);
    timings[0] = TaskTiming{0, 0, 0, 10, 0, 10};
    avail = {10.0, 8.0};
    check("est arrival", est(1, 1, g, p, timings, avail), 13.0);
    avail[1] = 20.0;
    check("est avail", est(1, 1, g, p, timings, avail), 20.0);
  }
  {
    Matrix m(1, 2);
    m(0, 0) = 7.0;
    m(0, 1) = 4.0;
    const TaskGraph g(1, {}, m);
    check("eft 7+13", eft(0, 0, 13.0, g), 20.0);
    check("eft entry", eft(0, 1, 0.0, g), 4.0);
  }
  {
    Platform p = pair_platform(1.0, 0.0);
    p.comp_cost_rate = {0.5, 1.0};
    const std::vector<Time> comms{3.0, 4.0};
    check("resource 20*0.5+0.1*7", resource_cost(0, 20.0, comms, p), 10.7);
    check("resource entry", resource_cost(1, 4.0, std::span<const Time>{}, p), 4.0);
    p.comm_cost_rate = 0.0;
    check("resource zeta 0", resource_cost(0, 20.0, comms, p), 10.0);
  }
  {
    const PowerParams pw;  // omega 0.5, C 1e-9, V 1, f 2e9, alpha 0.01, T 330, beta 0.03
    check("dynamic power", pw.dynamic_watts(), 1.0);
    check("idle power", power_draw(pw, false), 0.099);
    check("active power", power_draw(pw, true), 1.099);
  }
  {
    check("reward h=(1,0,0)", reward(20.0, 10.7, 1.099, RewardWeights(1, 0, 0)), -20.0);
    check("reward h=(1,1,1)", reward(20.0, 10.7, 1.099, RewardWeights(1, 1, 1)), -31.799);
    bool rejected = false;
    try {
      RewardWeights(0, 0, 0);
    } catch (const Error&) {
      rejected = true;
    }
    if (!rejected) bad.push_back("h=(0,0,0) accepted");
  }
  {
    BanditState s(2, 2.0);
    for (int i = 0; i < 10; ++i) s.record_reward(0, -5.0);
    for (int i = 0; i < 2; ++i) s.record_reward(1, -7.0);
    check("ucb arm A", s.ucb_index(0), -5.0 + 2.0 * std::sqrt(std::log(12.0) / 10.0));
    check("ucb arm B", s.ucb_index(1), -7.0 + 2.0 * std::sqrt(std::log(12.0) / 2.0));
    if (std::abs(s.ucb_index(0) - -4.003) > 5e-4 || std::abs(s.ucb_index(1) - -4.771) > 5e-4) {
      bad.push_back("ucb indices differ from -4.003 / -4.771");
    }
    if (select_arm(s) != 0) bad.push_back("ucb picked arm B");
    BanditState fresh(3, 2.0);
    if (select_arm(fresh) != 0) bad.push_back("warm-up did not start at arm 0");
  }
  {
    const std::vector<double> arms{-40.0, -60.0};
    check("regret 15", regret(-55.0, arms), 15.0);
    check("regret optimal", regret(-40.0, arms), 0.0);
    const std::vector<double> one{-12.5};
    check("regret single arm", regret(-12.5, one), 0.0);
  }
  if (!bad.empty()) {
    std::string d;
    for (const auto& b : bad) d += b + "; ";
    return {false, d};
  }
  return {true, "comm_time, EST, EFT, resource cost, power, reward, UCB index, regret exact"};
}

// ---------------------------------------------------------------------------
// 2. Brute-force optimum on small instances.

Outcome brute_force() {
  std::mt19937_64 rng(20240501);
  const RewardWeights w;
  std::size_t within = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t q = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const bool spread = n > 1 && (rng() & 1);
    const Platform p = spread ? oracle::random_platform(rng, 1, n, 1)
                              : oracle::random_platform(rng, 1, 1, n);
    const TaskGraph g = oracle::random_dag(rng, q, n, 0.5);
    const double best = oracle::brute_force_min_cost(g, p, w);

    MabOptions o;
    o.weights = w;
    o.iterations = 500;
    o.seed = static_cast<std::uint64_t>(i);
    const MabResult r = allocate_mab(g, p, o);
    const double got = oracle::total_cost(g, p, w, oracle::order_of(r.allocation),
                                          oracle::cores_of(r.allocation));
    const double gap = (got - best) / best;
    worst = std::max(worst, gap);
    if (gap <= 0.05) ++within;
  }
  return {within >= 95, fmt("%zu/100 within 5%% of the exhaustive minimum (need 95), worst gap %.2f%%",
                            within, worst * 100.0)};
}

// ---------------------------------------------------------------------------
// 3. Best regret never increases.

Outcome ledger_monotone() {
  std::mt19937_64 rng(77);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t rows = 1 + rng() % 2, cols = 1 + rng() % 2, cpn = 1 + rng() % 3;
    const Platform p = oracle::random_platform(rng, rows, cols, cpn);
    const std::size_t q = 1 + rng() % 12;
    const TaskGraph g = oracle::random_dag(rng, q, p.num_cores(), 0.3);
    MabOptions o;
    o.iterations = 1 + rng() % 60;
    o.sigma = std::uniform_real_distribution<double>(0.0, 4.0)(rng);
    o.seed = rng();
    o.scope = (rng() & 1) ? BanditScope::kPerNode : BanditScope::kGlobal;
    o.weights = RewardWeights(std::uniform_real_distribution<double>(0.1, 2.0)(rng),
                              std::uniform_real_distribution<double>(0.0, 1.0)(rng),
                              std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const RegretLedger l = allocate_mab(g, p, o).ledger;
    bool ok = l.best_regret_trace.size() == l.per_iteration_regret.size();
    double prefix_min = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; ok && it < l.best_regret_trace.size(); ++it) {
      if (it > 0 && l.best_regret_trace[it] > l.best_regret_trace[it - 1]) ok = false;
      prefix_min = std::min(prefix_min, l.per_iteration_regret[it]);
      if (l.best_regret_trace[it] != prefix_min) ok = false;
    }
    if (ok && l.best_regret != l.best_regret_trace.back()) ok = false;
    if (!ok) ++violations;
  }
  return {violations == 0, fmt("%zu of 1000 random configurations violate monotonicity", violations)};
}

// ---------------------------------------------------------------------------
// 4. Sublinear regret on a stationary bandit.

Outcome stationary_bandit() {
  constexpr std::size_t kArms = 16, kPlays = 10000, kSeeds = 20;
  std::vector<double> mean_cost(kArms);
  for (std::size_t j = 0; j < kArms; ++j) mean_cost[j] = 1.0 + 0.2 * static_cast<double>(j);
  const double best = mean_cost.front();
  double ucb = 0.0, uniform = 0.0;
  for (std::size_t seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    BanditState s(kArms, 2.0, seed);
    double pseudo = 0.0;
    for (std::size_t t = 0; t < kPlays; ++t) {
      const CoreId arm = select_arm(s);
      s.record_reward(arm, -(mean_cost[arm] + noise(rng)));
      pseudo += mean_cost[arm] - best;
    }
    ucb += pseudo;
    std::uniform_int_distribution<std::size_t> pick(0, kArms - 1);
    double rnd = 0.0;
    for (std::size_t t = 0; t < kPlays; ++t) rnd += mean_cost[pick(rng)] - best;
    uniform += rnd;
  }
  const double ratio = ucb / uniform;
  return {ratio < 0.20, fmt("UCB pseudo-regret %.1f vs uniform %.1f (ratio %.3f, need < 0.20)",
                            ucb / kSeeds, uniform / kSeeds, ratio)};
}

// ---------------------------------------------------------------------------
// Shared grid for criteria 5, 6 and 9.

Platform grid_platform() { return Platform::uniform({4, 4}, 4, 10.0, 10.0, 1.0, 0.1, 1.0); }

std::vector<std::uint64_t> seeds20() {
  std::vector<std::uint64_t> s(20);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// rows[strategy][seed]
std::vector<std::vector<RunReport>> run_grid(const NamedWorkload& w,
                                             const std::vector<Strategy>& strategies,
                                             const MabOptions& mab) {
  ExperimentConfig c;
  c.platform = grid_platform();
  c.workloads = {w};
  c.strategies = strategies;
  c.seeds = seeds20();
  c.mab = mab;
  c.parallel = workers();
  const auto rows = run_experiment(c);
  std::vector<std::vector<RunReport>> out(strategies.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i / c.seeds.size()].push_back(rows[i].report);
  return out;
}

template <class F>
double mean_of(const std::vector<RunReport>& runs, F field) {
  double s = 0.0;
  for (const auto& r : runs) s += field(r);
  return s / static_cast<double>(runs.size());
}

std::size_t wins(const std::vector<RunReport>& a, const std::vector<RunReport>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i].makespan <= b[i].makespan;
  return n;
}

NamedWorkload layered() {
  WorkloadSpec s = WorkloadSpec::defaults(WorkloadKind::kLayeredRandom);
  s.num_tasks = 64;
  return {"layered_random", s, std::nullopt};
}

constexpr auto kMakespan = [](const RunReport& r) { return r.makespan; };
constexpr auto kEnergy = [](const RunReport& r) { return r.total_energy; };
constexpr auto kLatency = [](const RunReport& r) { return r.avg_packet_latency; };

// ---------------------------------------------------------------------------
// 5. Makespan ordering and the greedy queueing pathology.

Outcome ordering() {
  const std::vector<Strategy> st{Strategy::kMab, Strategy::kRandom, Strategy::kGrouped};
  const auto runs = run_grid(layered(), st, MabOptions{});
  const double mab = mean_of(runs[0], kMakespan);
  const double rnd = mean_of(runs[1], kMakespan);
  const double grp = mean_of(runs[2], kMakespan);
  const std::size_t w_rnd = wins(runs[0], runs[1]);
  const std::size_t w_grp = wins(runs[0], runs[2]);

  // Dominant core: core 0 runs every task in half the best time of any other core.
  const Platform p = grid_platform();
  std::size_t dominant_wins = 0;
  double mab_dom = 0.0, greedy_dom = 0.0;
  for (std::uint64_t seed : seeds20()) {
    WorkloadSpec spec = layered().spec;
    spec.seed = instance_seed(spec, seed);
    const TaskGraph base = generate(spec, p);
    Matrix exec = base.exec_time_matrix();
    for (TaskId t = 0; t < base.num_tasks(); ++t) {
      double fastest = std::numeric_limits<double>::infinity();
      for (CoreId k = 1; k < p.num_cores(); ++k) fastest = std::min(fastest, exec(t, k));
      exec(t, 0) = fastest / 2.0;
    }
    const TaskGraph g(base.num_tasks(), base.edges(), exec);
    StrategyParams params;
    params.seed = seed;
    params.mab.seed = seed;
    const double m = execute(allocate(Strategy::kMab, g, p, params).allocation, g, p).makespan;
    const double gr = execute(allocate(Strategy::kGreedy, g, p, params).allocation, g, p).makespan;
    mab_dom += m;
    greedy_dom += gr;
    dominant_wins += m < gr;
  }

  const bool pass = mab <= rnd && mab <= grp && w_rnd >= 16 && w_grp >= 16 && dominant_wins >= 18;
  return {pass,
          fmt("mean makespan mab %.1f, random %.1f, grouped %.1f; mab wins %zu/20 vs random, "
              "%zu/20 vs grouped (need 16); dominant core mab %.1f vs greedy %.1f, strictly "
              "lower in %zu/20 (need 18)",
              mab, rnd, grp, w_rnd, w_grp, mab_dom / 20.0, greedy_dom / 20.0, dominant_wins)};
}

// ---------------------------------------------------------------------------
// 6. Energy ordering with a power term in the reward.

Outcome energy() {
  const std::vector<Strategy> st{Strategy::kMab, Strategy::kRandom};
  const auto with_power = run_grid(layered(), st, MabOptions{});
  const double mab = mean_of(with_power[0], kEnergy);
  const double rnd = mean_of(with_power[1], kEnergy);
  MabOptions no_power;
  no_power.weights = RewardWeights(1.0, 0.5, 0.0);
  const auto without = run_grid(layered(), {Strategy::kMab}, no_power);
  const double mab0 = mean_of(without[0], kEnergy);
  return {mab < rnd,
          fmt("h3=0.5: mean energy mab %.4g J vs random %.4g J (%.1f%% reduced); "
              "h3=0 (informational): mab %.4g J",
              mab, rnd, (rnd - mab) / rnd * 100.0, mab0)};
}

// ---------------------------------------------------------------------------
// 7. Engine validity over random runs.

Outcome engine_validity() {
  std::mt19937_64 rng(4242);
  std::size_t bad_disjoint = 0, bad_arrive = 0, bad_energy = 0, bad_local = 0;
  const Strategy all[] = {Strategy::kRandom, Strategy::kGrouped, Strategy::kGreedy, Strategy::kMab};
  for (int i = 0; i < 1000; ++i) {
    const std::size_t rows = 1 + rng() % 3, cols = 1 + rng() % 3, cpn = 1 + rng() % 3;
    const Platform p = oracle::random_platform(rng, rows, cols, cpn);
    const TaskGraph g = oracle::random_dag(rng, 1 + rng() % 30, p.num_cores(), 0.25);
    StrategyParams params;
    params.seed = rng();
    params.mab.iterations = 20;
    params.mab.seed = params.seed;
    const RunReport r = execute(allocate(all[i % 4], g, p, params).allocation, g, p);

    std::vector<std::vector<std::pair<Time, Time>>> per_core(p.num_cores());
    std::vector<Time> ast(g.num_tasks());
    std::vector<Time> busy(p.num_cores(), 0.0);
    Time makespan = 0.0;
    for (const TaskTiming& t : r.timings) {
      per_core[t.core].emplace_back(t.ast, t.aft);
      ast[t.task] = t.ast;
      makespan = std::max(makespan, t.aft);
    }
    for (TaskId t = 0; t < g.num_tasks(); ++t) {
      const auto it = std::find_if(r.timings.begin(), r.timings.end(),
                                   [t](const TaskTiming& x) { return x.task == t; });
      busy[it->core] += it->aft - it->ast;
    }
    for (auto& iv : per_core) {
      std::sort(iv.begin(), iv.end());
      for (std::size_t k = 1; k < iv.size(); ++k) {
        if (iv[k].first < iv[k - 1].second) ++bad_disjoint;
      }
    }
    for (const MessageEvent& m : r.messages) {
      if (m.arrive > ast[m.dst_task]) ++bad_arrive;
      const bool same_node = m.src_core / p.cores_per_node == m.dst_core / p.cores_per_node;
      if (same_node && m.latency != 0.0) ++bad_local;
    }
    double energy = 0.0;
    for (CoreId k = 0; k < p.num_cores(); ++k) {
      const PowerParams& pw = p.power[k];
      energy += pw.alpha * pw.temp_k * pw.beta * makespan +
                pw.omega * pw.c_eff * pw.v_s * pw.v_s * pw.freq * busy[k];
    }
    energy *= p.time_unit_seconds;
    if (energy != r.total_energy || makespan != r.makespan) ++bad_energy;
  }
  const bool pass = bad_disjoint + bad_arrive + bad_energy + bad_local == 0;
  return {pass, fmt("1000 runs: %zu overlapping intervals, %zu late arrivals, %zu energy "
                    "mismatches, %zu nonzero same-node latencies",
                    bad_disjoint, bad_arrive, bad_energy, bad_local)};
}

// ---------------------------------------------------------------------------
// 8. Byte-identical CLI output on rerun, matching the checked-in golden files.

Outcome determinism() {
  const fs::path golden = MCNSIM_GOLDEN_DIR;
  const char* platform = R"({"mesh": [2, 2], "cores_per_node": 4, "delta": 10,
  "startup": 10, "eta": 1, "zeta_comm": 0.1, "hop_latency": 1})";

  auto scenario = [&](const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_file(dir / "p.json", platform);
    const std::string pj = (dir / "p.json").string(), wj = (dir / "w.json").string();
    auto cli = [](std::vector<std::string> args) {
      std::ostringstream out, err;
      if (cli::run_cli(args, out, err) != 0) throw std::runtime_error(err.str());
      return out.str();
    };
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("pipeline_q2.json", cli({"generate", "--kind", "pipeline", "--queries", "2",
                                                "--seed", "3", "--cores", "16"}));
    cli({"generate", "--kind", "layered_random", "--tasks", "20", "--depth", "4", "--seed", "1",
         "--cores", "16", "--out", wj});
    cli({"run", "--platform", pj, "--workload", wj, "--strategy", "random", "--seed", "5",
         "--per-core", "--out", dir.string()});
    files.emplace_back("random_report.csv", read_file(dir / "report.csv"));
    files.emplace_back("random_per_core.csv", read_file(dir / "per_core.csv"));
    cli({"generate", "--kind", "fine_grained", "--tasks", "16", "--seed", "2", "--cores", "16",
         "--out", wj});
    cli({"run", "--platform", pj, "--workload", wj, "--strategy", "mab", "--R", "50", "--seed",
         "9", "--out", dir.string()});
    files.emplace_back("mab_report.csv", read_file(dir / "report.csv"));
    files.emplace_back("mab_regret.csv", read_file(dir / "regret.csv"));
    fs::remove_all(dir);
    return files;
  };

  const fs::path tmp = fs::temp_directory_path() / "mcnsim_acceptance";
  const auto first = scenario(tmp / "a");
  const auto second = scenario(tmp / "b");
  std::size_t rerun_diff = 0, golden_diff = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    rerun_diff += first[i].second != second[i].second;
    const fs::path g = golden / first[i].first;
    golden_diff += !fs::exists(g) || read_file(g) != first[i].second;
  }
  fs::remove_all(tmp);
  return {rerun_diff == 0 && golden_diff == 0,
          fmt("3 scenarios, %zu files: %zu differ on rerun, %zu differ from golden", first.size(),
              rerun_diff, golden_diff)};
}

// ---------------------------------------------------------------------------
// 9. Packet latency: grouped versus MAB on communication-heavy work.

Outcome latency() {
  WorkloadSpec s = WorkloadSpec::defaults(WorkloadKind::kFineGrained);
  s.num_tasks = 64;
  const NamedWorkload w{"fine_grained", s, NodeCoord{0, 0}};
  const auto runs = run_grid(w, {Strategy::kGrouped, Strategy::kMab}, MabOptions{});
  const double grp = mean_of(runs[0], kLatency);
  const double mab = mean_of(runs[1], kLatency);
  return {grp > mab, fmt("mean avg_packet_latency grouped %.3f vs mab %.3f (need grouped > mab)",
                         grp, mab)};
}

}  // namespace

int main() {
  report(1, "equation suite", 1.0, equations);
  report(2, "brute-force optimality", 120.0, brute_force);
  report(3, "regret ledger monotonicity", 0.0, ledger_monotone);
  report(4, "UCB sublinear regret", 30.0, stationary_bandit);
  report(5, "comparative makespan ordering", 300.0, ordering);
  report(6, "energy ordering", 0.0, energy);
  report(7, "engine conservation and validity", 0.0, engine_validity);
  report(8, "determinism", 0.0, determinism);
  report(9, "packet-latency ordering", 0.0, latency);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
