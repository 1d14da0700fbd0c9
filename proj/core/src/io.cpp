#include "mcnsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mcnsim {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::kParse, what); }

// Typed access to one JSON object; rejects keys nobody asked about.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) parse_error(where_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) parse_error(where_ + " is missing '" + key + "'");
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_error(where_ + " is missing '" + key + "'");
    }
    return as_number(j_.at(key), where_ + "." + key);
  }

  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_error(where_ + " is missing '" + key + "'");
    }
    return as_count(j_.at(key), where_ + "." + key);
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_error(where_ + " is missing '" + key + "'");
    }
    const json& v = j_.at(key);
    if (!v.is_string()) parse_error(where_ + "." + key + " must be a string");
    return v.get<std::string>();
  }

  void check_schema(std::string_view expected) {
    if (!has("schema")) return;
    const std::string got = string("schema");
    if (got != expected) {
      parse_error(where_ + " has schema '" + got + "', expected '" + std::string(expected) + "'");
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) parse_error(where_ + " has unknown field '" + key + "'");
    }
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) parse_error(where + " must be a number");
    return v.get<double>();
  }

  static std::uint64_t as_count(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) parse_error(where + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_error(what + ": " + e.what());
  }
}

// Scalar broadcast to `n` entries, or an explicit array of exactly `n`.
std::vector<double> vector_field(const json& v, std::size_t n, const std::string& where) {
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  if (!v.is_array() || v.size() != n) {
    parse_error(where + " must be a number or an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  out.reserve(n);
  for (const auto& e : v) out.push_back(ObjectReader::as_number(e, where));
  return out;
}

PowerParams power_from(const json& v, const std::string& where) {
  ObjectReader r(v, where);
  const PowerParams d;
  PowerParams p;
  p.omega = r.number("omega", d.omega);
  p.c_eff = r.number("c_eff", d.c_eff);
  p.v_s = r.number("v_s", d.v_s);
  p.freq = r.number("freq", d.freq);
  p.alpha = r.number("alpha", d.alpha);
  p.beta = r.number("beta", d.beta);
  p.temp_k = r.number("temp_k", d.temp_k);
  r.finish();
  return p;
}

json power_to(const PowerParams& p) {
  return {{"omega", p.omega}, {"c_eff", p.c_eff}, {"v_s", p.v_s}, {"freq", p.freq},
          {"alpha", p.alpha}, {"beta", p.beta},   {"temp_k", p.temp_k}};
}

// {"h1": .., "h2": .., "h3": ..} or [h1, h2, h3].
RewardWeights weights_from(const json& v, const std::string& where) {
  if (v.is_array()) {
    if (v.size() != 3) parse_error(where + " must hold three weights");
    return RewardWeights(ObjectReader::as_number(v[0], where), ObjectReader::as_number(v[1], where),
                         ObjectReader::as_number(v[2], where));
  }
  ObjectReader r(v, where);
  const RewardWeights d;
  RewardWeights w(r.number("h1", d.h1()), r.number("h2", d.h2()), r.number("h3", d.h3()));
  r.finish();
  return w;
}

PlatformConfig platform_from(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.check_schema(kPlatformSchema);
  const Platform d = Platform::default_mcn();
  MeshDim mesh = d.mesh;
  if (r.has("mesh")) {
    const json& m = r.raw("mesh");
    if (!m.is_array() || m.size() != 2) parse_error(where + ".mesh must be [rows, cols]");
    mesh = {ObjectReader::as_count(m[0], where + ".mesh"),
            ObjectReader::as_count(m[1], where + ".mesh")};
  }
  const std::size_t cpn = r.count("cores_per_node", d.cores_per_node);
  Platform p = Platform::uniform(mesh, cpn, 1.0, 0.0, 1.0, d.comm_cost_rate, d.hop_latency);
  const std::size_t n = p.num_cores();
  if (n == 0) parse_error(where + " describes a platform without cores");
  p.num_cpu_cores = r.count("cpu_cores", d.num_cpu_cores);

  if (!r.has("delta")) {
    p.transfer_rate = Matrix(n, n, d.transfer_rate(0, 1));
    for (std::size_t k = 0; k < n; ++k) p.transfer_rate(k, k) = 0.0;
  } else if (const json& delta = r.raw("delta"); delta.is_number()) {
    p.transfer_rate = Matrix(n, n, delta.get<double>());
    for (std::size_t k = 0; k < n; ++k) p.transfer_rate(k, k) = 0.0;
  } else {
    if (!delta.is_array() || delta.size() != n) {
      parse_error(where + ".delta must be a number or an N x N array");
    }
    for (std::size_t k = 0; k < n; ++k) {
      const auto row = vector_field(delta[k], n, where + ".delta[" + std::to_string(k) + "]");
      for (std::size_t m = 0; m < n; ++m) p.transfer_rate(k, m) = row[m];
    }
  }
  p.startup = r.has("startup") ? vector_field(r.raw("startup"), n, where + ".startup")
                               : std::vector<double>(n, d.startup.front());
  p.comp_cost_rate = r.has("eta") ? vector_field(r.raw("eta"), n, where + ".eta")
                                  : std::vector<double>(n, d.comp_cost_rate.front());
  p.comm_cost_rate = r.number("zeta_comm", d.comm_cost_rate);
  p.hop_latency = r.number("hop_latency", d.hop_latency);
  p.link_bandwidth = r.number("link_bandwidth", d.link_bandwidth);
  p.time_unit_seconds = r.number("time_unit_seconds", d.time_unit_seconds);
  if (r.has("power")) {
    const json& pw = r.raw("power");
    if (pw.is_array()) {
      if (pw.size() != n) parse_error(where + ".power array must have N entries");
      p.power.clear();
      for (std::size_t k = 0; k < n; ++k) {
        p.power.push_back(power_from(pw[k], where + ".power[" + std::to_string(k) + "]"));
      }
    } else {
      p.power.assign(n, power_from(pw, where + ".power"));
    }
  }
  PlatformConfig out{std::move(p), std::nullopt};
  if (r.has("weights")) out.weights = weights_from(r.raw("weights"), where + ".weights");
  r.finish();
  out.platform.validate();
  return out;
}

template <class T>
json compact(const std::vector<T>& v) {
  for (const auto& x : v) {
    if (!(x == v.front())) return json(v);
  }
  return json(v.front());
}

}  // namespace

PlatformConfig parse_platform(std::string_view text) {
  return platform_from(parse_json(text, "platform"), "platform");
}

PlatformConfig load_platform(const std::filesystem::path& path) {
  return parse_platform(read_file(path));
}

std::string dump_platform(const Platform& p, const std::optional<RewardWeights>& weights) {
  json j;
  j["schema"] = kPlatformSchema;
  j["mesh"] = {p.mesh.rows, p.mesh.cols};
  j["cores_per_node"] = p.cores_per_node;
  j["cpu_cores"] = p.num_cpu_cores;
  const std::size_t n = p.num_cores();
  bool uniform = n > 1;
  for (std::size_t k = 0; k < n && uniform; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      if (k != m && p.transfer_rate(k, m) != p.transfer_rate(0, 1)) {
        uniform = false;
        break;
      }
    }
  }
  if (uniform) {
    j["delta"] = p.transfer_rate(0, 1);
  } else {
    json rows = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      json row = json::array();
      for (std::size_t m = 0; m < n; ++m) row.push_back(p.transfer_rate(k, m));
      rows.push_back(row);
    }
    j["delta"] = rows;
  }
  j["startup"] = compact(p.startup);
  j["eta"] = compact(p.comp_cost_rate);
  j["zeta_comm"] = p.comm_cost_rate;
  j["hop_latency"] = p.hop_latency;
  j["link_bandwidth"] = p.link_bandwidth;
  j["time_unit_seconds"] = p.time_unit_seconds;
  bool same_power = true;
  for (const auto& pw : p.power) same_power = same_power && pw == p.power.front();
  if (same_power) {
    j["power"] = power_to(p.power.front());
  } else {
    json arr = json::array();
    for (const auto& pw : p.power) arr.push_back(power_to(pw));
    j["power"] = arr;
  }
  if (weights) j["weights"] = {{"h1", weights->h1()}, {"h2", weights->h2()}, {"h3", weights->h3()}};
  return j.dump(2) + "\n";
}

WorkloadFile parse_workload(std::string_view text) {
  const json j = parse_json(text, "workload");
  ObjectReader r(j, "workload");
  r.check_schema(kDagSchema);
  const std::size_t q = r.count("tasks");
  const json& et = r.raw("exec_time");
  if (!et.is_array() || et.empty()) parse_error("workload.exec_time must be a non-empty array");
  Matrix exec;
  if (et.front().is_array()) {
    if (et.size() != q) parse_error("workload.exec_time must have one row per task");
    const std::size_t n = et.front().size();
    exec = Matrix(q, n);
    for (std::size_t t = 0; t < q; ++t) {
      const auto row = vector_field(et[t], n, "workload.exec_time[" + std::to_string(t) + "]");
      for (std::size_t k = 0; k < n; ++k) exec(t, k) = row[k];
    }
  } else {
    const std::size_t n = q == 0 ? 0 : et.size() / q;
    if (r.has("cores")) {
      if (r.count("cores") != n) parse_error("workload.cores disagrees with exec_time length");
    }
    if (q == 0 || n * q != et.size()) parse_error("workload.exec_time must hold tasks x cores values");
    const auto flat = vector_field(et, q * n, "workload.exec_time");
    exec = Matrix(q, n);
    for (std::size_t t = 0; t < q; ++t) {
      for (std::size_t k = 0; k < n; ++k) exec(t, k) = flat[t * n + k];
    }
  }
  if (r.has("cores") && r.count("cores") != exec.cols()) {
    parse_error("workload.cores disagrees with exec_time");
  }
  std::vector<Edge> edges;
  if (r.has("edges")) {
    const json& ej = r.raw("edges");
    if (!ej.is_array()) parse_error("workload.edges must be an array");
    for (const auto& e : ej) {
      if (!e.is_array() || e.size() != 3) parse_error("workload.edges entries must be [src, dst, bytes]");
      edges.push_back({ObjectReader::as_count(e[0], "workload.edges"),
                       ObjectReader::as_count(e[1], "workload.edges"),
                       ObjectReader::as_number(e[2], "workload.edges")});
    }
  }
  std::optional<AffinityMap> affinity;
  if (r.has("affinity")) {
    const json& a = r.raw("affinity");
    if (!a.is_array()) parse_error("workload.affinity must be an array of [row, col]");
    std::vector<NodeCoord> nodes;
    for (const auto& n : a) {
      if (!n.is_array() || n.size() != 2) parse_error("workload.affinity entries must be [row, col]");
      nodes.push_back({ObjectReader::as_count(n[0], "workload.affinity"),
                       ObjectReader::as_count(n[1], "workload.affinity")});
    }
    affinity = AffinityMap(std::move(nodes));
  }
  r.finish();
  return {TaskGraph(q, std::move(edges), std::move(exec)), std::move(affinity)};
}

WorkloadFile load_workload(const std::filesystem::path& path) {
  return parse_workload(read_file(path));
}

std::string dump_workload(const TaskGraph& g, const std::optional<AffinityMap>& affinity) {
  json j;
  j["schema"] = kDagSchema;
  j["tasks"] = g.num_tasks();
  j["cores"] = g.num_cores();
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.src, e.dst, e.bytes});
  j["edges"] = edges;
  json rows = json::array();
  for (TaskId t = 0; t < g.num_tasks(); ++t) {
    json row = json::array();
    for (CoreId k = 0; k < g.num_cores(); ++k) row.push_back(g.exec_time(t, k));
    rows.push_back(row);
  }
  j["exec_time"] = rows;
  if (affinity) {
    json a = json::array();
    for (const auto& n : affinity->nodes()) a.push_back({n.row, n.col});
    j["affinity"] = a;
  }
  return j.dump() + "\n";
}

SweepConfig parse_sweep(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text, "sweep");
  ObjectReader r(j, "sweep");
  r.check_schema(kSweepSchema);
  SweepConfig out;
  ExperimentConfig& ex = out.experiment;
  ex.name = r.string("name", std::string("experiment"));
  std::optional<RewardWeights> platform_weights;
  if (r.has("platform") && r.has("platform_file")) {
    parse_error("sweep may set 'platform' or 'platform_file', not both");
  }
  if (r.has("platform")) {
    auto pc = platform_from(r.raw("platform"), "sweep.platform");
    ex.platform = std::move(pc.platform);
    platform_weights = pc.weights;
  } else if (r.has("platform_file")) {
    std::filesystem::path path = r.string("platform_file");
    if (path.is_relative()) path = base_dir / path;
    auto pc = load_platform(path);
    ex.platform = std::move(pc.platform);
    platform_weights = pc.weights;
  }

  const json& wl = r.raw("workloads");
  if (!wl.is_array()) parse_error("sweep.workloads must be an array");
  for (std::size_t i = 0; i < wl.size(); ++i) {
    const std::string where = "sweep.workloads[" + std::to_string(i) + "]";
    ObjectReader w(wl[i], where);
    NamedWorkload nw;
    const WorkloadKind kind = parse_workload_kind(w.string("kind"));
    WorkloadSpec s = WorkloadSpec::defaults(kind);
    nw.name = w.string("name", std::string(to_string(kind)));
    s.num_tasks = w.count("tasks", s.num_tasks);
    s.queries = w.count("queries", s.queries);
    s.depth = w.count("depth", s.depth);
    s.edge_probability = w.number("edge_probability", s.edge_probability);
    s.data_volume_scale = w.number("data_volume_scale", s.data_volume_scale);
    if (w.has("exec_time_range")) {
      const json& range = w.raw("exec_time_range");
      if (!range.is_array() || range.size() != 2) parse_error(where + ".exec_time_range must be [min, max]");
      s.exec_time_range = {ObjectReader::as_number(range[0], where), ObjectReader::as_number(range[1], where)};
    }
    s.heterogeneity_factor = w.number("heterogeneity_factor", s.heterogeneity_factor);
    s.seed = w.count("seed", s.seed);
    if (w.has("affinity_node")) {
      const json& n = w.raw("affinity_node");
      if (!n.is_array() || n.size() != 2) parse_error(where + ".affinity_node must be [row, col]");
      nw.affinity_node = NodeCoord{ObjectReader::as_count(n[0], where), ObjectReader::as_count(n[1], where)};
    }
    w.finish();
    nw.spec = s;
    ex.workloads.push_back(std::move(nw));
  }

  const json& st = r.raw("strategies");
  if (!st.is_array()) parse_error("sweep.strategies must be an array");
  for (const auto& s : st) {
    if (!s.is_string()) parse_error("sweep.strategies entries must be strings");
    ex.strategies.push_back(parse_strategy(s.get<std::string>()));
  }

  const json& seeds = r.raw("seeds");
  if (seeds.is_array()) {
    for (const auto& s : seeds) ex.seeds.push_back(ObjectReader::as_count(s, "sweep.seeds"));
  } else {
    ObjectReader sr(seeds, "sweep.seeds");
    const std::uint64_t start = sr.count("start", 0);
    const std::uint64_t n = sr.count("count");
    sr.finish();
    for (std::uint64_t i = 0; i < n; ++i) ex.seeds.push_back(start + i);
  }

  ex.mab.iterations = r.count("iterations", ex.mab.iterations);
  ex.mab.sigma = r.number("sigma", ex.mab.sigma);
  ex.mab.plateau = r.count("plateau", 0);
  const std::string scope = r.string("bandit_scope", std::string("global"));
  if (scope == "global") {
    ex.mab.scope = BanditScope::kGlobal;
  } else if (scope == "per-node") {
    ex.mab.scope = BanditScope::kPerNode;
  } else {
    parse_error("sweep.bandit_scope must be 'global' or 'per-node'");
  }
  ex.parallel = r.count("parallel", 1);
  if (r.has("weights")) {
    const json& wj = r.raw("weights");
    if (wj.is_array() && !(wj.size() == 3 && wj[0].is_number())) {
      for (std::size_t i = 0; i < wj.size(); ++i) {
        out.weight_grid.push_back(weights_from(wj[i], "sweep.weights[" + std::to_string(i) + "]"));
      }
    } else {
      out.weight_grid.push_back(weights_from(wj, "sweep.weights"));
    }
  } else {
    out.weight_grid.push_back(platform_weights.value_or(RewardWeights{}));
  }
  if (out.weight_grid.empty()) parse_error("sweep.weights must not be empty");
  ex.mab.weights = out.weight_grid.front();
  r.finish();
  ex.validate();
  return out;
}

SweepConfig load_sweep(const std::filesystem::path& path) {
  return parse_sweep(read_file(path), path.parent_path());
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_report_header(std::ostream& os, bool with_workload) {
  os << "# schema: " << (with_workload ? kRawSchema : kReportSchema) << "\n";
  if (with_workload) os << "workload,";
  os << "strategy,seed,makespan,throughput_proxy,avg_packet_latency,total_energy,"
        "total_avg_power,best_regret\n";
}

void write_report_row(std::ostream& os, const RunReport& r, double time_scale,
                      const std::string* workload) {
  if (workload) os << *workload << ',';
  os << r.strategy << ',' << r.seed << ',' << format_number(r.makespan * time_scale) << ','
     << format_number(r.throughput_proxy) << ','
     << format_number(r.avg_packet_latency * time_scale) << ',' << format_number(r.total_energy)
     << ',' << format_number(r.total_avg_power) << ','
     << (r.best_regret ? format_number(*r.best_regret) : std::string()) << '\n';
}

void write_report_csv(std::ostream& os, const RunReport& r, double time_scale) {
  write_report_header(os, false);
  write_report_row(os, r, time_scale);
}

void write_raw_csv(std::ostream& os, const std::vector<ExperimentRow>& rows, double time_scale) {
  write_report_header(os, true);
  for (const auto& row : rows) write_report_row(os, row.report, time_scale, &row.workload);
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "# schema: " << kSummarySchema << "\n";
  static constexpr const char* kNames[] = {"makespan", "throughput_proxy", "avg_packet_latency",
                                           "total_energy", "total_avg_power"};
  os << "workload,strategy,runs";
  for (const char* n : kNames) os << ',' << n;
  for (const char* n : kNames) os << ',' << n << "_norm";
  for (const char* n : kNames) os << ',' << n << "_reduced_pct";
  os << '\n';
  const auto put = [&os](const Metrics& m) {
    os << ',' << format_number(m.makespan) << ',' << format_number(m.throughput_proxy) << ','
       << format_number(m.avg_packet_latency) << ',' << format_number(m.total_energy) << ','
       << format_number(m.total_avg_power);
  };
  for (const auto& row : rows) {
    os << row.workload << ',' << row.comparison.strategy << ',' << row.runs;
    put(row.comparison.value);
    put(row.comparison.ratio);
    put(row.comparison.reduced);
    os << '\n';
  }
}

void write_regret_csv(std::ostream& os, const RegretLedger& ledger) {
  os << "# schema: " << kRegretSchema << "\n";
  os << "iteration,regret,best_regret\n";
  for (std::size_t i = 0; i < ledger.per_iteration_regret.size(); ++i) {
    os << i + 1 << ',' << format_number(ledger.per_iteration_regret[i]) << ','
       << format_number(ledger.best_regret_trace[i]) << '\n';
  }
}

void write_per_core_csv(std::ostream& os, const RunReport& r, double time_scale) {
  os << "# schema: " << kPerCoreSchema << "\n";
  os << "core_id,busy_time\n";
  for (std::size_t k = 0; k < r.per_core_busy.size(); ++k) {
    os << k << ',' << format_number(r.per_core_busy[k] * time_scale) << '\n';
  }
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::kInvalidInput, "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mcnsim
