#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcnsim/allocators.hpp"
#include "mcnsim/bench.hpp"
#include "mcnsim/engine.hpp"

namespace mcnsim {

// Schema identifiers written into every file; see docs/formats.md.
inline constexpr std::string_view kPlatformSchema = "mcnsim.platform/1";
inline constexpr std::string_view kDagSchema = "mcnsim.dag/1";
inline constexpr std::string_view kSweepSchema = "mcnsim.sweep/1";
inline constexpr std::string_view kReportSchema = "mcnsim.report/1";
inline constexpr std::string_view kRawSchema = "mcnsim.raw/1";
inline constexpr std::string_view kSummarySchema = "mcnsim.summary/1";
inline constexpr std::string_view kRegretSchema = "mcnsim.regret/1";
inline constexpr std::string_view kPerCoreSchema = "mcnsim.per_core/1";

struct PlatformConfig {
  Platform platform;
  std::optional<RewardWeights> weights;
};

// Parsers throw Error(kParse) for malformed documents and Error(kInvalidInput)
// for documents that parse but violate an invariant.
PlatformConfig parse_platform(std::string_view json_text);
PlatformConfig load_platform(const std::filesystem::path& path);
std::string dump_platform(const Platform& p, const std::optional<RewardWeights>& weights = {});

struct WorkloadFile {
  TaskGraph graph;
  std::optional<AffinityMap> affinity;
};

WorkloadFile parse_workload(std::string_view json_text);
WorkloadFile load_workload(const std::filesystem::path& path);
std::string dump_workload(const TaskGraph& g, const std::optional<AffinityMap>& affinity = {});

struct SweepConfig {
  ExperimentConfig experiment;
  std::vector<RewardWeights> weight_grid;  // one run of the grid per entry
};

/// Relative `platform_file` entries resolve against `base_dir`.
SweepConfig parse_sweep(std::string_view json_text, const std::filesystem::path& base_dir = {});
SweepConfig load_sweep(const std::filesystem::path& path);

/// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double v);

/// `time_scale` multiplies makespan and avg_packet_latency (e.g. to femtoseconds).
void write_report_header(std::ostream& os, bool with_workload);
void write_report_row(std::ostream& os, const RunReport& r, double time_scale = 1.0,
                      const std::string* workload = nullptr);
void write_report_csv(std::ostream& os, const RunReport& r, double time_scale = 1.0);
void write_raw_csv(std::ostream& os, const std::vector<ExperimentRow>& rows,
                   double time_scale = 1.0);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_regret_csv(std::ostream& os, const RegretLedger& ledger);
void write_per_core_csv(std::ostream& os, const RunReport& r, double time_scale = 1.0);

/// Writes `contents` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace mcnsim
