#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace daqn {

/// One CSV data row.
struct MetricRow {
  std::uint64_t seed = 0;
  long milestone = 0;  // environment step, or epoch for auto-encoder rows
  std::string metric;
  double value = 0.0;
  std::string method;
  std::string env;
  std::string config_hash;

  bool operator==(const MetricRow&) const = default;
};

inline constexpr const char* kCsvHeader = "seed,milestone,metric,value,method,env,config_hash";

/// Metric names written by the runner.
inline constexpr const char* kMetricEvalReward = "eval_reward";
inline constexpr const char* kMetricWinRatio = "win_ratio";
inline constexpr const char* kMetricAeMse = "ae_mse";
inline constexpr const char* kMetricFailed = "run_failed";

/// Sorts by (seed, milestone, metric) and writes UTF-8 with LF line endings.
/// Values use the shortest round-trip decimal form with a '.' separator.
void write_csv(const std::filesystem::path& path, std::vector<MetricRow> rows);
std::string format_csv(std::vector<MetricRow> rows);

/// Throws std::runtime_error naming the line on malformed input.
std::vector<MetricRow> read_csv(const std::filesystem::path& path);
std::vector<MetricRow> parse_csv(const std::string& text);

}  // namespace daqn
