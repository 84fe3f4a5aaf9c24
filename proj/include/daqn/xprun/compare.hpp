#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "daqn/nnkit/serialize.hpp"
#include "daqn/xprun/metrics.hpp"

namespace daqn {

/// Inputs cannot be compared (different env, metric or milestones).
class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MilestoneComparison {
  long milestone = 0;
  double mean_a = 0, std_a = 0, mean_b = 0, std_b = 0;  // sample std across seeds
  int wins_a = 0, wins_b = 0, ties = 0;                 // paired by seed
  double sign_p = 1.0;
};

struct SeedThreshold {
  std::uint64_t seed = 0;
  std::optional<long> steps_a, steps_b;
};

struct Comparison {
  std::string env, metric, method_a, method_b;
  double threshold = 0;
  std::vector<MilestoneComparison> milestones;
  /// First milestone whose mean across seeds reaches the threshold.
  std::optional<long> steps_a, steps_b;
  /// steps_a / steps_b; empty when either run never reaches the threshold.
  std::optional<double> ratio;
  std::vector<SeedThreshold> per_seed;
  /// Sign test over each seed's mean difference across milestones.
  int wins_a = 0, wins_b = 0, ties = 0;
  double sign_p = 1.0;
  std::string hash_a, hash_b;
  bool same_dqn_config() const { return hash_a == hash_b; }
};

/// Two-sided exact binomial sign test; ties are dropped beforehand.
double sign_test_p(int wins, int losses);

/// First milestone with value >= threshold. `curve` is (milestone, value) in
/// increasing milestone order.
std::optional<long> steps_to_threshold(const std::vector<std::pair<long, double>>& curve, double threshold);

/// Compares the evaluation metric (eval_reward or win_ratio) of two runs,
/// pairing seeds present in both. Throws CompareError on mismatched env,
/// metric or milestone sets, or when no seed is shared.
Comparison compare_runs(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b, double threshold);

Json to_json(const Comparison& c);
/// Human-readable table; "not reached" marks a threshold never crossed.
std::string format_report(const Comparison& c);

}  // namespace daqn
