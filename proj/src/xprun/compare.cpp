#include "daqn/xprun/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace daqn {
namespace {

struct Run {
  std::string env, metric, method, hash;
  // seed -> milestone -> value
  std::map<std::uint64_t, std::map<long, double>> values;
};

bool is_eval_metric(const std::string& m) { return m == kMetricEvalReward || m == kMetricWinRatio; }

Run collect(const std::vector<MetricRow>& rows, const char* label) {
  Run run;
  for (const auto& r : rows) {
    if (r.metric == kMetricFailed)
      throw CompareError(std::string("run ") + label + " contains a failed seed (" + std::to_string(r.seed) + ")");
    if (!is_eval_metric(r.metric)) continue;
    if (run.metric.empty()) {
      run.env = r.env;
      run.metric = r.metric;
      run.method = r.method;
      run.hash = r.config_hash;
    } else if (r.metric != run.metric || r.env != run.env) {
      throw CompareError(std::string("run ") + label + " mixes environments or metrics");
    }
    run.values[r.seed][r.milestone] = r.value;
  }
  if (run.values.empty()) throw CompareError(std::string("run ") + label + " has no evaluation rows");
  return run;
}

std::set<long> milestone_set(const Run& run, const char* label) {
  const auto& first = run.values.begin()->second;
  std::set<long> ms;
  for (const auto& [m, v] : first) ms.insert(m);
  for (const auto& [seed, curve] : run.values) {
    std::set<long> other;
    for (const auto& [m, v] : curve) other.insert(m);
    if (other != ms)
      throw CompareError(std::string("run ") + label + ": seed " + std::to_string(seed) +
                         " has different milestones from the other seeds");
  }
  return ms;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string steps_text(const std::optional<long>& s) { return s ? std::to_string(*s) : "not reached"; }

}  // namespace

double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  const int k = std::min(wins, losses);
  // P(X <= k) for X ~ Binomial(n, 1/2), via log-gamma for stability.
  double tail = 0;
  for (int i = 0; i <= k; ++i)
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  return std::min(1.0, 2.0 * tail);
}

std::optional<long> steps_to_threshold(const std::vector<std::pair<long, double>>& curve, double threshold) {
  for (const auto& [step, value] : curve)
    if (value >= threshold) return step;
  return std::nullopt;
}

Comparison compare_runs(const std::vector<MetricRow>& rows_a, const std::vector<MetricRow>& rows_b,
                        double threshold) {
  const Run a = collect(rows_a, "a"), b = collect(rows_b, "b");
  if (a.env != b.env) throw CompareError("runs use different environments: " + a.env + " vs " + b.env);
  if (a.metric != b.metric) throw CompareError("runs report different metrics: " + a.metric + " vs " + b.metric);
  const auto ms = milestone_set(a, "a");
  if (milestone_set(b, "b") != ms) throw CompareError("milestone mismatch between the two runs");

  std::vector<std::uint64_t> seeds;
  for (const auto& [seed, curve] : a.values)
    if (b.values.count(seed)) seeds.push_back(seed);
  if (seeds.empty()) throw CompareError("the two runs share no seed");

  Comparison c;
  c.env = a.env;
  c.metric = a.metric;
  c.method_a = a.method;
  c.method_b = b.method;
  c.threshold = threshold;
  c.hash_a = a.hash;
  c.hash_b = b.hash;

  std::vector<std::pair<long, double>> mean_a, mean_b;
  for (long m : ms) {
    MilestoneComparison mc;
    mc.milestone = m;
    std::vector<double> va, vb;
    for (auto s : seeds) {
      const double x = a.values.at(s).at(m), y = b.values.at(s).at(m);
      va.push_back(x);
      vb.push_back(y);
      if (x > y)
        ++mc.wins_a;
      else if (y > x)
        ++mc.wins_b;
      else
        ++mc.ties;
    }
    mc.mean_a = mean(va);
    mc.mean_b = mean(vb);
    mc.std_a = sample_std(va);
    mc.std_b = sample_std(vb);
    mc.sign_p = sign_test_p(mc.wins_a, mc.wins_b);
    mean_a.emplace_back(m, mc.mean_a);
    mean_b.emplace_back(m, mc.mean_b);
    c.milestones.push_back(mc);
  }
  c.steps_a = steps_to_threshold(mean_a, threshold);
  c.steps_b = steps_to_threshold(mean_b, threshold);
  if (c.steps_a && c.steps_b) {
    if (*c.steps_b > 0)
      c.ratio = static_cast<double>(*c.steps_a) / static_cast<double>(*c.steps_b);
    else if (*c.steps_a == 0)
      c.ratio = 1.0;
  }

  for (auto s : seeds) {
    std::vector<std::pair<long, double>> ca(a.values.at(s).begin(), a.values.at(s).end());
    std::vector<std::pair<long, double>> cb(b.values.at(s).begin(), b.values.at(s).end());
    c.per_seed.push_back({s, steps_to_threshold(ca, threshold), steps_to_threshold(cb, threshold)});
    double diff = 0;
    for (std::size_t i = 0; i < ca.size(); ++i) diff += ca[i].second - cb[i].second;
    if (diff > 0)
      ++c.wins_a;
    else if (diff < 0)
      ++c.wins_b;
    else
      ++c.ties;
  }
  c.sign_p = sign_test_p(c.wins_a, c.wins_b);
  return c;
}

Json to_json(const Comparison& c) {
  auto opt = [](const auto& v) { return v ? Json(*v) : Json("not reached"); };
  Json ms = Json::array();
  for (const auto& m : c.milestones)
    ms.push_back({{"milestone", m.milestone},
                  {"mean_a", m.mean_a},
                  {"std_a", m.std_a},
                  {"mean_b", m.mean_b},
                  {"std_b", m.std_b},
                  {"wins_a", m.wins_a},
                  {"wins_b", m.wins_b},
                  {"ties", m.ties},
                  {"sign_p", m.sign_p}});
  Json seeds = Json::array();
  for (const auto& s : c.per_seed) seeds.push_back({{"seed", s.seed}, {"steps_a", opt(s.steps_a)}, {"steps_b", opt(s.steps_b)}});
  return Json{{"env", c.env},
              {"metric", c.metric},
              {"method_a", c.method_a},
              {"method_b", c.method_b},
              {"threshold", c.threshold},
              {"milestones", ms},
              {"steps_a", opt(c.steps_a)},
              {"steps_b", opt(c.steps_b)},
              {"ratio", opt(c.ratio)},
              {"per_seed", seeds},
              {"wins_a", c.wins_a},
              {"wins_b", c.wins_b},
              {"ties", c.ties},
              {"sign_p", c.sign_p},
              {"same_dqn_config", c.same_dqn_config()}};
}

std::string format_report(const Comparison& c) {
  std::ostringstream out;
  out << c.env << " " << c.metric << ": a=" << c.method_a << " b=" << c.method_b << "\n";
  if (!c.same_dqn_config())
    out << "WARNING: dqn sections differ (" << c.hash_a << " vs " << c.hash_b << "); comparison is not fair\n";
  out << "milestone  mean_a  std_a  mean_b  std_b  a>b  b>a  ties  sign_p\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& m : c.milestones)
    out << m.milestone << "  " << m.mean_a << "  " << m.std_a << "  " << m.mean_b << "  " << m.std_b << "  "
        << m.wins_a << "  " << m.wins_b << "  " << m.ties << "  " << m.sign_p << "\n";
  out << "steps to " << c.threshold << ": a=" << steps_text(c.steps_a) << " b=" << steps_text(c.steps_b)
      << " ratio a/b=" << (c.ratio ? std::to_string(*c.ratio) : std::string("not reached")) << "\n";
  out << "per seed:";
  for (const auto& s : c.per_seed) out << " " << s.seed << ":" << steps_text(s.steps_a) << "/" << steps_text(s.steps_b);
  out << "\noverall sign test over seed means: a>b " << c.wins_a << ", b>a " << c.wins_b << ", ties " << c.ties
      << ", p=" << c.sign_p << "\n";
  return out.str();
}

}  // namespace daqn
