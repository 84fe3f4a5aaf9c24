// Acceptance report: one PASS/FAIL line per criterion on stdout (and in
// <out>/acceptance_report.txt), progress on stderr. Exits 0 once the report
// is complete; --strict exits 1 on any FAIL.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "daqn/autoenc.hpp"
#include "daqn/envs.hpp"
#include "daqn/qlearn.hpp"
#include "daqn/transfer.hpp"
#include "daqn/xprun/compare.hpp"
#include "daqn/xprun/config.hpp"
#include "daqn/xprun/runner.hpp"
#include "random_nets.hpp"

using namespace daqn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class CpuTimer {
 public:
  double minutes() const { return static_cast<double>(std::clock() - start_) / CLOCKS_PER_SEC / 60.0; }

 private:
  std::clock_t start_ = std::clock();
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s.setf(std::ios::scientific);
  s.precision(2);
  s << v;
  return s.str();
}

std::string steps(const std::optional<long>& s) { return s ? std::to_string(*s) : "not reached"; }

// Not reached sorts after every reached milestone.
long steps_or_max(const std::optional<long>& s) { return s ? *s : std::numeric_limits<long>::max(); }

struct Context {
  std::optional<std::filesystem::path> out;
  int jobs = 1;
  std::map<std::string, RunMetrics> runs;  // by label

  const RunMetrics& run(const std::string& label, const ExperimentConfig& cfg) {
    if (auto it = runs.find(label); it != runs.end()) return it->second;
    std::cerr << "running " << label << " (" << cfg.seeds.size() << " seeds)\n";
    RunOptions opts;
    opts.jobs = jobs;
    if (out) opts.out_dir = *out / label;
    opts.log = [&](const std::string& msg) { std::cerr << "  " << label << " " << msg << '\n'; };
    return runs.emplace(label, run_experiment(cfg, opts)).first->second;
  }
};

std::vector<MetricRow> eval_rows(const RunMetrics& m) {
  std::vector<MetricRow> rows;
  for (auto& r : m.rows())
    if (r.metric == m.eval_metric()) rows.push_back(r);
  return rows;
}

void save_report(const Context& ctx, const std::string& name, const Comparison& c) {
  if (!ctx.out) return;
  std::ofstream(*ctx.out / (name + ".txt")) << format_report(c);
}

// 1 -----------------------------------------------------------------------
Outcome gradient_correctness() {
  CpuTimer t;
  double worst = 0;
  std::set<LayerKind> kinds;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = testing::random_grad_case(seed);
    for (const auto& l : c.net.spec().layers) kinds.insert(l.kind);
    worst = std::max(worst, grad_check(c.net, c.input, c.loss, c.target).max_rel_error);
  }
  const bool all_kinds = kinds.size() == 8;
  return {worst < 1e-4 && all_kinds && t.minutes() < 1.0,
          "max relative error " + sci(worst) + " over 20 nets, " + std::to_string(kinds.size()) +
              "/8 layer kinds, " + fmt(t.minutes() * 60, 1) + " s"};
}

// 2 -----------------------------------------------------------------------
// Four-state chain: action 1 moves right, 0 moves left (clamped); moving right
// from the last state pays 1 and ends the episode.
std::tuple<int, double, bool> chain_step(int s, int a) {
  if (a == 1) return s == 3 ? std::tuple{s, 1.0, true} : std::tuple{s + 1, 0.0, false};
  return {std::max(0, s - 1), 0.0, false};
}

Outcome tabular_equivalence() {
  CpuTimer t;
  const double gamma = 0.9, alpha = 0.2;
  QTable vi = QTable::Zero(4, 2);
  for (int it = 0; it < 2000; ++it) {
    QTable next = vi;
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 2; ++a) {
        const auto [s2, r, done] = chain_step(s, a);
        next(s, a) = r + (done ? 0.0 : gamma * vi.row(s2).maxCoeff());
      }
    vi = next;
  }
  // One-hot states into a bias-free linear head: Q(s, a) = W[a, s].
  DqnConfig cfg;
  cfg.gamma = gamma;
  cfg.optimizer.kind = OptimizerKind::sgd;
  cfg.optimizer.learning_rate = alpha / 2;
  cfg.batch_size = 1;
  cfg.target_sync_interval = 1;
  Network net(NetworkSpec{{4}, {LayerSpec::dense(4, 2, false)}}, 0);
  net.set_layer_params(0, {Tensor({2, 4})});
  Agent agent(net, cfg, 0);
  auto one_hot = [](int s) {
    Tensor x({4});
    x[s] = 1.0;
    return x;
  };
  for (int sweep = 0; sweep < 400; ++sweep)
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 2; ++a) {
        const auto [s2, r, done] = chain_step(s, a);
        const Transition tr{one_hot(s), a, r, one_hot(s2), done};
        const Transition* p[] = {&tr};
        agent.td_train_step(p);
        agent.sync_target();
      }
  double err = 0;
  for (int s = 0; s < 4; ++s) err = std::max(err, (agent.q_values(one_hot(s)) - vi.row(s).transpose()).cwiseAbs().maxCoeff());
  return {err < 1e-2 && t.minutes() < 1.0, "max |Q_dqn - Q_vi| = " + sci(err)};
}

// 3 -----------------------------------------------------------------------
ExperimentConfig cartpole(Method m) { return default_config(EnvKind::cartpole, m); }

Outcome cartpole_baseline(Context& ctx) {
  CpuTimer t;
  const auto& dqn = ctx.run("cartpole_dqn", cartpole(Method::dqn));
  const auto& daqn = ctx.run("cartpole_daqn", cartpole(Method::daqn));
  const double minutes = t.minutes();
  const auto c = compare_runs(eval_rows(daqn), eval_rows(dqn), 120.0);
  save_report(ctx, "cartpole_daqn_vs_dqn", c);
  const auto& last = c.milestones.back();
  bool sign_win = false;
  std::string early;
  for (const auto& m : c.milestones) {
    if (m.milestone > 1500) continue;
    early += " " + std::to_string(m.milestone) + ":" + std::to_string(m.wins_a) + "/" +
             std::to_string(m.wins_a + m.wins_b + m.ties);
    sign_win = sign_win || m.wins_a >= 7;
  }
  const bool ok_dqn = last.milestone == 3000 && last.mean_b >= 120.0;
  const bool ok_mean = last.mean_a >= last.mean_b;
  return {ok_dqn && ok_mean && sign_win && minutes <= 20.0 && c.same_dqn_config(),
          "at 3k dqn " + fmt(last.mean_b, 1) + " (>=120 " + (ok_dqn ? "ok" : "no") + "), daqn " + fmt(last.mean_a, 1) +
              " (>=dqn " + (ok_mean ? "ok" : "no") + "); daqn seed wins at <=1.5k:" + early + " (need 7 " +
              (sign_win ? "ok" : "no") + "); " + fmt(minutes, 1) + " CPU min"};
}

// 4 -----------------------------------------------------------------------
Outcome ae_learnability() {
  CpuTimer t;
  auto cp = default_config(EnvKind::cartpole, Method::daqn);
  CartPole env(11);
  const auto cdata = collect_pretraining_data(env, CapturePolicy::random, 256, DataSource::random_policy_states, 11);
  std::vector<int> widths{4};
  for (const auto& l : cp.dqn.body)
    if (l.kind == LayerKind::dense) widths.push_back(l.out_units);
  AutoEncoder cae = build_dense_ae(widths, 12);
  const auto ccurve = train_ae(cae, cdata.normalization.apply(cdata.items), cp.pretrain->ae);

  auto gl = default_config(EnvKind::glyphduel, Method::daqn);
  GlyphDuel genv(gl.glyph, 13);
  const auto gdata = collect_pretraining_data(genv, CapturePolicy::none, 256, DataSource::domain_images, 13);
  AutoEncoder gae = build_conv_ae({1, gl.glyph.image_size, gl.glyph.image_size}, gl.dqn.body, 14);
  const auto gcurve = train_ae(gae, gdata.items, gl.pretrain->ae);

  const bool ok = ccurve.size() == 25 && gcurve.size() == 30 && ccurve.back() < 0.5 * ccurve.front() &&
                  gcurve.back() < 0.5 * gcurve.front() && t.minutes() < 5.0;
  return {ok, "cart-pole epoch1 " + fmt(ccurve.front(), 4) + " -> epoch" + std::to_string(ccurve.size()) + " " +
                  fmt(ccurve.back(), 4) + "; glyph epoch1 " + fmt(gcurve.front(), 4) + " -> epoch" +
                  std::to_string(gcurve.size()) + " " + fmt(gcurve.back(), 4) + "; " + fmt(t.minutes(), 1) +
                  " CPU min"};
}

// 5, 6 --------------------------------------------------------------------
// Desk-scale glyph budget: 30k env steps, evaluated every 2k.
ExperimentConfig glyph(Method m, std::optional<DataSource> source = {}) {
  auto cfg = default_config(EnvKind::glyphduel, m);
  cfg.dqn.total_steps = 30000;
  cfg.dqn.eval.milestones.clear();
  for (long s = 2000; s <= 30000; s += 2000) cfg.dqn.eval.milestones.push_back(s);
  if (source) cfg.pretrain->source = *source;
  return cfg;
}

Outcome glyph_speedup(Context& ctx) {
  CpuTimer t;
  const auto& dqn = ctx.run("glyph_dqn", glyph(Method::dqn));
  const auto& bg = ctx.run("glyph_daqn_background", glyph(Method::daqn, DataSource::background_only));
  const auto& dom = ctx.run("glyph_daqn_domain", glyph(Method::daqn, DataSource::domain_images));
  const double minutes = t.minutes();
  const auto c_bg = compare_runs(eval_rows(bg), eval_rows(dqn), 0.9);
  const auto c_dom = compare_runs(eval_rows(dom), eval_rows(dqn), 0.9);
  save_report(ctx, "glyph_background_vs_dqn", c_bg);
  save_report(ctx, "glyph_domain_vs_dqn", c_dom);

  const bool speedup = c_bg.steps_a && (!c_bg.steps_b || static_cast<double>(*c_bg.steps_a) <= 0.6 * *c_bg.steps_b);
  auto beats = [](const Comparison& c) {
    int n = 0;
    for (const auto& s : c.per_seed) n += s.steps_a && steps_or_max(s.steps_a) <= steps_or_max(s.steps_b);
    return n;
  };
  const int n_seeds = static_cast<int>(c_bg.per_seed.size());
  const int bg_wins = beats(c_bg), dom_wins = beats(c_dom);
  const bool majority = 2 * bg_wins > n_seeds && 2 * dom_wins > n_seeds;
  return {speedup && majority && minutes <= 60.0,
          "steps to 0.9: dqn " + steps(c_bg.steps_b) + ", background " + steps(c_bg.steps_a) + ", domain " +
              steps(c_dom.steps_a) + " (background <= 0.6 x dqn " + (speedup ? "ok" : "no") +
              "); seeds where background/domain reach 0.9 no later than dqn: " + std::to_string(bg_wins) + "/" +
              std::to_string(dom_wins) + " of " + std::to_string(n_seeds) + "; " + fmt(minutes, 1) + " CPU min"};
}

Outcome offdomain_harm(Context& ctx) {
  const auto& dqn = ctx.run("glyph_dqn", glyph(Method::dqn));
  const auto& un = ctx.run("glyph_daqn_unrelated", glyph(Method::daqn, DataSource::unrelated_images));
  const auto c = compare_runs(eval_rows(un), eval_rows(dqn), 0.9);
  save_report(ctx, "glyph_unrelated_vs_dqn", c);
  const auto& last = c.milestones.back();
  return {last.mean_a <= last.mean_b + 0.01, "final win ratio at " + std::to_string(last.milestone) + ": unrelated " +
                                                  fmt(last.mean_a) + ", dqn " + fmt(last.mean_b) + " (limit dqn + 0.010)"};
}

// 7 -----------------------------------------------------------------------
Outcome first_layer_between(Context& ctx) {
  constexpr double kThreshold = 100.0;
  const auto& dqn = ctx.run("cartpole_dqn", cartpole(Method::dqn));
  const auto& daqn = ctx.run("cartpole_daqn", cartpole(Method::daqn));
  const auto& first = ctx.run("cartpole_daqn_first_layer", cartpole(Method::daqn_first_layer));
  const auto c_dqn = compare_runs(eval_rows(first), eval_rows(dqn), kThreshold);
  const auto c_daqn = compare_runs(eval_rows(first), eval_rows(daqn), kThreshold);
  save_report(ctx, "cartpole_first_layer_vs_dqn", c_dqn);
  save_report(ctx, "cartpole_first_layer_vs_daqn", c_daqn);
  int between = 0;
  std::string per_seed;
  for (std::size_t i = 0; i < c_dqn.per_seed.size(); ++i) {
    const long f = steps_or_max(c_dqn.per_seed[i].steps_a);
    const long a = steps_or_max(c_dqn.per_seed[i].steps_b), b = steps_or_max(c_daqn.per_seed[i].steps_b);
    between += std::min(a, b) <= f && f <= std::max(a, b);
    per_seed += " " + steps(c_dqn.per_seed[i].steps_b) + "/" + steps(c_dqn.per_seed[i].steps_a) + "/" +
                steps(c_daqn.per_seed[i].steps_b);
  }
  const int n = static_cast<int>(c_dqn.per_seed.size());
  return {2 * between > n, "steps to reward " + fmt(kThreshold, 0) + " (dqn/first_layer/daqn):" + per_seed + "; between in " +
                               std::to_string(between) + "/" + std::to_string(n) + " seeds"};
}

// 8 -----------------------------------------------------------------------
Outcome transfer_exactness() {
  Rng rng(2024);
  std::uniform_int_distribution<int> w(2, 8), coin(0, 1);
  int bad = 0;
  double worst = 0;
  for (int pair = 0; pair < 50; ++pair) {
    AutoEncoder ae = [&] {
      if (coin(rng)) {
        std::vector<int> widths{w(rng)};
        for (int k = 0, n = 1 + coin(rng) + coin(rng); k < n; ++k) widths.push_back(w(rng));
        return build_dense_ae(widths, rng());
      }
      const int c = 1 + coin(rng), size = 8 + 4 * coin(rng), k1 = w(rng);
      std::vector<LayerSpec> enc{LayerSpec::conv2d(c, k1, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2)};
      if (coin(rng)) {
        enc.push_back(LayerSpec::conv2d(k1, w(rng), 3, 1, 1));
        enc.push_back(LayerSpec::relu());
      }
      return build_conv_ae({c, size, size}, enc, rng());
    }();
    const auto body = ae.encoder.spec().layers;
    const TransferPlan plan{coin(rng) ? TransferDepth::all_encoder_layers : TransferDepth::first_layer_only,
                            2 + coin(rng), rng()};
    Network q = build_q_network(ae, plan, body);
    const auto report = verify_transfer(q, ae, plan);
    std::size_t prefix = 0;
    for (const auto& l : report.layers) {
      if (!l.copied) continue;
      if (!l.max_abs_diff || *l.max_abs_diff != 0.0) ++bad;
      worst = std::max(worst, l.max_abs_diff.value_or(0.0));
      prefix = l.index + 1;
    }
    if (plan.depth == TransferDepth::all_encoder_layers) prefix = body.size();
    const Tensor x = testing::random_tensor(batched(ae.input_shape(), 3), rng);
    if (prefix == 0 || q.forward_columns(x.columns(), prefix) != ae.encoder.forward_columns(x.columns(), prefix)) ++bad;
  }
  return {bad == 0, std::to_string(50 - bad) + "/50 pairs exact, largest copied-layer diff " + sci(worst)};
}

// 9 -----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "daqn_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::vector<ExperimentConfig> cfgs;
  for (auto m : {Method::dqn, Method::daqn}) {
    auto c = default_config(EnvKind::cartpole, m);
    c.seeds = {7};
    c.normalization_items = 1000;
    if (c.pretrain) {
      c.pretrain->n_items = 1000;
      c.pretrain->ae.epochs = 3;
    }
    c.dqn.total_steps = 600;
    c.dqn.eval.milestones = {300, 600};
    c.dqn.eval.episodes = 10;
    cfgs.push_back(c);
  }
  auto g = default_config(EnvKind::glyphduel, Method::daqn);
  g.seeds = {7};
  g.pretrain->n_items = 32;
  g.pretrain->ae.epochs = 2;
  g.dqn.total_steps = 300;
  g.dqn.eval.milestones = {150, 300};
  g.dqn.eval.test_images = 60;
  cfgs.push_back(g);
  int identical = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    std::string csv[2];
    for (int rep = 0; rep < 2; ++rep) {
      RunOptions opts;
      opts.out_dir = root / (std::to_string(i) + "_" + std::to_string(rep));
      run_experiment(cfgs[i], opts);
      csv[rep] = slurp(*opts.out_dir / "metrics.csv");
    }
    identical += !csv[0].empty() && csv[0] == csv[1];
  }
  std::filesystem::remove_all(root);
  const int n = static_cast<int>(cfgs.size());
  return {identical == n, std::to_string(identical) + "/" + std::to_string(n) + " repeated runs byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance report"};
  std::vector<int> only;
  std::string out;
  int jobs = 1;
  bool strict = false;
  app.add_option("--only", only, "Criteria to evaluate (default: all)")->delimiter(',');
  app.add_option("--out", out, "Keep run outputs and comparison reports here");
  app.add_option("--jobs", jobs, "Seeds trained in parallel")->capture_default_str();
  app.add_flag("--strict", strict, "Exit 1 if any criterion fails");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.jobs = jobs;
  if (!out.empty()) ctx.out = out;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, gradient_correctness},
      {2, tabular_equivalence},
      {4, ae_learnability},
      {8, transfer_exactness},
      {9, determinism},
      {3, [&] { return cartpole_baseline(ctx); }},
      {7, [&] { return first_layer_between(ctx); }},
      {5, [&] { return glyph_speedup(ctx); }},
      {6, [&] { return offdomain_harm(ctx); }},
  };
  const char* names[] = {"",
                         "gradient correctness",
                         "tabular oracle equivalence",
                         "cart-pole baseline",
                         "auto-encoder learnability",
                         "glyph-duel speedup",
                         "off-domain pre-training harm",
                         "first-layer-only baseline",
                         "transfer exactness",
                         "determinism"};
  std::ofstream report;
  if (ctx.out) {
    std::filesystem::create_directories(*ctx.out);
    report.open(*ctx.out / "acceptance_report.txt", std::ios::trunc);
  }
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << names[id] << "): " << o.detail << '\n';
    std::cout << line.str() << std::flush;
    if (report) report << line.str() << std::flush;
  }
  return strict && failed ? 1 : 0;
}
