#include "daqn/xprun/runner.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include "daqn/autoenc/autoencoder.hpp"
#include "daqn/envs/cartpole.hpp"
#include "daqn/envs/glyph_duel.hpp"
#include "daqn/transfer/transfer.hpp"

namespace daqn {
namespace {

// Purposes for derive_seed.
enum : std::uint64_t { kData = 1, kAeInit, kAeShuffle, kQInit, kAgent, kTrainEnv, kEval };

Shape input_shape(const ExperimentConfig& cfg) {
  return cfg.env == EnvKind::cartpole ? Shape{4} : Shape{1, cfg.glyph.image_size, cfg.glyph.image_size};
}

std::unique_ptr<Environment> make_env(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.env == EnvKind::cartpole) return std::make_unique<CartPole>(seed);
  return std::make_unique<GlyphDuel>(cfg.glyph, seed);
}

AutoEncoder build_ae_for_body(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& body = cfg.dqn.body;
  if (cfg.env == EnvKind::cartpole) {
    std::vector<int> widths{4};
    for (const auto& l : body)
      if (l.kind == LayerKind::dense) widths.push_back(l.out_units);
    AutoEncoder ae = build_dense_ae(widths, seed);
    if (ae.encoder.spec().layers != body)
      throw ConfigError("daqn on cart-pole needs a body of alternating dense and relu layers ending in relu");
    return ae;
  }
  try {
    return build_conv_ae(input_shape(cfg), body, seed);
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("daqn body cannot be mirrored into an auto-encoder: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

std::string RunMetrics::eval_metric() const {
  return env == EnvKind::cartpole ? kMetricEvalReward : kMetricWinRatio;
}

std::vector<MetricRow> RunMetrics::rows() const {
  std::vector<MetricRow> out;
  const std::string m(to_string(method)), e(to_string(env)), metric = eval_metric();
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.ae_curve.size(); ++i)
      out.push_back({run.seed, static_cast<long>(i + 1), kMetricAeMse, run.ae_curve[i], m, e, config_hash});
    for (const auto& ev : run.evals) out.push_back({run.seed, ev.step, metric, ev.value, m, e, config_hash});
  }
  return out;
}

SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opts) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  SeedRun result;
  result.seed = seed;
  const Shape input = input_shape(cfg);
  std::optional<std::filesystem::path> dir;
  if (opts.out_dir) {
    dir = *opts.out_dir / ("seed_" + std::to_string(seed));
    std::filesystem::create_directories(*dir);
  }
  auto log = [&](const std::string& msg) {
    if (opts.log) opts.log("seed " + std::to_string(seed) + ": " + msg);
  };

  Normalization norm;
  std::optional<PretrainDataset> data;
  if (cfg.pretrain || cfg.env == EnvKind::cartpole) {
    auto denv = make_env(cfg, derive_seed(seed, kData));
    const DataSource source = cfg.pretrain ? cfg.pretrain->source : DataSource::random_policy_states;
    const int n = cfg.pretrain ? cfg.pretrain->n_items : cfg.normalization_items;
    const CapturePolicy policy =
        source == DataSource::random_policy_states ? CapturePolicy::random : CapturePolicy::none;
    data = collect_pretraining_data(*denv, policy, n, source, derive_seed(seed, kData));
    norm = data->normalization;
    if (dir && opts.save_datasets) save_dataset(*data, *dir / "pretrain_data");
  }

  Network qnet;
  if (!cfg.pretrain) {
    qnet = build_fresh_q_network(input, cfg.dqn.body, make_env(cfg, 0)->n_actions(), derive_seed(seed, kQInit));
  } else {
    AutoEncoder ae = build_ae_for_body(cfg, derive_seed(seed, kAeInit));
    AeTrainConfig ae_cfg = cfg.pretrain->ae;
    ae_cfg.shuffle_seed ^= derive_seed(seed, kAeShuffle);
    log("training auto-encoder on " + std::to_string(data->items.shape()[0]) + " " +
        std::string(to_string(data->source)) + " items");
    result.ae_curve = train_ae(ae, norm.apply(data->items), ae_cfg);
    if (dir)
      save_autoencoder(ae, *dir / "autoencoder",
                       Json{{"normalization", to_json(norm)},
                            {"ae_train_config", to_json(cfg.pretrain->ae)},
                            {"source", std::string(to_string(data->source))}});
    const TransferPlan plan{cfg.method == Method::daqn ? TransferDepth::all_encoder_layers
                                                       : TransferDepth::first_layer_only,
                            make_env(cfg, 0)->n_actions(), derive_seed(seed, kQInit)};
    qnet = build_q_network(ae, plan, cfg.dqn.body);
  }

  Agent agent(std::move(qnet), cfg.dqn.config, derive_seed(seed, kAgent));
  auto env = make_env(cfg, derive_seed(seed, kTrainEnv));
  EvalHook hook;
  std::unique_ptr<Environment> eval_env;
  std::optional<GlyphTestSet> test;
  if (cfg.env == EnvKind::cartpole) {
    eval_env = make_env(cfg, derive_seed(seed, kEval));
    hook = [&](Agent& a, long step) {
      const double v = evaluate_returns(a, *eval_env, cfg.dqn.eval.episodes, norm);
      log("step " + std::to_string(step) + " eval_reward " + std::to_string(v));
      return v;
    };
  } else {
    test = make_glyph_test_set(cfg.glyph, cfg.dqn.eval.test_images, derive_seed(seed, kEval));
    hook = [&](Agent& a, long step) {
      const double v = evaluate_win_ratio(a, *test, norm);
      log("step " + std::to_string(step) + " win_ratio " + std::to_string(v));
      return v;
    };
  }
  const TrainingLog tl = run_training(agent, *env, {cfg.dqn.total_steps, cfg.dqn.eval.milestones, norm}, hook);
  result.evals = tl.evals;
  result.gradient_steps = tl.gradient_steps;
  if (dir)
    save_network(agent.online(), *dir / "qnet",
                 Json{{"seed", seed},
                      {"method", std::string(to_string(cfg.method))},
                      {"env", std::string(to_string(cfg.env))},
                      {"normalization", to_json(norm)}});
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

RunMetrics run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  if (opts.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.pretrain) build_ae_for_body(cfg, 0);  // surface body/AE mismatches as config errors
  RunMetrics metrics;
  metrics.env = cfg.env;
  metrics.method = cfg.method;
  metrics.config_hash = dqn_section_hash(cfg);
  if (opts.out_dir) {
    std::filesystem::create_directories(*opts.out_dir);
    write_json(*opts.out_dir / "config.json", to_json(cfg));
  }

  const std::size_t n = cfg.seeds.size();
  std::vector<std::optional<SeedRun>> done(n);
  std::vector<std::string> errors(n);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  RunOptions worker_opts = opts;
  if (opts.log)
    worker_opts.log = [&](const std::string& msg) {
      std::lock_guard lock(mu);
      opts.log(msg);
    };

  // Caller holds mu.
  auto flush = [&] {
    if (!opts.out_dir) return;
    RunMetrics partial = metrics;
    std::vector<MetricRow> extra;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) partial.runs.push_back(*done[i]);
      if (!errors[i].empty())
        extra.push_back({cfg.seeds[i], 0, kMetricFailed, 1.0, std::string(to_string(cfg.method)),
                         std::string(to_string(cfg.env)), metrics.config_hash});
    }
    auto rows = partial.rows();
    rows.insert(rows.end(), extra.begin(), extra.end());
    write_csv(*opts.out_dir / "metrics.csv", rows);
    Json seeds = Json::array();
    for (const auto& r : partial.runs)
      seeds.push_back({{"seed", r.seed}, {"wall_seconds", r.wall_seconds}, {"gradient_steps", r.gradient_steps}});
    write_json(*opts.out_dir / "summary.json", Json{{"config_hash", metrics.config_hash}, {"runs", seeds}});
  };

  auto worker = [&] {
    for (std::size_t i; !failed && (i = next++) < n;) {
      std::optional<SeedRun> run;
      std::string error;
      try {
        run = run_seed(cfg, cfg.seeds[i], worker_opts);
      } catch (const std::exception& e) {
        error = e.what();
        if (error.empty()) error = "unknown error";
        failed = true;
      }
      std::lock_guard lock(mu);
      done[i] = std::move(run);
      errors[i] = std::move(error);
      flush();
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.jobs), n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) throw RunFailure("seed " + std::to_string(cfg.seeds[i]) + " failed: " + errors[i]);
  for (auto& r : done) metrics.runs.push_back(std::move(*r));
  return metrics;
}

}  // namespace daqn
