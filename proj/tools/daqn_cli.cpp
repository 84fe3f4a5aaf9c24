// Command-line front end: run, compare, classify, render-samples.
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "daqn/envs/glyph.hpp"
#include "daqn/envs/pgm.hpp"
#include "daqn/xprun/classify.hpp"
#include "daqn/xprun/compare.hpp"
#include "daqn/xprun/config.hpp"
#include "daqn/xprun/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

daqn::Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw daqn::ConfigError("cannot open config file " + path);
  try {
    return daqn::Json::parse(in);
  } catch (const daqn::Json::exception& e) {
    throw daqn::ConfigError(path + " is not valid JSON: " + e.what());
  }
}

int cmd_run(const std::string& config_path, const std::string& seeds, const std::string& out, int jobs,
            bool save_data) {
  auto cfg = daqn::experiment_config_from_json(read_json_file(config_path));
  if (!seeds.empty()) cfg.seeds = daqn::parse_seed_list(seeds);
  daqn::validate(cfg);
  daqn::RunOptions opts;
  opts.out_dir = out;
  opts.jobs = jobs;
  opts.save_datasets = save_data;
  opts.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  const auto metrics = daqn::run_experiment(cfg, opts);
  std::cout << "wrote " << (std::filesystem::path(out) / "metrics.csv").string() << " (" << metrics.runs.size()
            << " seeds, config hash " << metrics.config_hash << ")\n";
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, double threshold, const std::string& json_out) {
  const auto c = daqn::compare_runs(daqn::read_csv(a), daqn::read_csv(b), threshold);
  std::cout << daqn::format_report(c);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + json_out + " for writing");
    out << daqn::to_json(c).dump(2) << '\n';
  }
  return 0;
}

int cmd_classify(const daqn::ClassifyConfig& cfg) {
  daqn::table_network(cfg.net);  // unknown ids fail before any output
  std::cout << "epoch,train_loss,test_accuracy\n";
  const auto result = daqn::classify_experiment(cfg, [](int epoch, double loss, double acc) {
    std::cout << epoch << ',' << loss << ',' << acc << '\n' << std::flush;
  });
  std::cerr << "network " << cfg.net << ": " << result.n_train << " train / " << result.n_test
            << " test images, untrained accuracy " << result.initial_accuracy << '\n';
  return 0;
}

int cmd_render(const std::string& out, int count, std::uint64_t seed) {
  std::filesystem::create_directories(out);
  const daqn::GlyphDuelConfig cfg;
  daqn::Rng rng(seed);
  char name[64];
  for (int c = 0; c < daqn::kGlyphClasses; ++c) {
    const auto g = static_cast<daqn::Glyph>(c);
    for (int i = 0; i < count; ++i) {
      std::snprintf(name, sizeof name, "%s_%02d.pgm", std::string(daqn::to_string(g)).c_str(), i);
      daqn::write_pgm(std::filesystem::path(out) / name, daqn::glyph_render(g, rng(), cfg));
    }
  }
  for (int i = 0; i < count; ++i) {
    std::snprintf(name, sizeof name, "unrelated_%02d.pgm", i);
    daqn::write_pgm(std::filesystem::path(out) / name, daqn::render_unrelated(rng(), cfg));
  }
  std::cout << "wrote " << (daqn::kGlyphClasses + 1) * count << " images to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"daqn: DQN with auto-encoder pre-training"};
  app.require_subcommand(1);

  std::string config_path, seeds, out_dir = "runs/out";
  int jobs = 1;
  bool save_data = false;
  auto* run = app.add_subcommand("run", "Run an experiment config over its seeds");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seeds", seeds, "Seed override: 0..9, 3 or 1,4,7");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--jobs", jobs, "Seeds trained in parallel")->capture_default_str();
  run->add_flag("--save-data", save_data, "Also store each seed's pre-training dataset");

  std::string csv_a, csv_b, json_out;
  double threshold = 0.0;
  auto* cmp = app.add_subcommand("compare", "Compare two metrics.csv files");
  cmp->add_option("--a", csv_a, "Run a (numerator of the steps ratio)")->required();
  cmp->add_option("--b", csv_b, "Run b")->required();
  cmp->add_option("--threshold", threshold, "Threshold for steps-to-threshold")->required();
  cmp->add_option("--json", json_out, "Also write the report as JSON");

  daqn::ClassifyConfig ccfg;
  auto* cls = app.add_subcommand("classify", "Train a classification network on synthetic glyphs");
  cls->add_option("--net", ccfg.net, "Network id i, ii, iii, iv or v")->capture_default_str();
  cls->add_option("--epochs", ccfg.epochs)->capture_default_str();
  cls->add_option("--items", ccfg.n_items, "Images generated (90/10 split)")->capture_default_str();
  cls->add_option("--seed", ccfg.seed)->capture_default_str();

  std::string render_out;
  int count = 8;
  std::uint64_t render_seed = 0;
  auto* render = app.add_subcommand("render-samples", "Write glyph and unrelated sample images as PGM");
  render->add_option("--out", render_out, "Output directory")->required();
  render->add_option("--count", count, "Images per class")->capture_default_str();
  render->add_option("--seed", render_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, seeds, out_dir, jobs, save_data);
    if (*cmp) return cmd_compare(csv_a, csv_b, threshold, json_out);
    if (*cls) return cmd_classify(ccfg);
    if (*render) return cmd_render(render_out, count, render_seed);
  } catch (const daqn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const daqn::CompareError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
