// qcnnlab: train QCNN / CNN models, compare augmentation arms, preview
// augmentations, and run the built-in oracle checks.
//
// Exit codes: 0 success, 1 usage, 2 data, 3 numeric.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <string>

#include "qcnnlab/config.hpp"
#include "qcnnlab/datasets.hpp"
#include "qcnnlab/error.hpp"
#include "qcnnlab/harness.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using namespace qcnnlab;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommandOptions {
  std::string config_path;
  std::string out_dir = "runs";
  std::map<std::string, std::string> overrides;
};

void add_common_options(CLI::App* cmd, CommandOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  for (const auto& key : config_keys()) {
    cmd->add_option("--" + key, opts.overrides[key], "override " + key);
  }
}

ExperimentConfig resolve(const CommandOptions& opts, const char* forced_model) {
  ConfigEntries entries;
  if (!opts.config_path.empty()) entries = read_config_file(opts.config_path);
  for (const auto& [key, value] : opts.overrides)
    if (!value.empty()) entries.emplace_back(key, value);
  if (forced_model) entries.emplace_back("model", forced_model);
  return resolve_config(entries);
}

void require_single_run(const ExperimentConfig& cfg) {
  if (cfg.class_b.size() != 1 || cfg.n_per_class.size() != 1) {
    fail(ErrorCode::InvalidConfig, "train commands take a single class_b and a single n_per_class");
  }
}

void train(const CommandOptions& opts, const char* model) {
  const ExperimentConfig cfg = resolve(opts, model);
  require_single_run(cfg);
  const Dataset data = load_dataset(cfg);
  const ExperimentResult result =
      run_experiment(cfg, data, cfg.class_b.front(), cfg.n_per_class.front(), cfg.augment_config());
  write_experiment(opts.out_dir, result);
  write_text_file(fs::path(opts.out_dir) / "config_resolved.cfg", render_config(cfg));
  std::cout << "mean final test accuracy " << result.mean_final_test_accuracy() << " over "
            << result.reps.size() << " repetitions -> " << opts.out_dir << "\n";
}

void compare(const CommandOptions& opts) {
  const ExperimentConfig cfg = resolve(opts, nullptr);
  const Dataset data = load_dataset(cfg);
  const Comparison cmp = compare_da(cfg, data);
  write_comparison(opts.out_dir, cmp);
  write_text_file(fs::path(opts.out_dir) / "config_resolved.cfg", render_config(cfg));
  std::cout << comparison_table(cmp);
}

void preview(const CommandOptions& opts) {
  ExperimentConfig cfg = resolve(opts, nullptr);
  if (cfg.augment == "none") cfg.augment = "recipe";
  const AugmentConfig aug = cfg.augment_config();
  const Dataset data = load_dataset(cfg);
  if (data.empty()) fail(ErrorCode::InsufficientSamples, "dataset is empty");
  const std::size_t count = std::min<std::size_t>(data.size(), std::max(cfg.preview_count, 0));
  std::vector<std::pair<std::string, Image>> files;
  for (std::size_t i = 0; i < count; ++i) {
    const Image& img = data.samples[i].image;
    files.emplace_back("sample" + std::to_string(i) + "_orig.pgm", img);
    for (int v = 0; v < cfg.preview_variants; ++v) {
      auto rng = augmentation_rng(cfg.base_seed, v, i);
      files.emplace_back("sample" + std::to_string(i) + "_aug" + std::to_string(v) + ".pgm",
                         augment_sample(img, aug, rng));
    }
  }
  fs::create_directories(opts.out_dir);
  for (const auto& [name, img] : files) save_pgm(fs::path(opts.out_dir) / name, img);
  write_text_file(fs::path(opts.out_dir) / "config_resolved.cfg", render_config(cfg));
  std::cout << "wrote " << files.size() << " images to " << opts.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QCNN and CNN tiny-data experiments"};
  app.require_subcommand(1);

  CommandOptions qcnn_opts, cnn_opts, compare_opts, preview_opts;
  auto* train_qcnn_cmd = app.add_subcommand("train-qcnn", "train the quantum model");
  add_common_options(train_qcnn_cmd, qcnn_opts);
  auto* train_cnn_cmd = app.add_subcommand("train-cnn", "train the classical baseline");
  add_common_options(train_cnn_cmd, cnn_opts);
  auto* compare_cmd = app.add_subcommand("compare-da", "accuracy with and without augmentation");
  add_common_options(compare_cmd, compare_opts);
  auto* preview_cmd = app.add_subcommand("augment-preview", "write augmented samples as PGM");
  add_common_options(preview_cmd, preview_opts);
  auto* selftest_cmd = app.add_subcommand("selftest", "run the oracle and invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_qcnn_cmd) train(qcnn_opts, "qcnn");
    else if (*train_cnn_cmd) train(cnn_opts, "cnn");
    else if (*compare_cmd) compare(compare_opts);
    else if (*preview_cmd) preview(preview_opts);
    else if (*selftest_cmd) return run_selftest(std::cout) ? 0 : kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (category(e.code())) {
      case ErrorCategory::Usage: return kExitUsage;
      case ErrorCategory::Data: return kExitData;
      case ErrorCategory::Numeric: return kExitNumeric;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
