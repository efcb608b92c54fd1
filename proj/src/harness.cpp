#include "qcnnlab/harness.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qcnnlab/cnn.hpp"
#include "qcnnlab/datasets.hpp"
#include "qcnnlab/embedding.hpp"
#include "qcnnlab/error.hpp"
#include "qcnnlab/parallel.hpp"

namespace qcnnlab {

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_file(const std::string& path, const char* key) {
  if (path.empty()) fail(ErrorCode::InvalidConfig, std::string(key) + " is not set");
  if (!std::filesystem::exists(path)) fail(ErrorCode::FileNotFound, "no such file: " + path);
}

std::map<std::string, int> parse_class_map(const std::string& text) {
  std::map<std::string, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) {
      fail(ErrorCode::InvalidConfig, "pgm_classes entry '" + item + "' is not prefix:label");
    }
    try {
      out[item.substr(0, colon)] = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidConfig, "pgm_classes entry '" + item + "' has no integer label");
    }
  }
  if (out.empty()) fail(ErrorCode::InvalidConfig, "pgm_classes is empty");
  return out;
}

TrainResult train_one(const ExperimentConfig& cfg, const Split& split, const TrainConfig& tc) {
  const Image& first = split.train.samples.front().image;
  if (cfg.model == ModelKind::Cnn) {
    return train_cnn(cnn_architecture_for(first.height, first.width), split.train, split.test, tc);
  }
  const int n = cfg.n_qubits > 0 ? cfg.n_qubits : qubits_for(first.size());
  return train_qcnn(build_architecture(n, cfg.depth, cfg.conv_prefix), split.train, split.test, tc);
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset ds;
  switch (cfg.dataset) {
    case DatasetKind::Digits:
      require_file(cfg.data_path, "data_path");
      ds = load_digits_csv(cfg.data_path);
      break;
    case DatasetKind::Idx:
      require_file(cfg.idx_images, "idx_images");
      require_file(cfg.idx_labels, "idx_labels");
      ds = load_idx(cfg.idx_images, cfg.idx_labels);
      break;
    case DatasetKind::Pgm:
      require_file(cfg.pgm_dir, "pgm_dir");
      ds = load_pgm_dir(cfg.pgm_dir, parse_class_map(cfg.pgm_classes));
      break;
  }
  if (cfg.resize_height > 0) {
    for (auto& s : ds.samples) s.image = resize_area(s.image, cfg.resize_height, cfg.resize_width);
  }
  return ds;
}

std::vector<double> ExperimentResult::final_test_accuracies() const {
  std::vector<double> out;
  for (const auto& r : reps) out.push_back(r.run.metrics.back().test_acc);
  return out;
}

double ExperimentResult::mean_final_test_accuracy() const {
  const auto accs = final_test_accuracies();
  double sum = 0.0;
  for (double a : accs) sum += a;
  return accs.empty() ? 0.0 : sum / static_cast<double>(accs.size());
}

std::vector<MetricsRow> mean_curve(const std::vector<RepetitionResult>& reps) {
  if (reps.empty()) return {};
  std::vector<MetricsRow> mean(reps.front().run.metrics.size());
  for (std::size_t e = 0; e < mean.size(); ++e) {
    MetricsRow& m = mean[e];
    m.epoch = reps.front().run.metrics[e].epoch;
    for (const auto& r : reps) {
      const MetricsRow& row = r.run.metrics.at(e);
      m.train_loss += row.train_loss;
      m.train_acc += row.train_acc;
      m.test_loss += row.test_loss;
      m.test_acc += row.test_acc;
    }
    const double k = static_cast<double>(reps.size());
    m.train_loss /= k;
    m.train_acc /= k;
    m.test_loss /= k;
    m.test_acc /= k;
  }
  return mean;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data, int class_b,
                                int n_per_class, const AugmentConfig& augment) {
  if (cfg.repetitions < 1) fail(ErrorCode::InvalidConfig, "repetitions must be >= 1");
  ExperimentResult result;
  result.class_a = cfg.class_a;
  result.class_b = class_b;
  result.n_per_class = n_per_class;
  result.reps.resize(static_cast<std::size_t>(cfg.repetitions));

  // Fan out over repetitions when there are enough of them, otherwise inside
  // each run. Neither choice changes any number.
  const int threads = resolve_threads(cfg.train.threads);
  const bool outer = cfg.repetitions >= threads;
  parallel_for(result.reps.size(), outer ? threads : 1, [&](std::size_t k) {
    const std::uint64_t seed = cfg.base_seed + k;
    const Split split = binary_subset(data, cfg.class_a, class_b, n_per_class, cfg.n_test, seed);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    tc.threads = outer ? 1 : threads;
    tc.augment = augment;
    result.reps[k] = {seed, train_one(cfg, split, tc)};
  });
  result.mean = mean_curve(result.reps);
  return result;
}

Comparison compare_da(const ExperimentConfig& cfg, const Dataset& data,
                      const AugmentConfig& baseline_arm, const AugmentConfig& augmented_arm) {
  if (cfg.class_b.empty() || cfg.n_per_class.empty()) {
    fail(ErrorCode::InvalidConfig, "class_b and n_per_class must be nonempty");
  }
  Comparison cmp;
  for (int b : cfg.class_b) {
    for (int n : cfg.n_per_class) {
      cmp.no_da.push_back(run_experiment(cfg, data, b, n, baseline_arm));
      cmp.da.push_back(run_experiment(cfg, data, b, n, augmented_arm));
      ComparisonRow row{cfg.class_a, b, n, cmp.no_da.back().mean_final_test_accuracy(),
                        cmp.da.back().mean_final_test_accuracy(), 0.0};
      row.delta = row.acc_da - row.acc_no_da;
      cmp.rows.push_back(row);
    }
  }
  return cmp;
}

Comparison compare_da(const ExperimentConfig& cfg, const Dataset& data) {
  return compare_da(cfg, data, AugmentConfig::disabled(), cfg.augment_config());
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "epoch,train_loss,train_acc,test_loss,test_acc\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + "," + fmt6(r.train_loss) + "," + fmt6(r.train_acc) + "," +
           fmt6(r.test_loss) + "," + fmt6(r.test_acc) + "\n";
  }
  return out;
}

std::string params_csv(const std::vector<double>& params) {
  std::string out;
  char buf[48];
  for (double p : params) {
    std::snprintf(buf, sizeof buf, "%.17g\n", p);
    out += buf;
  }
  return out;
}

std::string comparison_csv(const Comparison& cmp) {
  std::string out = "class_a,class_b,n_per_class,acc_no_da,acc_da,delta\n";
  for (const auto& r : cmp.rows) {
    out += std::to_string(r.class_a) + "," + std::to_string(r.class_b) + "," +
           std::to_string(r.n_per_class) + "," + fmt6(r.acc_no_da) + "," + fmt6(r.acc_da) + "," +
           fmt6(r.delta) + "\n";
  }
  return out;
}

std::string comparison_table(const Comparison& cmp) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-7s %-7s %11s %9s %9s %8s\n", "class_a", "class_b",
                "n_per_class", "no_da", "da", "delta");
  out += line;
  for (const auto& r : cmp.rows) {
    std::snprintf(line, sizeof line, "%-7d %-7d %11d %9.4f %9.4f %+8.4f\n", r.class_a, r.class_b,
                  r.n_per_class, r.acc_no_da, r.acc_da, r.delta);
    out += line;
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::FileNotFound, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::FileNotFound, "write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result) {
  for (std::size_t k = 0; k < result.reps.size(); ++k) {
    const std::string rep = std::to_string(k);
    write_text_file(dir / ("metrics_rep" + rep + ".csv"), metrics_csv(result.reps[k].run.metrics));
    write_text_file(dir / ("params_final_rep" + rep + ".csv"), params_csv(result.reps[k].run.params));
  }
  write_text_file(dir / "metrics_mean.csv", metrics_csv(result.mean));
}

void write_comparison(const std::filesystem::path& dir, const Comparison& cmp) {
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    const auto& r = cmp.rows[i];
    const std::string sub = "b" + std::to_string(r.class_b) + "_n" + std::to_string(r.n_per_class);
    write_experiment(dir / "no_da" / sub, cmp.no_da[i]);
    write_experiment(dir / "da" / sub, cmp.da[i]);
  }
  write_text_file(dir / "compare_da.csv", comparison_csv(cmp));
  write_text_file(dir / "compare_da.txt", comparison_table(cmp));
}

}  // namespace qcnnlab
