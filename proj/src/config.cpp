#include "qcnnlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qcnnlab/cnn.hpp"
#include "qcnnlab/error.hpp"

namespace qcnnlab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  fail(ErrorCode::InvalidConfig, "bad value '" + value + "' for " + key);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) bad_value(key, value);
  return out;
}

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigEntries parse_config_text(const std::string& text, const std::string& origin) {
  ConfigEntries entries;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidConfig, origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorCode::InvalidConfig, origin + ":" + std::to_string(line_no) + ": empty key");
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

ConfigEntries read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model",        "dataset",      "data_path",   "idx_images",       "idx_labels",
      "pgm_dir",      "pgm_classes",  "resize",      "class_a",          "class_b",
      "n_per_class",  "n_test",       "epochs",      "repetitions",      "base_seed",
      "augment",      "max_rotation", "contrast_lo", "contrast_hi",      "flip_probability",
      "n_qubits",     "depth",        "conv_prefix", "lr0",              "lr_decay",
      "adam_beta1",   "adam_beta2",   "adam_eps",    "threads",          "preview_count",
      "preview_variants"};
  return keys;
}

AugmentConfig ExperimentConfig::augment_config() const {
  AugmentConfig cfg;
  std::string choice = augment;
  if (choice == "none") return cfg;
  if (choice == "recipe") choice = dataset == DatasetKind::Digits ? "digits" : "flip_rotate";
  if (choice == "digits") {
    cfg = AugmentConfig::digits_recipe();
  } else if (choice == "flip_rotate") {
    cfg = AugmentConfig::flip_rotate_recipe();
  } else {
    std::stringstream ss(choice);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "flip") cfg.flip_horizontal = true;
      else if (item == "rotation") cfg.rotation = true;
      else if (item == "contrast") cfg.contrast = true;
      else bad_value("augment", augment);
    }
  }
  cfg.max_rotation = max_rotation;
  cfg.contrast_lo = contrast_lo;
  cfg.contrast_hi = contrast_hi;
  cfg.flip_probability = flip_probability;
  return cfg;
}

ExperimentConfig resolve_config(const ConfigEntries& entries) {
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : entries) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    }
    values[key] = value;
  }

  ExperimentConfig cfg;
  if (auto it = values.find("model"); it != values.end()) {
    if (it->second == "qcnn") cfg.model = ModelKind::Qcnn;
    else if (it->second == "cnn") cfg.model = ModelKind::Cnn;
    else bad_value("model", it->second);
  }
  cfg.train = cfg.model == ModelKind::Cnn ? cnn_train_defaults() : TrainConfig{};
  cfg.train.threads = 0;

  for (const auto& [key, value] : values) {
    if (key == "model") continue;
    if (key == "dataset") {
      if (value == "digits") cfg.dataset = DatasetKind::Digits;
      else if (value == "idx") cfg.dataset = DatasetKind::Idx;
      else if (value == "pgm") cfg.dataset = DatasetKind::Pgm;
      else bad_value(key, value);
    } else if (key == "data_path") {
      cfg.data_path = value;
    } else if (key == "idx_images") {
      cfg.idx_images = value;
    } else if (key == "idx_labels") {
      cfg.idx_labels = value;
    } else if (key == "pgm_dir") {
      cfg.pgm_dir = value;
    } else if (key == "pgm_classes") {
      cfg.pgm_classes = value;
    } else if (key == "resize") {
      if (value == "none") {
        cfg.resize_height = cfg.resize_width = 0;
      } else {
        const auto x = value.find('x');
        if (x == std::string::npos) bad_value(key, value);
        cfg.resize_height = parse_number<int>(key, value.substr(0, x));
        cfg.resize_width = parse_number<int>(key, value.substr(x + 1));
        if (cfg.resize_height <= 0 || cfg.resize_width <= 0) bad_value(key, value);
      }
    } else if (key == "class_a") {
      cfg.class_a = parse_number<int>(key, value);
    } else if (key == "class_b") {
      cfg.class_b = parse_int_list(key, value);
    } else if (key == "n_per_class") {
      cfg.n_per_class = parse_int_list(key, value);
    } else if (key == "n_test") {
      cfg.n_test = parse_number<int>(key, value);
    } else if (key == "epochs") {
      cfg.train.epochs = parse_number<int>(key, value);
    } else if (key == "repetitions") {
      cfg.repetitions = parse_number<int>(key, value);
    } else if (key == "base_seed") {
      cfg.base_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "augment") {
      cfg.augment = value;
    } else if (key == "max_rotation") {
      cfg.max_rotation = parse_real(key, value);
    } else if (key == "contrast_lo") {
      cfg.contrast_lo = parse_real(key, value);
    } else if (key == "contrast_hi") {
      cfg.contrast_hi = parse_real(key, value);
    } else if (key == "flip_probability") {
      cfg.flip_probability = parse_real(key, value);
    } else if (key == "n_qubits") {
      cfg.n_qubits = parse_number<int>(key, value);
    } else if (key == "depth") {
      cfg.depth = parse_number<int>(key, value);
    } else if (key == "conv_prefix") {
      if (value == "every_depth") cfg.conv_prefix = ConvPrefix::EveryDepth;
      else if (value == "first_depth") cfg.conv_prefix = ConvPrefix::FirstDepthOnly;
      else bad_value(key, value);
    } else if (key == "lr0") {
      cfg.train.lr0 = parse_real(key, value);
    } else if (key == "lr_decay") {
      cfg.train.lr_decay = parse_real(key, value);
    } else if (key == "adam_beta1") {
      cfg.train.adam_beta1 = parse_real(key, value);
    } else if (key == "adam_beta2") {
      cfg.train.adam_beta2 = parse_real(key, value);
    } else if (key == "adam_eps") {
      cfg.train.adam_eps = parse_real(key, value);
    } else if (key == "threads") {
      cfg.train.threads = parse_number<int>(key, value);
    } else if (key == "preview_count") {
      cfg.preview_count = parse_number<int>(key, value);
    } else if (key == "preview_variants") {
      cfg.preview_variants = parse_number<int>(key, value);
    }
  }

  if (cfg.repetitions < 1) fail(ErrorCode::InvalidConfig, "repetitions must be >= 1");
  if (cfg.n_test < 1) fail(ErrorCode::InvalidConfig, "n_test must be >= 1");
  if (cfg.depth < 0) fail(ErrorCode::InvalidConfig, "depth must be >= 0");
  if (cfg.n_qubits < 0) fail(ErrorCode::InvalidConfig, "n_qubits must be >= 0");
  if (cfg.train.threads < 0) fail(ErrorCode::InvalidConfig, "threads must be >= 0");
  for (int n : cfg.n_per_class)
    if (n < 1) fail(ErrorCode::InvalidConfig, "n_per_class entries must be >= 1");
  cfg.train.validate();
  cfg.augment_config().validate();
  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> v;
  v["model"] = cfg.model == ModelKind::Qcnn ? "qcnn" : "cnn";
  v["dataset"] = cfg.dataset == DatasetKind::Digits ? "digits"
                 : cfg.dataset == DatasetKind::Idx  ? "idx"
                                                    : "pgm";
  v["data_path"] = cfg.data_path;
  v["idx_images"] = cfg.idx_images;
  v["idx_labels"] = cfg.idx_labels;
  v["pgm_dir"] = cfg.pgm_dir;
  v["pgm_classes"] = cfg.pgm_classes;
  v["resize"] = cfg.resize_height > 0
                    ? std::to_string(cfg.resize_height) + "x" + std::to_string(cfg.resize_width)
                    : "none";
  v["class_a"] = std::to_string(cfg.class_a);
  v["class_b"] = join(cfg.class_b);
  v["n_per_class"] = join(cfg.n_per_class);
  v["n_test"] = std::to_string(cfg.n_test);
  v["epochs"] = std::to_string(cfg.train.epochs);
  v["repetitions"] = std::to_string(cfg.repetitions);
  v["base_seed"] = std::to_string(cfg.base_seed);
  v["augment"] = cfg.augment;
  v["max_rotation"] = format_real(cfg.max_rotation);
  v["contrast_lo"] = format_real(cfg.contrast_lo);
  v["contrast_hi"] = format_real(cfg.contrast_hi);
  v["flip_probability"] = format_real(cfg.flip_probability);
  v["n_qubits"] = std::to_string(cfg.n_qubits);
  v["depth"] = std::to_string(cfg.depth);
  v["conv_prefix"] = cfg.conv_prefix == ConvPrefix::EveryDepth ? "every_depth" : "first_depth";
  v["lr0"] = format_real(cfg.train.lr0);
  v["lr_decay"] = format_real(cfg.train.lr_decay);
  v["adam_beta1"] = format_real(cfg.train.adam_beta1);
  v["adam_beta2"] = format_real(cfg.train.adam_beta2);
  v["adam_eps"] = format_real(cfg.train.adam_eps);
  v["threads"] = std::to_string(cfg.train.threads);
  v["preview_count"] = std::to_string(cfg.preview_count);
  v["preview_variants"] = std::to_string(cfg.preview_variants);

  std::string out;
  for (const auto& key : config_keys()) out += key + " = " + v.at(key) + "\n";
  return out;
}

}  // namespace qcnnlab
