#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qcnnlab/augment.hpp"
#include "qcnnlab/qcnn.hpp"
#include "qcnnlab/training.hpp"

namespace qcnnlab {

/// `key = value` entries in file order; later entries override earlier ones.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// UTF-8 lines of `key = value`; `#` starts a comment. Throws InvalidConfig
/// naming the line on malformed input and FileNotFound if unreadable.
ConfigEntries parse_config_text(const std::string& text, const std::string& origin = "<config>");
ConfigEntries read_config_file(const std::filesystem::path& path);

enum class ModelKind { Qcnn, Cnn };
enum class DatasetKind { Digits, Idx, Pgm };

struct ExperimentConfig {
  ModelKind model = ModelKind::Qcnn;
  DatasetKind dataset = DatasetKind::Digits;
  std::string data_path = "data/digits.csv";
  std::string idx_images;
  std::string idx_labels;
  std::string pgm_dir;
  std::string pgm_classes = "cat:0,dog:1";
  int resize_height = 0;  // 0 keeps the native size
  int resize_width = 0;
  int class_a = 0;
  std::vector<int> class_b = {1};
  std::vector<int> n_per_class = {50};
  int n_test = 100;
  int repetitions = 20;
  std::uint64_t base_seed = 0;
  /// none | recipe | digits | flip_rotate | comma list of flip,rotation,contrast
  std::string augment = "none";
  double max_rotation = 0.05;
  double contrast_lo = 0.9;
  double contrast_hi = 1.1;
  double flip_probability = 0.5;
  int n_qubits = 0;  // 0 = smallest register holding the image
  int depth = 2;
  ConvPrefix conv_prefix = ConvPrefix::EveryDepth;
  TrainConfig train;  // epochs, learning rate, Adam, threads
  int preview_count = 4;
  int preview_variants = 4;

  /// Augmentation for the augmented arm, resolved against the dataset.
  AugmentConfig augment_config() const;
};

/// Known keys in the order config_resolved.cfg lists them.
const std::vector<std::string>& config_keys();

/// Model-specific defaults first, then the entries. Throws InvalidConfig on
/// unknown keys or unparsable values.
ExperimentConfig resolve_config(const ConfigEntries& entries);

/// Every effective setting, one `key = value` line each, in config_keys() order.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace qcnnlab
