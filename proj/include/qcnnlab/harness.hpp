#pragma once

// Experiment runner: seeded repetitions, mean curves, and augmentation
// comparisons. Everything is computed in memory first; the write_* helpers
// only run once a result exists, so a failed run leaves no files behind.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcnnlab/config.hpp"
#include "qcnnlab/image.hpp"
#include "qcnnlab/training.hpp"

namespace qcnnlab {

/// Loads the configured dataset and applies the optional resize.
/// Throws FileNotFound naming the missing path.
Dataset load_dataset(const ExperimentConfig& cfg);

struct RepetitionResult {
  std::uint64_t seed = 0;
  TrainResult run;
};

struct ExperimentResult {
  int class_a = 0;
  int class_b = 1;
  int n_per_class = 0;
  std::vector<RepetitionResult> reps;
  std::vector<MetricsRow> mean;

  std::vector<double> final_test_accuracies() const;
  double mean_final_test_accuracy() const;
};

/// Element-wise arithmetic mean of the per-repetition curves.
std::vector<MetricsRow> mean_curve(const std::vector<RepetitionResult>& reps);

/// Repetition k uses seed base_seed + k for the subset, the initial weights,
/// and the augmentation draws.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data, int class_b,
                                int n_per_class, const AugmentConfig& augment);

struct ComparisonRow {
  int class_a = 0;
  int class_b = 1;
  int n_per_class = 0;
  double acc_no_da = 0.0;
  double acc_da = 0.0;
  double delta = 0.0;  // acc_da - acc_no_da
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<ExperimentResult> no_da;
  std::vector<ExperimentResult> da;
};

/// One row per (class_b, n_per_class), both arms on identical seeds.
Comparison compare_da(const ExperimentConfig& cfg, const Dataset& data,
                      const AugmentConfig& baseline_arm, const AugmentConfig& augmented_arm);
/// Baseline arm without augmentation, augmented arm from cfg.augment.
Comparison compare_da(const ExperimentConfig& cfg, const Dataset& data);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string params_csv(const std::vector<double>& params);
std::string comparison_csv(const Comparison& cmp);
std::string comparison_table(const Comparison& cmp);

/// metrics_rep<k>.csv, params_final_rep<k>.csv, metrics_mean.csv.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result);
/// compare_da.csv, compare_da.txt, and the raw runs under no_da/ and da/.
void write_comparison(const std::filesystem::path& dir, const Comparison& cmp);
/// Writes through a temporary sibling and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qcnnlab
