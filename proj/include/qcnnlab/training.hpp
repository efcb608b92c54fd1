#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qcnnlab/augment.hpp"
#include "qcnnlab/image.hpp"
#include "qcnnlab/qcnn.hpp"

namespace qcnnlab {

struct TrainConfig {
  int epochs = 100;
  double lr0 = 0.1;
  double lr_decay = 0.05;  // per epoch, compounded
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  /// Workers for per-sample fan-out; results do not depend on it.
  int threads = 1;
  /// Applied online to every training sample each epoch; test data is never augmented.
  AugmentConfig augment;

  /// Throws InvalidConfig.
  void validate() const;
};

struct MetricsRow {
  int epoch = 0;  // 1-based: metrics after the epoch's update
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

struct TrainResult {
  std::vector<MetricsRow> metrics;
  std::vector<double> params;
};

/// mean((p1 - label)^2). Throws EmptyBatch, LengthMismatch.
double mse_loss(std::span<const double> p1s, std::span<const int> labels);

/// lr0 * (1 - lr_decay)^epoch, epoch counted from 0.
double lr_at(int epoch, const TrainConfig& cfg);

using LossFn = std::function<double(std::span<const double>)>;

/// Central differences (L(x + s e_k) - L(x - s e_k)) / 2s for every coordinate.
std::vector<double> grad_fd(const LossFn& loss, std::span<const double> params,
                            double step = 1e-4);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// MSE loss over the batch and its exact gradient, by one reverse sweep per
/// sample over the circuit (adjoint differentiation). Samples fan out across
/// `threads`; the reduction is in sample order.
LossAndGradient grad_exact(const QcnnModel& model, std::span<const double> params,
                           std::span<const ImageSample> batch, int threads = 1);

LossAndGradient grad_exact(const QcnnArchitecture& arch, const QcnnParams& params,
                           std::span<const ImageSample> batch);

/// d p1 / d params for a single image.
std::vector<double> readout_gradient(const QcnnModel& model, std::span<const double> params,
                                     std::span<const double> pixels, double* p1_out = nullptr);

struct AdamState {
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
  std::vector<double> m;
  std::vector<double> v;
};

/// One bias-corrected Adam update at step t >= 1. Throws ShapeMismatch.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, int t,
               double lr, const TrainConfig& cfg);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate_qcnn(const QcnnModel& model, std::span<const double> params,
                         std::span<const ImageSample> samples, int threads = 1);

/// Seeded uniform(-pi, pi) initialization.
std::vector<double> init_qcnn_params(std::size_t count, std::uint64_t seed);

/// Full-batch Adam training. Deterministic in (arch, data, cfg).
/// Throws NonBinaryLabels, NumericFailure, and anything the forward pass throws.
TrainResult train_qcnn(const QcnnArchitecture& arch, const Dataset& train, const Dataset& test,
                       const TrainConfig& cfg);

/// Per-(epoch, sample) generator so augmentation does not depend on scheduling.
std::mt19937_64 augmentation_rng(std::uint64_t seed, int epoch, std::size_t sample);

/// Shared by both trainers: rejects labels outside {0, 1} and empty sets.
void check_binary(const Dataset& ds, const char* which);

}  // namespace qcnnlab
