#pragma once

// Small classical CNN with hand-written forward and backward passes:
// [conv 3x3 "same" + ReLU + 2x2 max-pool] x blocks -> flatten -> dense -> softmax.

#include <cstdint>
#include <span>
#include <vector>

#include "qcnnlab/image.hpp"
#include "qcnnlab/training.hpp"

namespace qcnnlab {

/// Height x width x channels, channel fastest.
struct Tensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int h, int w, int c) : height(h), width(w), channels(c), data(std::size_t(h) * w * c, 0.0) {}

  static Tensor from_image(const Image& img);

  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width + col) * channels + ch;
  }
  double& at(int row, int col, int ch) { return data[index(row, col, ch)]; }
  double at(int row, int col, int ch) const { return data[index(row, col, ch)]; }
  std::size_t size() const noexcept { return data.size(); }
};

/// Kernel weights are laid out [ky][kx][cin][cout].
struct ConvShape {
  int kernel = 3;
  int in_channels = 1;
  int out_channels = 8;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(kernel) * kernel * in_channels * out_channels;
  }
};

struct Conv2dGrads {
  Tensor dx;
  std::vector<double> dkernels;
  std::vector<double> dbiases;
};

/// Stride-1 cross-correlation with zero "same" padding, plus bias. No activation.
/// Throws ShapeMismatch.
Tensor conv2d(const Tensor& x, std::span<const double> kernels, std::span<const double> biases,
              const ConvShape& shape);
Conv2dGrads conv2d_backward(const Tensor& x, std::span<const double> kernels,
                            const ConvShape& shape, const Tensor& dout);

Tensor relu(const Tensor& x);
/// Gradient through ReLU given the pre-activation input.
Tensor relu_backward(const Tensor& pre, const Tensor& dout);

struct PoolResult {
  Tensor out;
  std::vector<std::size_t> argmax;  // input index feeding each output cell
};

/// 2x2 window, stride 2; odd trailing rows/columns are dropped. Ties go to the
/// first cell in row-major window order.
PoolResult maxpool2x2(const Tensor& x);
Tensor maxpool2x2_backward(const Tensor& x, const PoolResult& pooled, const Tensor& dout);

struct SoftmaxXent {
  double loss = 0.0;
  std::vector<double> probs;
  std::vector<double> dlogits;  // probs - onehot(label)
};

/// probs = softmax(W flat + b) with W stored [class][input]; loss = -log probs[label].
SoftmaxXent dense_softmax_xent(std::span<const double> flat, std::span<const double> weights,
                               std::span<const double> biases, int label);

struct CnnArchitecture {
  int height = 0;
  int width = 0;
  std::vector<ConvShape> convs;
  int classes = 2;

  /// Flattened size after the last pooling.
  std::size_t dense_inputs() const;
  std::size_t param_count() const;
};

/// 8x8 inputs: one 8-filter block; larger inputs: 8- and 16-filter blocks.
CnnArchitecture cnn_architecture_for(int height, int width);

/// Architecture plus a flat parameter vector: for each block kernels then
/// biases, then dense weights and dense biases.
class CnnModel {
 public:
  explicit CnnModel(CnnArchitecture arch);

  /// Kernels and dense weights uniform in +-1/sqrt(fan_in); biases zero.
  static CnnModel initialized(CnnArchitecture arch, std::uint64_t seed);

  const CnnArchitecture& architecture() const noexcept { return arch_; }
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }

  std::span<const double> kernels(std::size_t block) const;
  std::span<const double> biases(std::size_t block) const;
  std::span<const double> dense_weights() const;
  std::span<const double> dense_biases() const;

  /// Class probabilities for one image.
  std::vector<double> predict_probs(const Image& img) const;

  /// Cross-entropy for one sample; adds d loss / d params into `grad`.
  double loss_and_grad(const Image& img, int label, std::span<double> grad) const;

  double loss(const Image& img, int label) const;

 private:
  struct Offsets {
    std::size_t kernels;
    std::size_t biases;
  };

  CnnArchitecture arch_;
  std::vector<Offsets> block_offsets_;
  std::size_t dense_w_offset_ = 0;
  std::size_t dense_b_offset_ = 0;
  std::vector<double> params_;
};

/// Constant-rate Adam defaults for the baseline: 200 epochs, lr 0.01, no decay.
TrainConfig cnn_train_defaults();

Evaluation evaluate_cnn(const CnnModel& model, std::span<const ImageSample> samples,
                        int threads = 1);

/// Full-batch Adam on mean cross-entropy; weights seeded from cfg.seed.
TrainResult train_cnn(const CnnArchitecture& arch, const Dataset& train, const Dataset& test,
                      const TrainConfig& cfg);

}  // namespace qcnnlab
