#include "qcnnlab/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qcnnlab/error.hpp"
#include "qcnnlab/parallel.hpp"

namespace qcnnlab {

namespace {

struct BlockTrace {
  Tensor input;
  Tensor pre;
  Tensor activated;
  PoolResult pooled;
};

std::size_t kernel_index(const ConvShape& s, int ky, int kx, int ci, int co) {
  return ((static_cast<std::size_t>(ky) * s.kernel + kx) * s.in_channels + ci) * s.out_channels + co;
}

void check_conv(const Tensor& x, std::span<const double> kernels, const ConvShape& shape) {
  if (x.channels != shape.in_channels || kernels.size() != shape.weight_count() ||
      shape.kernel < 1 || shape.kernel % 2 == 0) {
    fail(ErrorCode::ShapeMismatch, "conv2d kernel does not fit the input");
  }
}

}  // namespace

Tensor Tensor::from_image(const Image& img) {
  Tensor t(img.height, img.width, 1);
  t.data = img.pixels;
  return t;
}

Tensor conv2d(const Tensor& x, std::span<const double> kernels, std::span<const double> biases,
              const ConvShape& shape) {
  check_conv(x, kernels, shape);
  if (biases.size() != static_cast<std::size_t>(shape.out_channels)) {
    fail(ErrorCode::ShapeMismatch, "conv2d bias count");
  }
  const int pad = shape.kernel / 2;
  Tensor out(x.height, x.width, shape.out_channels);
  for (int r = 0; r < x.height; ++r) {
    for (int c = 0; c < x.width; ++c) {
      for (int co = 0; co < shape.out_channels; ++co) out.at(r, c, co) = biases[co];
      for (int ky = 0; ky < shape.kernel; ++ky) {
        const int yr = r + ky - pad;
        if (yr < 0 || yr >= x.height) continue;
        for (int kx = 0; kx < shape.kernel; ++kx) {
          const int xc = c + kx - pad;
          if (xc < 0 || xc >= x.width) continue;
          for (int ci = 0; ci < shape.in_channels; ++ci) {
            const double v = x.at(yr, xc, ci);
            const double* w = &kernels[kernel_index(shape, ky, kx, ci, 0)];
            for (int co = 0; co < shape.out_channels; ++co) out.at(r, c, co) += v * w[co];
          }
        }
      }
    }
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& x, std::span<const double> kernels,
                            const ConvShape& shape, const Tensor& dout) {
  check_conv(x, kernels, shape);
  if (dout.height != x.height || dout.width != x.width || dout.channels != shape.out_channels) {
    fail(ErrorCode::ShapeMismatch, "conv2d_backward gradient shape");
  }
  const int pad = shape.kernel / 2;
  Conv2dGrads g{Tensor(x.height, x.width, x.channels),
                std::vector<double>(shape.weight_count(), 0.0),
                std::vector<double>(static_cast<std::size_t>(shape.out_channels), 0.0)};
  for (int r = 0; r < x.height; ++r) {
    for (int c = 0; c < x.width; ++c) {
      for (int co = 0; co < shape.out_channels; ++co) g.dbiases[co] += dout.at(r, c, co);
      for (int ky = 0; ky < shape.kernel; ++ky) {
        const int yr = r + ky - pad;
        if (yr < 0 || yr >= x.height) continue;
        for (int kx = 0; kx < shape.kernel; ++kx) {
          const int xc = c + kx - pad;
          if (xc < 0 || xc >= x.width) continue;
          for (int ci = 0; ci < shape.in_channels; ++ci) {
            const std::size_t base = kernel_index(shape, ky, kx, ci, 0);
            const double v = x.at(yr, xc, ci);
            double acc = 0.0;
            for (int co = 0; co < shape.out_channels; ++co) {
              const double d = dout.at(r, c, co);
              g.dkernels[base + co] += v * d;
              acc += kernels[base + co] * d;
            }
            g.dx.at(yr, xc, ci) += acc;
          }
        }
      }
    }
  }
  return g;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) v = std::max(v, 0.0);
  return out;
}

Tensor relu_backward(const Tensor& pre, const Tensor& dout) {
  Tensor dx = dout;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (pre.data[i] <= 0.0) dx.data[i] = 0.0;
  return dx;
}

PoolResult maxpool2x2(const Tensor& x) {
  PoolResult res{Tensor(x.height / 2, x.width / 2, x.channels), {}};
  res.argmax.resize(res.out.size());
  for (int r = 0; r < res.out.height; ++r) {
    for (int c = 0; c < res.out.width; ++c) {
      for (int ch = 0; ch < x.channels; ++ch) {
        std::size_t best = x.index(2 * r, 2 * c, ch);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t i = x.index(2 * r + dy, 2 * c + dx, ch);
            if (x.data[i] > x.data[best]) best = i;
          }
        }
        const std::size_t o = res.out.index(r, c, ch);
        res.out.data[o] = x.data[best];
        res.argmax[o] = best;
      }
    }
  }
  return res;
}

Tensor maxpool2x2_backward(const Tensor& x, const PoolResult& pooled, const Tensor& dout) {
  if (dout.size() != pooled.argmax.size()) fail(ErrorCode::ShapeMismatch, "maxpool gradient shape");
  Tensor dx(x.height, x.width, x.channels);
  for (std::size_t o = 0; o < dout.size(); ++o) dx.data[pooled.argmax[o]] += dout.data[o];
  return dx;
}

SoftmaxXent dense_softmax_xent(std::span<const double> flat, std::span<const double> weights,
                               std::span<const double> biases, int label) {
  const std::size_t classes = biases.size();
  if (classes == 0 || weights.size() != classes * flat.size()) {
    fail(ErrorCode::ShapeMismatch, "dense layer shape");
  }
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    fail(ErrorCode::NonBinaryLabels, "label " + std::to_string(label) + " outside the classes");
  }
  std::vector<double> logits(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    double z = biases[k];
    const double* w = &weights[k * flat.size()];
    for (std::size_t i = 0; i < flat.size(); ++i) z += w[i] * flat[i];
    logits[k] = z;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z - top);
  SoftmaxXent out;
  out.probs.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) out.probs[k] = std::exp(logits[k] - top) / denom;
  // -log softmax computed from the shifted logits stays finite for large margins.
  out.loss = std::log(denom) - (logits[label] - top);
  out.dlogits = out.probs;
  out.dlogits[label] -= 1.0;
  return out;
}

std::size_t CnnArchitecture::dense_inputs() const {
  int h = height;
  int w = width;
  int c = 1;
  for (const auto& s : convs) {
    h /= 2;
    w /= 2;
    c = s.out_channels;
  }
  return static_cast<std::size_t>(h) * w * c;
}

std::size_t CnnArchitecture::param_count() const {
  std::size_t total = 0;
  for (const auto& s : convs) total += s.weight_count() + s.out_channels;
  return total + dense_inputs() * classes + classes;
}

CnnArchitecture cnn_architecture_for(int height, int width) {
  CnnArchitecture arch;
  arch.height = height;
  arch.width = width;
  if (std::max(height, width) <= 8) {
    arch.convs = {{3, 1, 8}};
  } else {
    arch.convs = {{3, 1, 8}, {3, 8, 16}};
  }
  return arch;
}

CnnModel::CnnModel(CnnArchitecture arch) : arch_(std::move(arch)) {
  std::size_t offset = 0;
  for (const auto& s : arch_.convs) {
    block_offsets_.push_back({offset, offset + s.weight_count()});
    offset += s.weight_count() + s.out_channels;
  }
  dense_w_offset_ = offset;
  dense_b_offset_ = offset + arch_.dense_inputs() * arch_.classes;
  params_.assign(arch_.param_count(), 0.0);
}

CnnModel CnnModel::initialized(CnnArchitecture arch, std::uint64_t seed) {
  CnnModel model(std::move(arch));
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < count; ++i) model.params_[offset + i] = dist(rng);
  };
  for (std::size_t b = 0; b < model.arch_.convs.size(); ++b) {
    const auto& s = model.arch_.convs[b];
    fill(model.block_offsets_[b].kernels, s.weight_count(),
         static_cast<std::size_t>(s.kernel) * s.kernel * s.in_channels);
  }
  fill(model.dense_w_offset_, model.arch_.dense_inputs() * model.arch_.classes,
       model.arch_.dense_inputs());
  return model;
}

std::span<const double> CnnModel::kernels(std::size_t block) const {
  return std::span<const double>(params_).subspan(block_offsets_[block].kernels,
                                                  arch_.convs[block].weight_count());
}

std::span<const double> CnnModel::biases(std::size_t block) const {
  return std::span<const double>(params_).subspan(block_offsets_[block].biases,
                                                  arch_.convs[block].out_channels);
}

std::span<const double> CnnModel::dense_weights() const {
  return std::span<const double>(params_).subspan(dense_w_offset_,
                                                  arch_.dense_inputs() * arch_.classes);
}

std::span<const double> CnnModel::dense_biases() const {
  return std::span<const double>(params_).subspan(dense_b_offset_, arch_.classes);
}

double CnnModel::loss_and_grad(const Image& img, int label, std::span<double> grad) const {
  if (img.height != arch_.height || img.width != arch_.width) {
    fail(ErrorCode::ShapeMismatch, "image does not match the CNN input size");
  }
  std::vector<BlockTrace> trace;
  Tensor x = Tensor::from_image(img);
  for (std::size_t b = 0; b < arch_.convs.size(); ++b) {
    BlockTrace t;
    t.input = x;
    t.pre = conv2d(x, kernels(b), biases(b), arch_.convs[b]);
    t.activated = relu(t.pre);
    t.pooled = maxpool2x2(t.activated);
    x = t.pooled.out;
    trace.push_back(std::move(t));
  }
  const SoftmaxXent head = dense_softmax_xent(x.data, dense_weights(), dense_biases(), label);
  if (grad.empty()) return head.loss;
  if (grad.size() != params_.size()) fail(ErrorCode::ShapeMismatch, "CNN gradient buffer");

  const std::size_t inputs = x.size();
  const auto w = dense_weights();
  Tensor dx(x.height, x.width, x.channels);
  for (int k = 0; k < arch_.classes; ++k) {
    const double d = head.dlogits[k];
    grad[dense_b_offset_ + k] += d;
    for (std::size_t i = 0; i < inputs; ++i) {
      grad[dense_w_offset_ + k * inputs + i] += d * x.data[i];
      dx.data[i] += w[k * inputs + i] * d;
    }
  }
  for (std::size_t b = arch_.convs.size(); b-- > 0;) {
    const BlockTrace& t = trace[b];
    const Tensor d_act = maxpool2x2_backward(t.activated, t.pooled, dx);
    const Tensor d_pre = relu_backward(t.pre, d_act);
    Conv2dGrads cg = conv2d_backward(t.input, kernels(b), arch_.convs[b], d_pre);
    for (std::size_t i = 0; i < cg.dkernels.size(); ++i) grad[block_offsets_[b].kernels + i] += cg.dkernels[i];
    for (std::size_t i = 0; i < cg.dbiases.size(); ++i) grad[block_offsets_[b].biases + i] += cg.dbiases[i];
    dx = std::move(cg.dx);
  }
  return head.loss;
}

double CnnModel::loss(const Image& img, int label) const { return loss_and_grad(img, label, {}); }

std::vector<double> CnnModel::predict_probs(const Image& img) const {
  Tensor x = Tensor::from_image(img);
  for (std::size_t b = 0; b < arch_.convs.size(); ++b) {
    x = maxpool2x2(relu(conv2d(x, kernels(b), biases(b), arch_.convs[b]))).out;
  }
  return dense_softmax_xent(x.data, dense_weights(), dense_biases(), 0).probs;
}

TrainConfig cnn_train_defaults() {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.lr0 = 0.01;
  cfg.lr_decay = 0.0;
  return cfg;
}

Evaluation evaluate_cnn(const CnnModel& model, std::span<const ImageSample> samples, int threads) {
  if (samples.empty()) fail(ErrorCode::EmptyBatch, "evaluation on an empty set");
  std::vector<double> losses(samples.size());
  std::vector<int> hits(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto probs = model.predict_probs(samples[i].image);
    losses[i] = -std::log(std::max(probs[samples[i].label], 1e-300));
    const int predicted = probs[1] > probs[0] ? 1 : 0;
    hits[i] = predicted == samples[i].label ? 1 : 0;
  });
  double loss = 0.0;
  double correct = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    loss += losses[i];
    correct += hits[i];
  }
  const double n = static_cast<double>(samples.size());
  return {loss / n, correct / n};
}

TrainResult train_cnn(const CnnArchitecture& arch, const Dataset& train, const Dataset& test,
                      const TrainConfig& cfg) {
  cfg.validate();
  check_binary(train, "training");
  check_binary(test, "test");
  CnnModel model = CnnModel::initialized(arch, cfg.seed);
  AdamState adam(model.params().size());
  const std::size_t n_params = model.params().size();

  std::vector<ImageSample> batch = train.samples;
  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.augment.enabled()) {
      parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
        auto rng = augmentation_rng(cfg.seed, epoch, i);
        batch[i].image = augment_sample(train.samples[i].image, cfg.augment, rng);
      });
    }
    std::vector<std::vector<double>> per_sample(batch.size(), std::vector<double>(n_params, 0.0));
    parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
      model.loss_and_grad(batch[i].image, batch[i].label, per_sample[i]);
    });
    std::vector<double> grad(n_params, 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const auto& g : per_sample)
      for (std::size_t k = 0; k < n_params; ++k) grad[k] += scale * g[k];
    for (double g : grad) {
      if (!std::isfinite(g)) fail(ErrorCode::NumericFailure, "non-finite CNN gradient");
    }
    adam_step(model.params(), grad, adam, epoch + 1, lr_at(epoch, cfg), cfg);

    const Evaluation tr = evaluate_cnn(model, train.samples, cfg.threads);
    const Evaluation te = evaluate_cnn(model, test.samples, cfg.threads);
    if (!std::isfinite(tr.loss) || !std::isfinite(te.loss)) {
      fail(ErrorCode::NumericFailure, "non-finite CNN loss at epoch " + std::to_string(epoch + 1));
    }
    result.metrics.push_back({epoch + 1, tr.loss, tr.accuracy, te.loss, te.accuracy});
  }
  result.params.assign(model.params().begin(), model.params().end());
  return result;
}

}  // namespace qcnnlab
