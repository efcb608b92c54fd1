#include "qcnnlab/training.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qcnnlab/embedding.hpp"
#include "qcnnlab/error.hpp"
#include "qcnnlab/parallel.hpp"

namespace qcnnlab {

namespace {

struct BoundGate {
  GateMatrix adjoint;
  std::array<GateMatrix, 3> derivatives;
};

std::vector<BoundGate> bind(const Circuit& circuit, std::span<const double> params) {
  std::vector<BoundGate> bound;
  bound.reserve(circuit.gates().size());
  for (const auto& g : circuit.gates()) {
    BoundGate b;
    if (g.kind != GateKind::PauliRotation) {
      b.adjoint = g.matrix(params).adjoint();
      for (int j = 0; j < g.arity(); ++j) b.derivatives[j] = g.derivative(params, j);
    }
    bound.push_back(std::move(b));
  }
  return bound;
}

double re_inner(const StateVector& bra, const StateVector& ket) {
  return inner_product(bra, ket).real();
}

std::vector<double> readout_gradient_bound(const QcnnModel& model,
                                           const std::vector<BoundGate>& bound,
                                           std::span<const double> params,
                                           std::span<const double> pixels, double& p1) {
  const auto gates = model.circuit().gates();
  const int readout = model.architecture().readout_wire();
  StateVector psi = model.final_state(params, pixels);
  p1 = readout_prob_one(psi, readout);

  // lambda = projector onto readout |1>, pulled back through the circuit.
  StateVector lambda = psi;
  const std::size_t mask = std::size_t{1} << readout;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (!(i & mask)) lambda[i] = 0.0;

  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t k = gates.size(); k-- > 0;) {
    const ParamGate& g = gates[k];
    if (g.kind == GateKind::PauliRotation) {
      // 2 Re <lambda| -i/2 P psi_k> = Im <lambda| P psi_k>
      StateVector p_psi = psi;
      apply_pauli_word_inplace(p_psi, g.word, g.wires);
      grad[g.slots[0]] += inner_product(lambda, p_psi).imag();
      const double theta = params[g.slots[0]];
      apply_pauli_rotation_inplace(psi, g.word, g.wires, -theta);
      apply_pauli_rotation_inplace(lambda, g.word, g.wires, -theta);
      continue;
    }
    const BoundGate& b = bound[k];
    apply_gate_inplace(psi, b.adjoint, g.wires);  // psi is now the state before gate k
    for (int j = 0; j < g.arity(); ++j) {
      StateVector d_psi = psi;
      apply_gate_inplace(d_psi, b.derivatives[j], g.wires);
      grad[g.slots[j]] += 2.0 * re_inner(lambda, d_psi);
    }
    apply_gate_inplace(lambda, b.adjoint, g.wires);
  }
  return grad;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (!(lr0 >= 0.0)) fail(ErrorCode::InvalidConfig, "lr0 must be >= 0");
  if (!(lr_decay >= 0.0 && lr_decay < 1.0)) fail(ErrorCode::InvalidConfig, "lr_decay must be in [0, 1)");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail(ErrorCode::InvalidConfig, "Adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) fail(ErrorCode::InvalidConfig, "adam_eps must be > 0");
  augment.validate();
}

double mse_loss(std::span<const double> p1s, std::span<const int> labels) {
  if (p1s.empty()) fail(ErrorCode::EmptyBatch, "mse_loss of an empty batch");
  if (p1s.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, std::to_string(p1s.size()) + " predictions for " +
                                        std::to_string(labels.size()) + " labels");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p1s.size(); ++i) {
    const double e = p1s[i] - labels[i];
    sum += e * e;
  }
  return sum / static_cast<double>(p1s.size());
}

double lr_at(int epoch, const TrainConfig& cfg) {
  return cfg.lr0 * std::pow(1.0 - cfg.lr_decay, epoch);
}

std::vector<double> grad_fd(const LossFn& loss, std::span<const double> params, double step) {
  if (!(step > 0.0)) fail(ErrorCode::OutOfRange, "finite-difference step must be > 0");
  std::vector<double> x(params.begin(), params.end());
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + step;
    const double up = loss(x);
    x[k] = saved - step;
    const double down = loss(x);
    x[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

std::vector<double> readout_gradient(const QcnnModel& model, std::span<const double> params,
                                     std::span<const double> pixels, double* p1_out) {
  double p1 = 0.0;
  auto grad = readout_gradient_bound(model, bind(model.circuit(), params), params, pixels, p1);
  if (p1_out) *p1_out = p1;
  return grad;
}

LossAndGradient grad_exact(const QcnnModel& model, std::span<const double> params,
                           std::span<const ImageSample> batch, int threads) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "gradient of an empty batch");
  if (params.size() != model.architecture().param_count) {
    fail(ErrorCode::WeightLengthMismatch, "parameters do not match the architecture");
  }
  const auto bound = bind(model.circuit(), params);
  std::vector<std::vector<double>> per_sample(batch.size());
  std::vector<double> p1s(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    per_sample[i] =
        readout_gradient_bound(model, bound, params, batch[i].image.pixels, p1s[i]);
  });

  LossAndGradient out;
  out.gradient.assign(params.size(), 0.0);
  const double scale = 2.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = p1s[i] - batch[i].label;
    loss += err * err;
    for (std::size_t k = 0; k < params.size(); ++k) out.gradient[k] += scale * err * per_sample[i][k];
  }
  out.loss = loss / static_cast<double>(batch.size());
  return out;
}

LossAndGradient grad_exact(const QcnnArchitecture& arch, const QcnnParams& params,
                           std::span<const ImageSample> batch) {
  return grad_exact(QcnnModel(arch), params.flat(), batch);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, int t,
               double lr, const TrainConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, "Adam shapes disagree");
  }
  if (t < 1) fail(ErrorCode::OutOfRange, "Adam step counter starts at 1");
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = b1 * state.m[k] + (1.0 - b1) * grads[k];
    state.v[k] = b2 * state.v[k] + (1.0 - b2) * grads[k] * grads[k];
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
}

Evaluation evaluate_qcnn(const QcnnModel& model, std::span<const double> params,
                         std::span<const ImageSample> samples, int threads) {
  if (samples.empty()) fail(ErrorCode::EmptyBatch, "evaluation on an empty set");
  std::vector<double> p1s(samples.size());
  parallel_for(samples.size(), threads,
               [&](std::size_t i) { p1s[i] = model.forward(params, samples[i].image.pixels); });
  std::vector<int> labels(samples.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    labels[i] = samples[i].label;
    if (predict(p1s[i]) == labels[i]) ++correct;
  }
  return {mse_loss(p1s, labels), static_cast<double>(correct) / static_cast<double>(samples.size())};
}

std::vector<double> init_qcnn_params(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
  std::vector<double> params(count);
  for (auto& p : params) p = dist(rng);
  return params;
}

std::mt19937_64 augmentation_rng(std::uint64_t seed, int epoch, std::size_t sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(sample),
                    0x61756721U};
  return std::mt19937_64(seq);
}

void check_binary(const Dataset& ds, const char* which) {
  if (ds.empty()) fail(ErrorCode::EmptyBatch, std::string(which) + " set is empty");
  for (const auto& s : ds.samples) {
    if (s.label != 0 && s.label != 1) {
      fail(ErrorCode::NonBinaryLabels, std::string(which) + " set has label " +
                                           std::to_string(s.label));
    }
  }
}

TrainResult train_qcnn(const QcnnArchitecture& arch, const Dataset& train, const Dataset& test,
                       const TrainConfig& cfg) {
  cfg.validate();
  check_binary(train, "training");
  check_binary(test, "test");
  const QcnnModel model(arch);
  TrainResult result;
  result.params = init_qcnn_params(arch.param_count, cfg.seed);
  AdamState adam(arch.param_count);

  std::vector<ImageSample> batch = train.samples;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.augment.enabled()) {
      parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
        auto rng = augmentation_rng(cfg.seed, epoch, i);
        batch[i].image = augment_sample(train.samples[i].image, cfg.augment, rng);
      });
    }
    const LossAndGradient lg = grad_exact(model, result.params, batch, cfg.threads);
    for (double g : lg.gradient) {
      if (!std::isfinite(g)) fail(ErrorCode::NumericFailure, "non-finite gradient");
    }
    adam_step(result.params, lg.gradient, adam, epoch + 1, lr_at(epoch, cfg), cfg);

    const Evaluation tr = evaluate_qcnn(model, result.params, train.samples, cfg.threads);
    const Evaluation te = evaluate_qcnn(model, result.params, test.samples, cfg.threads);
    if (!std::isfinite(tr.loss) || !std::isfinite(te.loss)) {
      fail(ErrorCode::NumericFailure, "non-finite loss at epoch " + std::to_string(epoch + 1));
    }
    result.metrics.push_back({epoch + 1, tr.loss, tr.accuracy, te.loss, te.accuracy});
  }
  return result;
}

}  // namespace qcnnlab
