#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "qcnnlab/augment.hpp"
#include "qcnnlab/embedding.hpp"
#include "qcnnlab/qcnn.hpp"
#include "qcnnlab/simulator.hpp"
#include "qcnnlab/training.hpp"

namespace qcnnlab {

namespace {

using testing::random_pixels;
using testing::uniform_vector;

double gate_unitarity(std::mt19937_64& rng) {
  double worst = 0.0;
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const U3Params p = testing::random_u3(rng);
    worst = std::max(worst, u3_matrix(p).unitarity_error());
    worst = std::max(worst, controlled(u3_matrix(p)).unitarity_error());
    for (auto kind : {IsingKind::XX, IsingKind::YY, IsingKind::ZZ})
      worst = std::max(worst, ising_matrix(kind, angle(rng)).unitarity_error());
  }
  return worst;
}

double oracle_agreement(std::mt19937_64& rng) {
  double worst = 0.0;
  std::uniform_int_distribution<int> qubits(2, 5);
  for (int c = 0; c < 20; ++c) {
    const int n = qubits(rng);
    std::uniform_int_distribution<int> wire(0, n - 1);
    std::vector<PlacedGate> gates;
    StateVector state = testing::random_state(n, rng);
    const StateVector start = state;
    for (int g = 0; g < 6; ++g) {
      const int a = wire(rng);
      int b = wire(rng);
      while (b == a) b = wire(rng);
      PlacedGate pg{testing::random_unitary(4, rng), {a, b}};
      apply_gate_inplace(state, pg.matrix, pg.targets);
      gates.push_back(std::move(pg));
    }
    const GateMatrix dense = dense_circuit_oracle(gates, n);
    const auto expected = testing::mat_vec(dense, start.amplitudes());
    for (std::size_t i = 0; i < expected.size(); ++i)
      worst = std::max(worst, std::abs(expected[i] - state[i]));
  }
  return worst;
}

double pooling_agreement(std::mt19937_64& rng) {
  double worst = 0.0;
  const QcnnModel model(build_architecture(4, 1));
  for (int i = 0; i < 10; ++i) {
    const auto params = uniform_vector(model.architecture().param_count, -3.2, 3.2, rng);
    const auto pixels = random_pixels(16, rng);
    const double p1 = model.forward(params, pixels);
    const double ref = testing::branch_enumeration_p1(4, 1, ConvPrefix::EveryDepth, params, pixels);
    worst = std::max(worst, std::abs(p1 - ref));
  }
  return worst;
}

double gradient_agreement(std::mt19937_64& rng) {
  const QcnnModel model(build_architecture(4, 1));
  std::vector<ImageSample> batch;
  for (int i = 0; i < 3; ++i) batch.push_back({Image(4, 4, random_pixels(16, rng)), i % 2});
  const auto params = uniform_vector(model.architecture().param_count, -3.2, 3.2, rng);
  const auto exact = grad_exact(model, params, batch).gradient;
  const auto fd = grad_fd(
      [&](std::span<const double> x) {
        std::vector<double> p1s;
        std::vector<int> labels;
        for (const auto& s : batch) {
          p1s.push_back(model.forward(x, s.image.pixels));
          labels.push_back(s.label);
        }
        return mse_loss(p1s, labels);
      },
      params);
  double worst = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) worst = std::max(worst, std::abs(fd[k] - exact[k]));
  return worst;
}

double flip_involution(std::mt19937_64& rng) {
  const Image img(8, 8, uniform_vector(64, 0.0, 1.0, rng));
  return flip_h(flip_h(img)) == img ? 0.0 : 1.0;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  std::mt19937_64 rng(20240517);
  bool all = true;
  auto check = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    all = all && ok;
    out << (ok ? "ok   " : "FAIL ") << name << " (" << value << " <= " << tol << ")\n";
  };
  check("gate unitarity", gate_unitarity(rng), 1e-10);
  check("gate application vs dense oracle", oracle_agreement(rng), 1e-10);
  check("pooling vs branch enumeration", pooling_agreement(rng), 1e-12);
  check("exact vs finite-difference gradient", gradient_agreement(rng), 1e-6);
  check("parameter count (10, 2) = 99",
        std::abs(static_cast<double>(build_architecture(10, 2).param_count) - 99.0), 0.0);
  check("flip involution", flip_involution(rng), 0.0);
  return all;
}

}  // namespace qcnnlab
