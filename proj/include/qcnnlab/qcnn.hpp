#pragma once

// Quantum convolutional network: amplitude embedding, then per depth a
// shared-weight convolution and a measurement-style pooling, then a
// Pauli-word flatten layer on the surviving wires and a single readout.
//
// Pooling conditions a U3 on each odd-position wire being |1>. It is realized
// as a controlled gate (deferred measurement): the conditioning wire is never
// touched again, so the readout statistics equal those of measure-then-apply.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "qcnnlab/simulator.hpp"

namespace qcnnlab {

inline constexpr std::size_t kConvWeights = 15;
inline constexpr std::size_t kPoolWeights = 3;
inline constexpr std::size_t kWeightsPerDepth = kConvWeights + kPoolWeights;
/// Weights [0, 6) of a convolution block feed the two leading U3 gates.
inline constexpr std::size_t kConvPrefixWeights = 6;

/// Where the two leading U3 gates of the convolution are placed.
enum class ConvPrefix {
  EveryDepth,      ///< all 18 weights of every depth are live
  FirstDepthOnly,  ///< prefix only at depth 0; weights [0, 6) are inert deeper down
};

struct QcnnArchitecture {
  int n_qubits = 0;
  int depth = 0;
  ConvPrefix prefix = ConvPrefix::EveryDepth;
  /// Active wires at the start of each depth (size == depth).
  std::vector<std::vector<int>> active_wires_per_depth;
  std::vector<int> remaining_wires;
  std::size_t param_count = 0;

  int readout_wire() const { return remaining_wires.front(); }
};

/// 18 d + (4^r - 1).
std::size_t qcnn_param_count(int depth, int remaining);

/// Throws TooDeep when a pooling would start with fewer than two wires.
QcnnArchitecture build_architecture(int n_qubits, int depth,
                                    ConvPrefix prefix = ConvPrefix::EveryDepth);

/// Flat parameter vector with the block layout [depth 0 | ... | depth d-1 | flatten].
class QcnnParams {
 public:
  explicit QcnnParams(const QcnnArchitecture& arch);
  QcnnParams(const QcnnArchitecture& arch, std::vector<double> values);

  std::span<const double> conv_weights(int depth) const;
  std::span<const double> pool_weights(int depth) const;
  std::span<const double> flatten_weights() const;

  std::span<const double> flat() const noexcept { return values_; }
  std::span<double> flat() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  int depth_;
  std::vector<double> values_;
};

enum class GateKind { U3, IsingXX, IsingYY, IsingZZ, ControlledU3, PauliRotation };

/// A gate whose angles are read from parameter slots at evaluation time.
struct ParamGate {
  GateKind kind;
  std::vector<int> wires;
  std::array<std::size_t, 3> slots{};
  std::vector<Pauli> word;  // PauliRotation only

  int arity() const;
  GateMatrix matrix(std::span<const double> params) const;
  /// d(matrix)/d(params[slots[which]]). Not used for PauliRotation, whose
  /// derivative is applied as -i/2 P after the rotation.
  GateMatrix derivative(std::span<const double> params, int which) const;
};

/// Ordered list of parameterized gates; the single source for forward
/// evaluation, differentiation, and parameter counting.
class Circuit {
 public:
  void add_u3(int wire, std::size_t slot);
  void add_ising(GateKind kind, int a, int b, std::size_t slot);
  void add_controlled_u3(int control, int target, std::size_t slot);
  void add_pauli_rotation(std::vector<Pauli> word, std::vector<int> wires, std::size_t slot);

  std::span<const ParamGate> gates() const noexcept { return gates_; }

  /// Number of distinct parameter slots read by the gates.
  std::size_t distinct_slots() const;

  void apply(StateVector& state, std::span<const double> params) const;

 private:
  std::vector<ParamGate> gates_;
};

void add_conv_layer(Circuit& circuit, std::span<const int> wires, std::size_t slot_offset,
                    bool with_prefix);
/// Returns the survivors (even positions).
std::vector<int> add_pool_layer(Circuit& circuit, std::span<const int> wires,
                                std::size_t slot_offset);
void add_flatten_layer(Circuit& circuit, std::span<const int> wires, std::size_t slot_offset);

/// Non-identity Pauli words over r wires in lexicographic order (I < X < Y < Z),
/// leftmost letter on the lowest-indexed wire.
std::vector<std::vector<Pauli>> flatten_words(int r);

Circuit build_circuit(const QcnnArchitecture& arch);

StateVector conv_layer(StateVector state, std::span<const double> weights,
                       std::span<const int> wires, bool with_prefix = true);

std::pair<StateVector, std::vector<int>> pool_layer(StateVector state,
                                                    std::span<const double> weights,
                                                    std::span<const int> wires);

StateVector flatten_layer(StateVector state, std::span<const double> weights,
                          std::span<const int> wires);

/// Probability of reading |1> on the readout wire.
double forward(const QcnnArchitecture& arch, const QcnnParams& params,
               std::span<const double> pixels);

/// 1 if p1 > 0.5, else 0 (ties go to class 0).
int predict(double p1);

/// Architecture plus its compiled circuit, for repeated evaluation.
class QcnnModel {
 public:
  explicit QcnnModel(QcnnArchitecture arch);

  const QcnnArchitecture& architecture() const noexcept { return arch_; }
  const Circuit& circuit() const noexcept { return circuit_; }

  StateVector final_state(std::span<const double> params, std::span<const double> pixels) const;
  double forward(std::span<const double> params, std::span<const double> pixels) const;

 private:
  QcnnArchitecture arch_;
  Circuit circuit_;
};

/// One decimal value per line, block order depth 0 ... depth d-1, flatten.
void write_params_csv(const std::filesystem::path& path, std::span<const double> params);
std::vector<double> read_params_csv(const std::filesystem::path& path);

}  // namespace qcnnlab
