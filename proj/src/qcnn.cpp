#include "qcnnlab/qcnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "qcnnlab/embedding.hpp"
#include "qcnnlab/error.hpp"

namespace qcnnlab {

namespace {

constexpr Complex kMinusHalfI{0.0, -0.5};

IsingKind ising_kind(GateKind kind) {
  switch (kind) {
    case GateKind::IsingXX: return IsingKind::XX;
    case GateKind::IsingYY: return IsingKind::YY;
    default: return IsingKind::ZZ;
  }
}

Pauli ising_pauli(GateKind kind) {
  switch (kind) {
    case GateKind::IsingXX: return Pauli::X;
    case GateKind::IsingYY: return Pauli::Y;
    default: return Pauli::Z;
  }
}

U3Params u3_from(std::span<const double> params, std::size_t slot) {
  return {params[slot], params[slot + 1], params[slot + 2]};
}

void check_weights(std::span<const double> weights, std::size_t expected, const char* layer) {
  if (weights.size() != expected) {
    fail(ErrorCode::WeightLengthMismatch, std::string(layer) + " expects " +
                                              std::to_string(expected) + " weights, got " +
                                              std::to_string(weights.size()));
  }
}

}  // namespace

std::size_t qcnn_param_count(int depth, int remaining) {
  std::size_t flatten = 1;
  for (int i = 0; i < remaining; ++i) flatten *= 4;
  return kWeightsPerDepth * static_cast<std::size_t>(depth) + (flatten - 1);
}

QcnnArchitecture build_architecture(int n_qubits, int depth, ConvPrefix prefix) {
  if (n_qubits < 2) fail(ErrorCode::TooDeep, "a QCNN needs at least two qubits");
  if (depth < 0) fail(ErrorCode::TooDeep, "negative depth");
  QcnnArchitecture arch;
  arch.n_qubits = n_qubits;
  arch.depth = depth;
  arch.prefix = prefix;
  std::vector<int> active(n_qubits);
  for (int q = 0; q < n_qubits; ++q) active[q] = q;
  for (int d = 0; d < depth; ++d) {
    if (active.size() < 2) {
      fail(ErrorCode::TooDeep, "depth " + std::to_string(depth) + " on " +
                                   std::to_string(n_qubits) + " qubits leaves no wire to pool");
    }
    arch.active_wires_per_depth.push_back(active);
    std::vector<int> survivors;
    for (std::size_t i = 0; i < active.size(); i += 2) survivors.push_back(active[i]);
    active = std::move(survivors);
  }
  arch.remaining_wires = active;
  arch.param_count = qcnn_param_count(depth, static_cast<int>(active.size()));
  return arch;
}

QcnnParams::QcnnParams(const QcnnArchitecture& arch)
    : depth_(arch.depth), values_(arch.param_count, 0.0) {}

QcnnParams::QcnnParams(const QcnnArchitecture& arch, std::vector<double> values)
    : depth_(arch.depth), values_(std::move(values)) {
  check_weights(values_, arch.param_count, "architecture");
}

std::span<const double> QcnnParams::conv_weights(int depth) const {
  return std::span<const double>(values_).subspan(depth * kWeightsPerDepth, kConvWeights);
}

std::span<const double> QcnnParams::pool_weights(int depth) const {
  return std::span<const double>(values_).subspan(depth * kWeightsPerDepth + kConvWeights,
                                                  kPoolWeights);
}

std::span<const double> QcnnParams::flatten_weights() const {
  return std::span<const double>(values_).subspan(depth_ * kWeightsPerDepth);
}

int ParamGate::arity() const {
  return (kind == GateKind::U3 || kind == GateKind::ControlledU3) ? 3 : 1;
}

GateMatrix ParamGate::matrix(std::span<const double> params) const {
  switch (kind) {
    case GateKind::U3: return u3_matrix(u3_from(params, slots[0]));
    case GateKind::ControlledU3: return controlled(u3_matrix(u3_from(params, slots[0])));
    case GateKind::IsingXX:
    case GateKind::IsingYY:
    case GateKind::IsingZZ: return ising_matrix(ising_kind(kind), params[slots[0]]);
    case GateKind::PauliRotation: {
      GateMatrix m = pauli_word_matrix(word);
      const std::size_t dim = m.dim();
      m *= Complex{0.0, -std::sin(params[slots[0]] / 2.0)};
      for (std::size_t i = 0; i < dim; ++i) m(i, i) += std::cos(params[slots[0]] / 2.0);
      return m;
    }
  }
  return GateMatrix::identity(2);
}

GateMatrix ParamGate::derivative(std::span<const double> params, int which) const {
  switch (kind) {
    case GateKind::U3: return u3_derivative(u3_from(params, slots[0]), which);
    case GateKind::ControlledU3: {
      const GateMatrix d = u3_derivative(u3_from(params, slots[0]), which);
      GateMatrix out(4);
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) out(2 + r, 2 + c) = d(r, c);
      return out;
    }
    case GateKind::IsingXX:
    case GateKind::IsingYY:
    case GateKind::IsingZZ:
    case GateKind::PauliRotation: {
      // d/dt exp(-i t/2 P) = -i/2 P exp(-i t/2 P)
      const std::vector<Pauli> pp = kind == GateKind::PauliRotation
                                        ? word
                                        : std::vector<Pauli>{ising_pauli(kind), ising_pauli(kind)};
      GateMatrix d = pauli_word_matrix(pp) * matrix(params);
      d *= kMinusHalfI;
      return d;
    }
  }
  return GateMatrix(2);
}

void Circuit::add_u3(int wire, std::size_t slot) {
  gates_.push_back({GateKind::U3, {wire}, {slot, slot + 1, slot + 2}, {}});
}

void Circuit::add_ising(GateKind kind, int a, int b, std::size_t slot) {
  gates_.push_back({kind, {a, b}, {slot, 0, 0}, {}});
}

void Circuit::add_controlled_u3(int control, int target, std::size_t slot) {
  gates_.push_back({GateKind::ControlledU3, {control, target}, {slot, slot + 1, slot + 2}, {}});
}

void Circuit::add_pauli_rotation(std::vector<Pauli> word, std::vector<int> wires,
                                 std::size_t slot) {
  gates_.push_back({GateKind::PauliRotation, std::move(wires), {slot, 0, 0}, std::move(word)});
}

std::size_t Circuit::distinct_slots() const {
  std::set<std::size_t> seen;
  for (const auto& g : gates_)
    for (int j = 0; j < g.arity(); ++j) seen.insert(g.slots[j]);
  return seen.size();
}

void Circuit::apply(StateVector& state, std::span<const double> params) const {
  for (const auto& g : gates_) {
    if (g.kind == GateKind::PauliRotation) {
      apply_pauli_rotation_inplace(state, g.word, g.wires, params[g.slots[0]]);
    } else {
      apply_gate_inplace(state, g.matrix(params), g.wires);
    }
  }
}

void add_conv_layer(Circuit& circuit, std::span<const int> wires, std::size_t slot_offset,
                    bool with_prefix) {
  if (wires.size() < 2) fail(ErrorCode::TooDeep, "convolution needs at least two wires");
  const std::size_t n = wires.size();
  for (std::size_t parity = 0; parity < 2; ++parity) {
    for (std::size_t i = parity; i + 1 < n; i += 2) {
      const int a = wires[i];
      const int b = wires[i + 1];
      if (parity == 0 && with_prefix) {
        circuit.add_u3(a, slot_offset + 0);
        circuit.add_u3(b, slot_offset + 3);
      }
      circuit.add_ising(GateKind::IsingXX, a, b, slot_offset + 6);
      circuit.add_ising(GateKind::IsingYY, a, b, slot_offset + 7);
      circuit.add_ising(GateKind::IsingZZ, a, b, slot_offset + 8);
      circuit.add_u3(a, slot_offset + 9);
      circuit.add_u3(b, slot_offset + 12);
    }
  }
}

std::vector<int> add_pool_layer(Circuit& circuit, std::span<const int> wires,
                                std::size_t slot_offset) {
  if (wires.size() < 2) fail(ErrorCode::TooDeep, "pooling needs at least two wires");
  std::vector<int> survivors;
  for (std::size_t j = 0; j < wires.size(); ++j) {
    if (j % 2 == 1) {
      circuit.add_controlled_u3(wires[j], wires[j - 1], slot_offset);
    } else {
      survivors.push_back(wires[j]);
    }
  }
  return survivors;
}

std::vector<std::vector<Pauli>> flatten_words(int r) {
  static constexpr Pauli kLetters[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  std::size_t total = 1;
  for (int i = 0; i < r; ++i) total *= 4;
  std::vector<std::vector<Pauli>> words;
  words.reserve(total - 1);
  for (std::size_t code = 1; code < total; ++code) {
    std::vector<Pauli> word(r);
    std::size_t rest = code;
    for (int pos = r - 1; pos >= 0; --pos) {
      word[pos] = kLetters[rest % 4];
      rest /= 4;
    }
    words.push_back(std::move(word));
  }
  return words;
}

void add_flatten_layer(Circuit& circuit, std::span<const int> wires, std::size_t slot_offset) {
  std::vector<int> sorted_wires(wires.begin(), wires.end());
  std::sort(sorted_wires.begin(), sorted_wires.end());
  std::size_t slot = slot_offset;
  for (auto& word : flatten_words(static_cast<int>(wires.size()))) {
    // Identity letters are dropped so the rotation only touches the wires it acts on.
    std::vector<Pauli> letters;
    std::vector<int> acting;
    for (std::size_t k = 0; k < word.size(); ++k) {
      if (word[k] != Pauli::I) {
        letters.push_back(word[k]);
        acting.push_back(sorted_wires[k]);
      }
    }
    circuit.add_pauli_rotation(std::move(letters), std::move(acting), slot++);
  }
}

Circuit build_circuit(const QcnnArchitecture& arch) {
  Circuit circuit;
  for (int d = 0; d < arch.depth; ++d) {
    const std::size_t offset = static_cast<std::size_t>(d) * kWeightsPerDepth;
    const bool prefix = arch.prefix == ConvPrefix::EveryDepth || d == 0;
    const auto& wires = arch.active_wires_per_depth[d];
    add_conv_layer(circuit, wires, offset, prefix);
    add_pool_layer(circuit, wires, offset + kConvWeights);
  }
  add_flatten_layer(circuit, arch.remaining_wires,
                    static_cast<std::size_t>(arch.depth) * kWeightsPerDepth);
  return circuit;
}

StateVector conv_layer(StateVector state, std::span<const double> weights,
                       std::span<const int> wires, bool with_prefix) {
  check_weights(weights, kConvWeights, "conv_layer");
  Circuit circuit;
  add_conv_layer(circuit, wires, 0, with_prefix);
  circuit.apply(state, weights);
  return state;
}

std::pair<StateVector, std::vector<int>> pool_layer(StateVector state,
                                                    std::span<const double> weights,
                                                    std::span<const int> wires) {
  check_weights(weights, kPoolWeights, "pool_layer");
  Circuit circuit;
  std::vector<int> survivors = add_pool_layer(circuit, wires, 0);
  circuit.apply(state, weights);
  return {std::move(state), std::move(survivors)};
}

StateVector flatten_layer(StateVector state, std::span<const double> weights,
                          std::span<const int> wires) {
  check_weights(weights, qcnn_param_count(0, static_cast<int>(wires.size())), "flatten_layer");
  Circuit circuit;
  add_flatten_layer(circuit, wires, 0);
  circuit.apply(state, weights);
  return state;
}

double forward(const QcnnArchitecture& arch, const QcnnParams& params,
               std::span<const double> pixels) {
  if (params.size() != arch.param_count) {
    fail(ErrorCode::WeightLengthMismatch, "parameters do not match the architecture");
  }
  return QcnnModel(arch).forward(params.flat(), pixels);
}

int predict(double p1) { return p1 > 0.5 ? 1 : 0; }

QcnnModel::QcnnModel(QcnnArchitecture arch) : arch_(std::move(arch)), circuit_(build_circuit(arch_)) {}

StateVector QcnnModel::final_state(std::span<const double> params,
                                   std::span<const double> pixels) const {
  if (params.size() != arch_.param_count) {
    fail(ErrorCode::WeightLengthMismatch, "expected " + std::to_string(arch_.param_count) +
                                              " parameters, got " +
                                              std::to_string(params.size()));
  }
  StateVector state = amplitude_embed(pixels, arch_.n_qubits);
  circuit_.apply(state, params);
  return state;
}

double QcnnModel::forward(std::span<const double> params, std::span<const double> pixels) const {
  return readout_prob_one(final_state(params, pixels), arch_.readout_wire());
}

void write_params_csv(const std::filesystem::path& path, std::span<const double> params) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FileNotFound, "cannot write " + path.string());
  char buf[64];
  for (double v : params) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  if (!out) fail(ErrorCode::FileNotFound, "write failed for " + path.string());
}

std::vector<double> read_params_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || !std::isfinite(v)) {
      fail(ErrorCode::Malformed, path.string() + ":" + std::to_string(line_no) +
                                     ": not a finite number");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace qcnnlab
