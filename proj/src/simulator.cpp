#include "qcnnlab/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qcnnlab/error.hpp"

namespace qcnnlab {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::size_t v) {
  int k = 0;
  while ((std::size_t{1} << k) < v) ++k;
  return k;
}

void check_targets(int n_qubits, std::span<const int> targets) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n_qubits) {
      fail(ErrorCode::TargetOutOfRange, "qubit " + std::to_string(targets[i]) +
                                            " outside register of " +
                                            std::to_string(n_qubits));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        fail(ErrorCode::DuplicateTarget, "qubit " + std::to_string(targets[i]) + " repeated");
      }
    }
  }
}

// Offset of each local basis index, with targets[0] the most significant local bit.
std::vector<std::size_t> local_offsets(std::span<const int> targets) {
  const std::size_t k = targets.size();
  std::vector<std::size_t> offsets(std::size_t{1} << k, 0);
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    for (std::size_t t = 0; t < k; ++t) {
      if ((j >> (k - 1 - t)) & 1U) offsets[j] |= std::size_t{1} << targets[t];
    }
  }
  return offsets;
}

GateMatrix pauli_matrix(Pauli p) {
  switch (p) {
    case Pauli::I: return GateMatrix::identity(2);
    case Pauli::X: return GateMatrix(2, {0.0, 1.0, 1.0, 0.0});
    case Pauli::Y: return GateMatrix(2, {0.0, -kI, kI, 0.0});
    case Pauli::Z: return GateMatrix(2, {1.0, 0.0, 0.0, -1.0});
  }
  return GateMatrix::identity(2);
}

GateMatrix kron(const GateMatrix& a, const GateMatrix& b) {
  GateMatrix out(a.dim() * b.dim());
  for (std::size_t ar = 0; ar < a.dim(); ++ar)
    for (std::size_t ac = 0; ac < a.dim(); ++ac)
      for (std::size_t br = 0; br < b.dim(); ++br)
        for (std::size_t bc = 0; bc < b.dim(); ++bc)
          out(ar * b.dim() + br, ac * b.dim() + bc) = a(ar, ac) * b(br, bc);
  return out;
}

}  // namespace

GateMatrix::GateMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, Complex{0.0, 0.0}) {}

GateMatrix::GateMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim_ * dim_) + " entries");
  }
}

GateMatrix GateMatrix::identity(std::size_t dim) {
  GateMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

GateMatrix GateMatrix::adjoint() const {
  GateMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

GateMatrix GateMatrix::operator*(const GateMatrix& rhs) const {
  if (rhs.dim_ != dim_) fail(ErrorCode::DimensionMismatch, "matrix product of unequal sizes");
  GateMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const Complex a = (*this)(r, k);
      if (a == Complex{}) continue;
      for (std::size_t c = 0; c < dim_; ++c) out(r, c) += a * rhs(k, c);
    }
  }
  return out;
}

GateMatrix& GateMatrix::operator*=(Complex scale) {
  for (auto& e : entries_) e *= scale;
  return *this;
}

double GateMatrix::unitarity_error() const {
  const GateMatrix product = adjoint() * (*this);
  double worst = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      worst = std::max(worst, std::abs(product(r, c) - (r == c ? 1.0 : 0.0)));
  return worst;
}

double max_abs_diff(const GateMatrix& a, const GateMatrix& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "comparing unequal sizes");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  return worst;
}

double max_abs_diff_up_to_phase(const GateMatrix& a, const GateMatrix& b) {
  // Align on the largest entry of b, then compare.
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < b.entries().size(); ++i)
    if (std::abs(b.entries()[i]) > std::abs(b.entries()[pivot])) pivot = i;
  if (std::abs(b.entries()[pivot]) == 0.0) return max_abs_diff(a, b);
  Complex ratio = a.entries()[pivot] / b.entries()[pivot];
  const double mag = std::abs(ratio);
  ratio = mag > 0.0 ? ratio / mag : Complex{1.0, 0.0};
  GateMatrix rotated = b;
  rotated *= ratio;
  return max_abs_diff(a, rotated);
}

StateVector::StateVector(int n_qubits) : StateVector(basis(n_qubits, 0)) {}

StateVector::StateVector(int n_qubits, std::vector<Complex> amps)
    : n_qubits_(n_qubits), amps_(std::move(amps)) {}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  if (n_qubits < 1 || n_qubits > 30) {
    fail(ErrorCode::TooManyQubits, "register of " + std::to_string(n_qubits) + " qubits");
  }
  std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  if (index >= amps.size()) fail(ErrorCode::OutOfRange, "basis index beyond register");
  amps[index] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amps) {
  if (!is_power_of_two(amps.size()) || amps.size() < 2) {
    fail(ErrorCode::DimensionMismatch, "amplitude count " + std::to_string(amps.size()) +
                                           " is not a power of two");
  }
  const int n = log2_exact(amps.size());
  return StateVector(n, std::move(amps));
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return std::sqrt(sum);
}

Complex inner_product(const StateVector& bra, const StateVector& ket) {
  if (bra.size() != ket.size()) fail(ErrorCode::DimensionMismatch, "inner product sizes differ");
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < bra.size(); ++i) sum += std::conj(bra[i]) * ket[i];
  return sum;
}

GateMatrix u3_matrix(const U3Params& p) {
  const double c = std::cos(p.theta / 2.0);
  const double s = std::sin(p.theta / 2.0);
  return GateMatrix(2, {c, -std::polar(1.0, p.lambda) * s, std::polar(1.0, p.phi) * s,
                        std::polar(1.0, p.phi + p.lambda) * c});
}

GateMatrix u3_derivative(const U3Params& p, int which) {
  const double c = std::cos(p.theta / 2.0);
  const double s = std::sin(p.theta / 2.0);
  const Complex el = std::polar(1.0, p.lambda);
  const Complex ep = std::polar(1.0, p.phi);
  const Complex epl = std::polar(1.0, p.phi + p.lambda);
  switch (which) {
    case 0: return GateMatrix(2, {-s / 2.0, -el * c / 2.0, ep * c / 2.0, -epl * s / 2.0});
    case 1: return GateMatrix(2, {0.0, 0.0, kI * ep * s, kI * epl * c});
    case 2: return GateMatrix(2, {0.0, -kI * el * s, 0.0, kI * epl * c});
    default: fail(ErrorCode::OutOfRange, "U3 has three parameters");
  }
}

GateMatrix axis_rotation_matrix(double alpha, const Axis& axis) {
  const double len = std::sqrt(axis.nx * axis.nx + axis.ny * axis.ny + axis.nz * axis.nz);
  if (std::abs(len - 1.0) > 1e-9) {
    fail(ErrorCode::AxisNotNormalized, "axis norm " + std::to_string(len));
  }
  const double c = std::cos(alpha / 2.0);
  const double s = std::sin(alpha / 2.0);
  // cos I - i sin (nx X + ny Y + nz Z)
  return GateMatrix(2, {Complex{c, -s * axis.nz}, Complex{-s * axis.ny, -s * axis.nx},
                        Complex{s * axis.ny, -s * axis.nx}, Complex{c, s * axis.nz}});
}

GateMatrix ising_matrix(IsingKind kind, double theta) {
  const double c = std::cos(theta / 2.0);
  const Complex mis = -kI * std::sin(theta / 2.0);
  GateMatrix m(4);
  switch (kind) {
    case IsingKind::XX:
      for (std::size_t i = 0; i < 4; ++i) {
        m(i, i) = c;
        m(i, 3 - i) = mis;
      }
      break;
    case IsingKind::YY:
      for (std::size_t i = 0; i < 4; ++i) {
        m(i, i) = c;
        // Y(x)Y has -1 on the outer anti-diagonal and +1 on the inner one.
        m(i, 3 - i) = (i == 0 || i == 3) ? -mis : mis;
      }
      break;
    case IsingKind::ZZ: {
      const Complex minus = std::polar(1.0, -theta / 2.0);
      const Complex plus = std::polar(1.0, theta / 2.0);
      m(0, 0) = minus;
      m(1, 1) = plus;
      m(2, 2) = plus;
      m(3, 3) = minus;
      break;
    }
  }
  return m;
}

const FixedGates& fixed_gates() {
  static const FixedGates gates = [] {
    const double r = 1.0 / std::numbers::sqrt2;
    FixedGates g{pauli_matrix(Pauli::X), pauli_matrix(Pauli::Y), pauli_matrix(Pauli::Z),
                 GateMatrix(2, {r, r, r, -r}), GateMatrix::identity(4)};
    g.cnot(2, 2) = 0.0;
    g.cnot(3, 3) = 0.0;
    g.cnot(2, 3) = 1.0;
    g.cnot(3, 2) = 1.0;
    return g;
  }();
  return gates;
}

GateMatrix controlled(const GateMatrix& g) {
  if (g.dim() != 2) fail(ErrorCode::DimensionMismatch, "controlled() takes a single-qubit gate");
  if (!g.is_unitary(1e-9)) fail(ErrorCode::NotUnitary, "controlled() of a non-unitary matrix");
  GateMatrix out = GateMatrix::identity(4);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) out(2 + r, 2 + c) = g(r, c);
  return out;
}

GateMatrix pauli_word_matrix(std::span<const Pauli> word) {
  GateMatrix out = GateMatrix::identity(1);
  for (Pauli p : word) out = kron(out, pauli_matrix(p));
  return out;
}

void apply_gate_inplace(StateVector& state, const GateMatrix& g, std::span<const int> targets) {
  check_targets(state.n_qubits(), targets);
  const std::size_t k = targets.size();
  if (k == 0 || g.dim() != (std::size_t{1} << k)) {
    fail(ErrorCode::DimensionMismatch, "gate of dimension " + std::to_string(g.dim()) +
                                           " on " + std::to_string(k) + " targets");
  }
  const std::vector<std::size_t> offsets = local_offsets(targets);
  std::vector<int> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t dim = g.dim();
  const std::size_t bases = state.size() >> k;
  std::vector<Complex> in(dim);
  auto amps = state.amplitudes();
  for (std::size_t compact = 0; compact < bases; ++compact) {
    // Spread the compact counter over the non-target bit positions.
    std::size_t base = compact;
    for (int t : sorted) {
      const std::size_t low = base & ((std::size_t{1} << t) - 1);
      base = ((base >> t) << (t + 1)) | low;
    }
    for (std::size_t j = 0; j < dim; ++j) in[j] = amps[base + offsets[j]];
    for (std::size_t r = 0; r < dim; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t c = 0; c < dim; ++c) acc += g(r, c) * in[c];
      amps[base + offsets[r]] = acc;
    }
  }
}

StateVector apply_gate(StateVector state, const GateMatrix& g, std::span<const int> targets) {
  apply_gate_inplace(state, g, targets);
  return state;
}

void apply_pauli_word_inplace(StateVector& state, std::span<const Pauli> word,
                              std::span<const int> wires) {
  if (word.size() != wires.size()) {
    fail(ErrorCode::DimensionMismatch, "Pauli word length differs from wire count");
  }
  check_targets(state.n_qubits(), wires);
  std::size_t flip = 0;
  std::size_t y_mask = 0;
  std::size_t z_mask = 0;
  int y_count = 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    const std::size_t bit = std::size_t{1} << wires[k];
    switch (word[k]) {
      case Pauli::I: break;
      case Pauli::X: flip |= bit; break;
      case Pauli::Y:
        flip |= bit;
        y_mask |= bit;
        ++y_count;
        break;
      case Pauli::Z: z_mask |= bit; break;
    }
  }
  // Y = i X Z, so P|x> = i^{#Y} (-1)^{popcount(x & (Y|Z))} |x ^ flip>.
  static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex global = kPowers[y_count % 4];
  const std::size_t sign_mask = y_mask | z_mask;
  auto amps = state.amplitudes();
  std::vector<Complex> out(amps.size());
  for (std::size_t x = 0; x < amps.size(); ++x) {
    const bool negative = std::popcount(x & sign_mask) & 1;
    out[x ^ flip] = negative ? -global * amps[x] : global * amps[x];
  }
  std::copy(out.begin(), out.end(), amps.begin());
}

void apply_pauli_rotation_inplace(StateVector& state, std::span<const Pauli> word,
                                  std::span<const int> wires, double theta) {
  StateVector rotated = state;
  apply_pauli_word_inplace(rotated, word, wires);
  const double c = std::cos(theta / 2.0);
  const Complex mis = -kI * std::sin(theta / 2.0);
  auto amps = state.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) amps[x] = c * amps[x] + mis * rotated[x];
}

double readout_prob_one(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    fail(ErrorCode::TargetOutOfRange, "readout qubit " + std::to_string(qubit));
  }
  const std::size_t mask = std::size_t{1} << qubit;
  double p = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (i & mask) p += std::norm(state[i]);
  return p;
}

GateMatrix expand_to_register(const GateMatrix& g, std::span<const int> targets, int n_qubits) {
  if (n_qubits > kDenseOracleMaxQubits) {
    fail(ErrorCode::TooManyQubits, "dense oracle limited to 10 qubits");
  }
  check_targets(n_qubits, targets);
  const std::size_t k = targets.size();
  if (g.dim() != (std::size_t{1} << k)) fail(ErrorCode::DimensionMismatch, "gate/targets");
  std::size_t target_mask = 0;
  for (int t : targets) target_mask |= std::size_t{1} << t;
  auto local = [&](std::size_t index) {
    std::size_t j = 0;
    for (int t : targets) j = (j << 1) | ((index >> t) & 1U);
    return j;
  };
  const std::size_t full = std::size_t{1} << n_qubits;
  GateMatrix out(full);
  // <row| I (x) g |col> vanishes unless row and col agree off the targets.
  for (std::size_t row = 0; row < full; ++row)
    for (std::size_t col = 0; col < full; ++col)
      if ((row & ~target_mask) == (col & ~target_mask)) out(row, col) = g(local(row), local(col));
  return out;
}

GateMatrix dense_circuit_oracle(std::span<const PlacedGate> gates, int n_qubits) {
  if (n_qubits > kDenseOracleMaxQubits) {
    fail(ErrorCode::TooManyQubits, "dense oracle limited to 10 qubits");
  }
  GateMatrix total = GateMatrix::identity(std::size_t{1} << n_qubits);
  for (const auto& placed : gates) total = expand_to_register(placed.matrix, placed.targets, n_qubits) * total;
  return total;
}

}  // namespace qcnnlab
