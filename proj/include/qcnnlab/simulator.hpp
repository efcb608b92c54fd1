#pragma once

// Dense state-vector simulation for small registers.
//
// Qubit convention: qubit q is bit q of the amplitude index, so qubit 0 is
// the least-significant bit. A gate acting on targets (t0, t1, ...) sees a
// local index whose most-significant bit is t0; a two-qubit gate applied on
// (control, target) therefore uses the textbook |control target> ordering.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qcnnlab {

using Complex = std::complex<double>;

/// Square complex matrix stored row-major. The dimension is any power of two;
/// gate constructors produce 2x2 and 4x4 matrices, the dense oracle 2^n x 2^n.
class GateMatrix {
 public:
  GateMatrix() = default;
  explicit GateMatrix(std::size_t dim);
  GateMatrix(std::size_t dim, std::vector<Complex> entries);

  static GateMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }
  std::span<const Complex> entries() const noexcept { return entries_; }

  GateMatrix adjoint() const;
  GateMatrix operator*(const GateMatrix& rhs) const;
  GateMatrix& operator*=(Complex scale);

  /// Largest entry of |U^dagger U - I|.
  double unitarity_error() const;
  bool is_unitary(double tol) const { return unitarity_error() <= tol; }

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

double max_abs_diff(const GateMatrix& a, const GateMatrix& b);

/// Smallest max-abs difference between a and e^{i phi} b over global phases.
double max_abs_diff_up_to_phase(const GateMatrix& a, const GateMatrix& b);

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits);

  static StateVector basis(int n_qubits, std::size_t index);
  /// Takes ownership of the amplitudes as given; the length must be 2^n.
  static StateVector from_amplitudes(std::vector<Complex> amps);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  std::span<Complex> amplitudes() noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm() const;

 private:
  StateVector(int n_qubits, std::vector<Complex> amps);

  int n_qubits_;
  std::vector<Complex> amps_;
};

Complex inner_product(const StateVector& bra, const StateVector& ket);

struct U3Params {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
};

struct Axis {
  double nx = 0.0;
  double ny = 0.0;
  double nz = 1.0;
};

enum class IsingKind { XX, YY, ZZ };

enum class Pauli { I, X, Y, Z };

struct FixedGates {
  GateMatrix x;
  GateMatrix y;
  GateMatrix z;
  GateMatrix h;
  GateMatrix cnot;
};

GateMatrix u3_matrix(const U3Params& p);

/// Partial derivatives of the U3 matrix with respect to theta, phi, lambda.
GateMatrix u3_derivative(const U3Params& p, int which);

/// exp(-i alpha/2 n.sigma) in closed form; throws AxisNotNormalized.
GateMatrix axis_rotation_matrix(double alpha, const Axis& axis);

/// exp(-i theta/2 P(x)P) for P in {X, Y, Z}.
GateMatrix ising_matrix(IsingKind kind, double theta);

const FixedGates& fixed_gates();

/// Block-diagonal [I, g]; the control is the first (most significant) target.
GateMatrix controlled(const GateMatrix& g);

/// Dense matrix of a Pauli word; word[0] acts on the first (most significant) target.
GateMatrix pauli_word_matrix(std::span<const Pauli> word);

/// Applies g to the target qubits in place. Checks targets and dimension but
/// not unitarity, so derivative matrices can be pushed through the same path.
void apply_gate_inplace(StateVector& state, const GateMatrix& g, std::span<const int> targets);

StateVector apply_gate(StateVector state, const GateMatrix& g, std::span<const int> targets);

inline StateVector apply_gate(StateVector state, const GateMatrix& g,
                              std::initializer_list<int> targets) {
  return apply_gate(std::move(state), g, std::span<const int>(targets.begin(), targets.size()));
}

/// state <- P state for a Pauli word on the given wires (word[k] acts on wires[k]).
void apply_pauli_word_inplace(StateVector& state, std::span<const Pauli> word,
                              std::span<const int> wires);

/// state <- exp(-i theta/2 P) state.
void apply_pauli_rotation_inplace(StateVector& state, std::span<const Pauli> word,
                                  std::span<const int> wires, double theta);

double readout_prob_one(const StateVector& state, int qubit);

/// One entry of a gate list for the dense oracle.
struct PlacedGate {
  GateMatrix matrix;
  std::vector<int> targets;
};

inline constexpr int kDenseOracleMaxQubits = 10;

/// Expands every gate to the full register and multiplies them in order
/// (later gates on the left). Test-scale only: throws TooManyQubits above 10.
GateMatrix dense_circuit_oracle(std::span<const PlacedGate> gates, int n_qubits);

/// Full-register matrix of a single gate on the given targets.
GateMatrix expand_to_register(const GateMatrix& g, std::span<const int> targets, int n_qubits);

}  // namespace qcnnlab
