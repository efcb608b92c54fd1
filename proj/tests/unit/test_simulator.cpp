#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcnnlab/simulator.hpp"
#include "test_helpers.hpp"

namespace qcnnlab {
namespace {

using testing::expm_taylor;
using testing::kron;
using testing::pauli_literal;
using testing::random_state;
using testing::random_unitary;

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

double max_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

TEST(U3, ZeroAnglesIsIdentity) {
  EXPECT_LT(max_abs_diff(u3_matrix({0, 0, 0}), GateMatrix::identity(2)), 1e-15);
}

TEST(U3, PiZeroPiIsPauliX) {
  EXPECT_LT(max_abs_diff(u3_matrix({kPi, 0, kPi}), pauli_literal(Pauli::X)), 1e-15);
}

TEST(U3, MatchesClosedFormEntries) {
  const double t = 0.7, p = -1.3, l = 2.1;
  const GateMatrix u = u3_matrix({t, p, l});
  EXPECT_LT(std::abs(u(0, 0) - std::cos(t / 2)), 1e-15);
  EXPECT_LT(std::abs(u(0, 1) + std::exp(kI * l) * std::sin(t / 2)), 1e-15);
  EXPECT_LT(std::abs(u(1, 0) - std::exp(kI * p) * std::sin(t / 2)), 1e-15);
  EXPECT_LT(std::abs(u(1, 1) - std::exp(kI * (p + l)) * std::cos(t / 2)), 1e-15);
}

TEST(U3, DerivativeMatchesFiniteDifference) {
  const U3Params p{0.4, 1.1, -0.6};
  for (int which = 0; which < 3; ++which) {
    U3Params up = p, down = p;
    const double h = 1e-6;
    (which == 0 ? up.theta : which == 1 ? up.phi : up.lambda) += h;
    (which == 0 ? down.theta : which == 1 ? down.phi : down.lambda) -= h;
    const GateMatrix a = u3_matrix(up), b = u3_matrix(down), d = u3_derivative(p, which);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        EXPECT_NEAR(std::abs((a(r, c) - b(r, c)) / (2 * h) - d(r, c)), 0.0, 1e-8);
  }
}

TEST(GateAlgebra, ConstructorsAreUnitaryOverRandomDraws) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-20.0, 20.0);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const U3Params p = testing::random_u3(rng);
    EXPECT_LE(u3_matrix(p).unitarity_error(), 1e-10);
    EXPECT_LE(controlled(u3_matrix(p)).unitarity_error(), 1e-10);
    for (auto kind : {IsingKind::XX, IsingKind::YY, IsingKind::ZZ})
      EXPECT_LE(ising_matrix(kind, angle(rng)).unitarity_error(), 1e-10);
    double x = g(rng), y = g(rng), z = g(rng);
    const double n = std::sqrt(x * x + y * y + z * z);
    EXPECT_LE(axis_rotation_matrix(angle(rng), {x / n, y / n, z / n}).unitarity_error(), 1e-10);
  }
}

TEST(AxisRotation, ZeroAngleIsIdentity) {
  EXPECT_LT(max_abs_diff(axis_rotation_matrix(0.0, {0.6, 0.0, 0.8}), GateMatrix::identity(2)),
            1e-15);
}

TEST(AxisRotation, PiAboutZ) {
  const GateMatrix expected(2, {-kI, 0.0, 0.0, kI});
  EXPECT_LT(max_abs_diff(axis_rotation_matrix(kPi, {0, 0, 1}), expected), 1e-15);
}

TEST(AxisRotation, AboutZEqualsU3PhaseGateUpToGlobalPhase) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 50; ++i) {
    const double a = angle(rng);
    EXPECT_LT(max_abs_diff_up_to_phase(axis_rotation_matrix(a, {0, 0, 1}), u3_matrix({0, 0, a})),
              1e-12);
  }
}

TEST(AxisRotation, MatchesMatrixExponential) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(-6.0, 6.0);
  for (int i = 0; i < 20; ++i) {
    const double a = angle(rng);
    const Axis n{2.0 / 7, 3.0 / 7, 6.0 / 7};
    GateMatrix gen(2);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        gen(r, c) = Complex(0, -a / 2) * (n.nx * pauli_literal(Pauli::X)(r, c) +
                                          n.ny * pauli_literal(Pauli::Y)(r, c) +
                                          n.nz * pauli_literal(Pauli::Z)(r, c));
    EXPECT_LT(max_abs_diff(axis_rotation_matrix(a, n), expm_taylor(gen)), 1e-12);
  }
}

TEST(AxisRotation, RejectsUnnormalizedAxis) {
  EXPECT_ERROR(axis_rotation_matrix(1.0, {1.0, 1.0, 0.0}), ErrorCode::AxisNotNormalized);
  EXPECT_ERROR(axis_rotation_matrix(1.0, {0.0, 0.0, 1.0 + 1e-8}), ErrorCode::AxisNotNormalized);
}

TEST(Ising, ZZClosedForm) {
  const double t = 0.83;
  const Complex m = std::exp(-kI * (t / 2)), p = std::exp(kI * (t / 2));
  GateMatrix expected(4);
  expected(0, 0) = m;
  expected(1, 1) = p;
  expected(2, 2) = p;
  expected(3, 3) = m;
  EXPECT_LT(max_abs_diff(ising_matrix(IsingKind::ZZ, t), expected), 1e-15);
}

TEST(Ising, XXAtZeroIsIdentity) {
  EXPECT_LT(max_abs_diff(ising_matrix(IsingKind::XX, 0.0), GateMatrix::identity(4)), 1e-15);
}

TEST(Ising, MatchesSeriesExponential) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-7.0, 7.0);
  const std::pair<IsingKind, Pauli> kinds[] = {
      {IsingKind::XX, Pauli::X}, {IsingKind::YY, Pauli::Y}, {IsingKind::ZZ, Pauli::Z}};
  for (int i = 0; i < 20; ++i) {
    const double t = angle(rng);
    for (const auto& [kind, p] : kinds) {
      GateMatrix gen = kron(pauli_literal(p), pauli_literal(p));
      gen *= Complex(0, -t / 2);
      EXPECT_LT(max_abs_diff(ising_matrix(kind, t), expm_taylor(gen)), 1e-12);
    }
  }
}

TEST(FixedGates, StandardActions) {
  const auto& f = fixed_gates();
  EXPECT_EQ(apply_gate(StateVector(1), f.x, {0})[1], Complex(1.0));
  EXPECT_LT(max_abs_diff(f.h * f.h, GateMatrix::identity(2)), 1e-15);
  // |10> with qubit 1 as control: basis index 2 -> index 3.
  const StateVector out = apply_gate(StateVector::basis(2, 2), f.cnot, {1, 0});
  EXPECT_EQ(out[3], Complex(1.0));
  EXPECT_LT(max_abs_diff(f.y, pauli_literal(Pauli::Y)), 1e-15);
  EXPECT_LT(max_abs_diff(f.z, pauli_literal(Pauli::Z)), 1e-15);
}

TEST(Controlled, OfXIsCnot) {
  EXPECT_LT(max_abs_diff(controlled(fixed_gates().x), fixed_gates().cnot), 1e-15);
}

TEST(Controlled, OfIdentityIsIdentity) {
  EXPECT_LT(max_abs_diff(controlled(GateMatrix::identity(2)), GateMatrix::identity(4)), 1e-15);
}

TEST(Controlled, RejectsNonUnitary) {
  EXPECT_ERROR(controlled(GateMatrix(2, {1.0, 1.0, 0.0, 1.0})), ErrorCode::NotUnitary);
  EXPECT_ERROR(controlled(GateMatrix::identity(4)), ErrorCode::DimensionMismatch);
}

TEST(Controlled, ControlZeroLeavesTargetMarginal) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    const StateVector target = random_state(1, rng);
    // Control is qubit 1 in |0>, target is qubit 0.
    const StateVector before = StateVector::from_amplitudes({target[0], target[1], 0.0, 0.0});
    const StateVector after =
        apply_gate(before, controlled(u3_matrix(testing::random_u3(rng))), {1, 0});
    EXPECT_LT(max_diff(before.amplitudes(), after.amplitudes()), 1e-15);
    // With control |1> the target picks up the U3.
    const U3Params p = testing::random_u3(rng);
    const StateVector on = StateVector::from_amplitudes({0.0, 0.0, target[0], target[1]});
    const StateVector rotated = apply_gate(on, controlled(u3_matrix(p)), {1, 0});
    const StateVector direct = apply_gate(target, u3_matrix(p), {0});
    EXPECT_LT(std::abs(rotated[2] - direct[0]) + std::abs(rotated[3] - direct[1]), 1e-14);
  }
}

TEST(ApplyGate, XOnQubitZero) {
  const StateVector out = apply_gate(StateVector(2), fixed_gates().x, {0});
  EXPECT_EQ(out[1], Complex(1.0));
  EXPECT_EQ(out[0], Complex(0.0));
}

TEST(ApplyGate, IdentityLeavesStateBitwiseUnchanged) {
  std::mt19937_64 rng(3);
  const StateVector s = random_state(3, rng);
  const StateVector out = apply_gate(s, GateMatrix::identity(4), {2, 0});
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(out[i], s[i]);
}

TEST(ApplyGate, TwoQubitGateMatchesKroneckerExpansion) {
  std::mt19937_64 rng(29);
  const StateVector s = random_state(4, rng);
  const GateMatrix u = random_unitary(4, rng);
  // Gate on (3, 2): qubits 3 and 2 are the two most significant bits.
  const GateMatrix full = kron(u, GateMatrix::identity(4));
  const auto expected = testing::mat_vec(full, s.amplitudes());
  const StateVector out = apply_gate(s, u, {3, 2});
  EXPECT_LT(max_diff(expected, out.amplitudes()), 1e-12);
}

TEST(ApplyGate, ErrorPaths) {
  const StateVector s(3);
  EXPECT_ERROR(apply_gate(s, fixed_gates().x, {3}), ErrorCode::TargetOutOfRange);
  EXPECT_ERROR(apply_gate(s, fixed_gates().x, {-1}), ErrorCode::TargetOutOfRange);
  EXPECT_ERROR(apply_gate(s, fixed_gates().cnot, {1, 1}), ErrorCode::DuplicateTarget);
  EXPECT_ERROR(apply_gate(s, fixed_gates().cnot, {1}), ErrorCode::DimensionMismatch);
}

TEST(ApplyGate, PreservesNorm) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    StateVector s = random_state(5, rng);
    apply_gate_inplace(s, random_unitary(4, rng), std::vector<int>{i % 5, (i + 2) % 5});
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  }
}

TEST(ApplyGate, DisjointTargetsCommute) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 50; ++i) {
    const StateVector s = random_state(3, rng);
    const GateMatrix g1 = random_unitary(2, rng), g2 = random_unitary(2, rng);
    const StateVector a = apply_gate(apply_gate(s, g1, {0}), g2, {2});
    const StateVector b = apply_gate(apply_gate(s, g2, {2}), g1, {0});
    EXPECT_LT(max_diff(a.amplitudes(), b.amplitudes()), 1e-12);
  }
}

TEST(ApplyGate, AgreesWithDenseOracleOnRandomCircuits) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> qubits(1, 6), count(0, 8), arity(1, 2);
  for (int c = 0; c < 200; ++c) {
    const int n = qubits(rng);
    std::uniform_int_distribution<int> wire(0, n - 1);
    std::vector<PlacedGate> gates;
    StateVector s = random_state(n, rng);
    const StateVector start = s;
    const int m = count(rng);
    for (int g = 0; g < m; ++g) {
      PlacedGate pg;
      if (n >= 2 && arity(rng) == 2) {
        const int a = wire(rng);
        int b = wire(rng);
        while (b == a) b = wire(rng);
        pg = {random_unitary(4, rng), {a, b}};
      } else {
        pg = {random_unitary(2, rng), {wire(rng)}};
      }
      apply_gate_inplace(s, pg.matrix, pg.targets);
      gates.push_back(std::move(pg));
    }
    const auto expected = testing::mat_vec(dense_circuit_oracle(gates, n), start.amplitudes());
    EXPECT_LT(max_diff(expected, s.amplitudes()), 1e-10);
  }
}

TEST(DenseOracle, SingleXOnQubitZeroIsIdentityKronX) {
  const std::vector<PlacedGate> gates = {{fixed_gates().x, {0}}};
  EXPECT_LT(max_abs_diff(dense_circuit_oracle(gates, 2),
                         kron(GateMatrix::identity(2), pauli_literal(Pauli::X))),
            1e-15);
}

TEST(DenseOracle, EmptyListIsIdentity) {
  EXPECT_LT(max_abs_diff(dense_circuit_oracle({}, 3), GateMatrix::identity(8)), 1e-15);
}

TEST(DenseOracle, RejectsLargeRegisters) {
  EXPECT_ERROR(dense_circuit_oracle({}, 11), ErrorCode::TooManyQubits);
}

TEST(Readout, BasisAndHadamard) {
  EXPECT_EQ(readout_prob_one(StateVector(3), 2), 0.0);
  EXPECT_NEAR(readout_prob_one(apply_gate(StateVector(1), fixed_gates().h, {0}), 0), 0.5, 1e-15);
  EXPECT_ERROR(readout_prob_one(StateVector(2), 2), ErrorCode::TargetOutOfRange);
}

TEST(Readout, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const StateVector s = random_state(4, rng);
    for (int q = 0; q < 4; ++q) {
      double p0 = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k)
        if (!((k >> q) & 1U)) p0 += std::norm(s[k]);
      const double p1 = readout_prob_one(s, q);
      EXPECT_GE(p1, 0.0);
      EXPECT_LE(p1, 1.0 + 1e-12);
      EXPECT_NEAR(p0 + p1, 1.0, 1e-12);
    }
  }
}

TEST(PauliWord, RotationMatchesDenseExponential) {
  std::mt19937_64 rng(47);
  const std::vector<Pauli> word = {Pauli::Y, Pauli::Z, Pauli::X};
  const std::vector<int> wires = {0, 2, 3};
  for (int i = 0; i < 10; ++i) {
    StateVector s = random_state(4, rng);
    const StateVector start = s;
    const double t = std::uniform_real_distribution<double>(-5, 5)(rng);
    apply_pauli_rotation_inplace(s, word, wires, t);
    GateMatrix gen = kron(kron(pauli_literal(word[0]), pauli_literal(word[1])), pauli_literal(word[2]));
    gen *= Complex(0, -t / 2);
    const StateVector expected = apply_gate(start, expm_taylor(gen), wires);
    EXPECT_LT(max_diff(expected.amplitudes(), s.amplitudes()), 1e-12);
  }
}

TEST(PauliWord, MatrixIsKroneckerOfLetters) {
  const std::vector<Pauli> word = {Pauli::X, Pauli::Y};
  EXPECT_LT(max_abs_diff(pauli_word_matrix(word), kron(pauli_literal(Pauli::X), pauli_literal(Pauli::Y))),
            1e-15);
}

TEST(StateVector, FromAmplitudesRejectsNonPowerOfTwo) {
  EXPECT_ERROR(StateVector::from_amplitudes({1.0, 0.0, 0.0}), ErrorCode::DimensionMismatch);
}

}  // namespace
}  // namespace qcnnlab
