#pragma once

#include <span>

#include "qcnnlab/simulator.hpp"

namespace qcnnlab {

/// Normalized pixel values as amplitudes of an n-qubit register. Pixel i lands
/// on basis state i; basis states beyond the pixel count are zero.
/// Throws AllZeroImage, RegisterTooSmall, NonFiniteValue.
StateVector amplitude_embed(std::span<const double> pixels, int n_qubits);

/// Smallest register (at least one qubit) that holds `pixel_count` amplitudes.
int qubits_for(std::size_t pixel_count);

/// cos(pi x / 2)|0> + sin(pi x / 2)|1> for x in [0, 1]. Not used by the QCNN
/// pipeline, which embeds by amplitude.
StateVector qubit_embed(double x);

}  // namespace qcnnlab
