#include "qcnnlab/embedding.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qcnnlab/error.hpp"

namespace qcnnlab {

StateVector amplitude_embed(std::span<const double> pixels, int n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    fail(ErrorCode::RegisterTooSmall, "register of " + std::to_string(n_qubits) + " qubits");
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (pixels.size() > dim) {
    fail(ErrorCode::RegisterTooSmall, std::to_string(pixels.size()) + " pixels do not fit in " +
                                          std::to_string(n_qubits) + " qubits");
  }
  double sum = 0.0;
  for (double v : pixels) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "pixel is not finite");
    sum += v * v;
  }
  if (sum == 0.0) fail(ErrorCode::AllZeroImage, "cannot normalize an all-zero image");
  const double norm = std::sqrt(sum);
  std::vector<Complex> amps(dim, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < pixels.size(); ++i) amps[i] = pixels[i] / norm;
  return StateVector::from_amplitudes(std::move(amps));
}

int qubits_for(std::size_t pixel_count) {
  int n = 1;
  while ((std::size_t{1} << n) < pixel_count) ++n;
  return n;
}

StateVector qubit_embed(double x) {
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::OutOfRange, "qubit_embed expects x in [0, 1]");
  const double angle = std::numbers::pi * x;
  return StateVector::from_amplitudes({std::cos(angle / 2.0), std::sin(angle / 2.0)});
}

}  // namespace qcnnlab
