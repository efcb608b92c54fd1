#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qcnnlab {

/// Grayscale image, row-major, intensities nominally in [0, 1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {}
  Image(int h, int w, std::vector<double> values) : height(h), width(w), pixels(std::move(values)) {}

  double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::size_t size() const noexcept { return pixels.size(); }

  bool operator==(const Image&) const = default;
};

struct ImageSample {
  Image image;
  int label = 0;
};

struct Dataset {
  std::vector<ImageSample> samples;
  std::vector<std::string> class_names;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
};

}  // namespace qcnnlab
