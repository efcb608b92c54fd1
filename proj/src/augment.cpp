#include "qcnnlab/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcnnlab/error.hpp"

namespace qcnnlab {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double sample_or_zero(const Image& img, int row, int col) {
  if (row < 0 || row >= img.height || col < 0 || col >= img.width) return 0.0;
  return img.at(row, col);
}

}  // namespace

AugmentConfig AugmentConfig::digits_recipe() {
  AugmentConfig cfg;
  cfg.rotation = true;
  cfg.contrast = true;
  return cfg;
}

AugmentConfig AugmentConfig::flip_rotate_recipe() {
  AugmentConfig cfg;
  cfg.flip_horizontal = true;
  cfg.rotation = true;
  return cfg;
}

void AugmentConfig::validate() const {
  if (!(max_rotation >= 0.0)) fail(ErrorCode::InvalidConfig, "max_rotation must be >= 0");
  if (!(contrast_lo > 0.0 && contrast_lo <= contrast_hi)) {
    fail(ErrorCode::InvalidConfig, "contrast bounds must satisfy 0 < lo <= hi");
  }
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    fail(ErrorCode::InvalidConfig, "flip probability must be in [0, 1]");
  }
}

Image flip_h(const Image& img) {
  Image out(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) out.at(r, c) = img.at(r, img.width - 1 - c);
  return out;
}

Image rotate(const Image& img, double angle, double max_rotation) {
  if (!(std::abs(angle) <= max_rotation)) {
    fail(ErrorCode::AngleOutOfBounds, "rotation " + std::to_string(angle) + " exceeds " +
                                          std::to_string(max_rotation));
  }
  const double cy = (img.height - 1) / 2.0;
  const double cx = (img.width - 1) / 2.0;
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  Image out(img.height, img.width);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      // Inverse map: where in the source does this output pixel come from.
      const double dx = c - cx;
      const double dy = r - cy;
      const double sx = cx + cs * dx + sn * dy;
      const double sy = cy - sn * dx + cs * dy;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double fx = sx - fx0;
      const double fy = sy - fy0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double v = (1.0 - fx) * (1.0 - fy) * sample_or_zero(img, y0, x0) +
                       fx * (1.0 - fy) * sample_or_zero(img, y0, x0 + 1) +
                       (1.0 - fx) * fy * sample_or_zero(img, y0 + 1, x0) +
                       fx * fy * sample_or_zero(img, y0 + 1, x0 + 1);
      out.at(r, c) = clamp01(v);
    }
  }
  return out;
}

Image contrast(const Image& img, double factor, double lo, double hi) {
  if (!(factor >= lo && factor <= hi)) {
    fail(ErrorCode::FactorOutOfBounds, "contrast factor " + std::to_string(factor) +
                                           " outside [" + std::to_string(lo) + ", " +
                                           std::to_string(hi) + "]");
  }
  double mean = 0.0;
  for (double v : img.pixels) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(img.size(), 1));
  Image out = img;
  for (double& v : out.pixels) v = clamp01(mean + factor * (v - mean));
  return out;
}

AugmentDraw draw_augmentation(const AugmentConfig& cfg, std::mt19937_64& rng) {
  AugmentDraw draw;
  if (cfg.flip_horizontal) draw.flip = std::bernoulli_distribution(cfg.flip_probability)(rng);
  if (cfg.rotation) {
    draw.angle = std::uniform_real_distribution<double>(-cfg.max_rotation, cfg.max_rotation)(rng);
  }
  if (cfg.contrast) {
    draw.factor = std::uniform_real_distribution<double>(cfg.contrast_lo, cfg.contrast_hi)(rng);
  }
  return draw;
}

Image apply_augmentation(const Image& img, const AugmentConfig& cfg, const AugmentDraw& draw) {
  Image out = img;
  if (cfg.flip_horizontal && draw.flip) out = flip_h(out);
  if (cfg.rotation) out = rotate(out, draw.angle, cfg.max_rotation);
  if (cfg.contrast) out = contrast(out, draw.factor, cfg.contrast_lo, cfg.contrast_hi);
  return out;
}

Image augment_sample(const Image& img, const AugmentConfig& cfg, std::mt19937_64& rng) {
  if (!cfg.enabled()) return img;
  return apply_augmentation(img, cfg, draw_augmentation(cfg, rng));
}

}  // namespace qcnnlab
