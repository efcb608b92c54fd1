#pragma once

#include <random>

#include "qcnnlab/image.hpp"

namespace qcnnlab {

struct AugmentConfig {
  bool flip_horizontal = false;
  bool rotation = false;
  bool contrast = false;
  double flip_probability = 0.5;
  double max_rotation = 0.05;  // radians
  double contrast_lo = 0.9;
  double contrast_hi = 1.1;

  bool enabled() const { return flip_horizontal || rotation || contrast; }

  static AugmentConfig disabled() { return {}; }
  /// Hand-written digits: rotation and contrast.
  static AugmentConfig digits_recipe();
  /// Fashion-MNIST and cat/dog: flip and rotation.
  static AugmentConfig flip_rotate_recipe();

  /// Throws InvalidConfig on negative rotation or bad contrast bounds.
  void validate() const;
};

/// The random draws of one augmentation, kept separate from applying them so
/// the distributions can be inspected.
struct AugmentDraw {
  bool flip = false;
  double angle = 0.0;
  double factor = 1.0;
};

Image flip_h(const Image& img);

/// Rotation about the image center, bilinear, zero fill, clamped to [0, 1].
/// Throws AngleOutOfBounds if |angle| > max_rotation.
Image rotate(const Image& img, double angle, double max_rotation = 0.05);

/// mean + factor * (img - mean), clamped to [0, 1].
/// Throws FactorOutOfBounds if factor is outside [lo, hi].
Image contrast(const Image& img, double factor, double lo = 0.9, double hi = 1.1);

AugmentDraw draw_augmentation(const AugmentConfig& cfg, std::mt19937_64& rng);
Image apply_augmentation(const Image& img, const AugmentConfig& cfg, const AugmentDraw& draw);

/// Flip, then rotate, then contrast; each only if enabled.
Image augment_sample(const Image& img, const AugmentConfig& cfg, std::mt19937_64& rng);

}  // namespace qcnnlab
