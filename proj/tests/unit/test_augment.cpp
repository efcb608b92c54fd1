#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcnnlab/augment.hpp"
#include "test_helpers.hpp"

namespace qcnnlab {
namespace {

Image random_image(int h, int w, std::mt19937_64& rng) {
  return Image(h, w, testing::uniform_vector(static_cast<std::size_t>(h) * w, 0.0, 1.0, rng));
}

double mean(const Image& img) {
  double s = 0.0;
  for (double v : img.pixels) s += v;
  return s / static_cast<double>(img.size());
}

TEST(Flip, TwoByOne) {
  const Image img(1, 2, std::vector<double>{0.1, 0.9});
  EXPECT_EQ(flip_h(img).pixels, (std::vector<double>{0.9, 0.1}));
}

TEST(Flip, InvolutionAndSymmetricFixedPoint) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Image img = random_image(5, 7, rng);
    EXPECT_EQ(flip_h(flip_h(img)), img);
  }
  const Image sym(2, 3, std::vector<double>{0.1, 0.5, 0.1, 0.3, 0.2, 0.3});
  EXPECT_EQ(flip_h(sym), sym);
}

TEST(Rotate, ZeroAngleIsBitwiseIdentity) {
  std::mt19937_64 rng(2);
  const Image img = random_image(8, 8, rng);
  EXPECT_EQ(rotate(img, 0.0), img);
}

TEST(Rotate, CenterOfOddImageIsFixed) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-0.05, 0.05);
  for (int i = 0; i < 100; ++i) {
    const Image img = random_image(7, 9, rng);
    EXPECT_NEAR(rotate(img, angle(rng)).at(3, 4), img.at(3, 4), 1e-15);
  }
}

TEST(Rotate, MeanIntensityStable) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(-0.05, 0.05);
  for (int i = 0; i < 1000; ++i) {
    const Image img = random_image(8, 8, rng);
    const double before = mean(img);
    EXPECT_LT(std::abs(mean(rotate(img, angle(rng))) - before), 0.05 * before);
  }
}

TEST(Rotate, RejectsLargeAngle) {
  EXPECT_ERROR(rotate(Image(4, 4, 0.5), 0.051), ErrorCode::AngleOutOfBounds);
  EXPECT_ERROR(rotate(Image(4, 4, 0.5), -0.2), ErrorCode::AngleOutOfBounds);
  EXPECT_NO_THROW(rotate(Image(4, 4, 0.5), 0.2, 0.3));
}

TEST(Rotate, QuarterTurnOfOddImageMovesPixelsExactly) {
  Image img(3, 3, 0.0);
  img.at(0, 1) = 1.0;
  const Image out = rotate(img, std::numbers::pi / 2, 2.0);
  double total = 0.0;
  for (double v : out.pixels) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(out.at(1, 1), 0.0, 1e-12);
}

TEST(Contrast, Examples) {
  const Image pair(1, 2, std::vector<double>{0.2, 0.8});
  const Image out = contrast(pair, 0.9);
  EXPECT_NEAR(out.pixels[0], 0.23, 1e-15);
  EXPECT_NEAR(out.pixels[1], 0.77, 1e-15);
  const Image flat(3, 3, 0.4);
  EXPECT_EQ(contrast(flat, 1.1), flat);
  std::mt19937_64 rng(5);
  const Image img = random_image(6, 6, rng);
  const Image same = contrast(img, 1.0);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(same.pixels[i], img.pixels[i], 1e-15);
}

TEST(Contrast, ClampsAndRejectsOutOfRange) {
  const Image img(1, 2, std::vector<double>{0.0, 1.0});
  const Image out = contrast(img, 1.1);
  EXPECT_EQ(out.pixels, (std::vector<double>{0.0, 1.0}));
  EXPECT_ERROR(contrast(img, 1.2), ErrorCode::FactorOutOfBounds);
  EXPECT_ERROR(contrast(img, 0.85), ErrorCode::FactorOutOfBounds);
}

TEST(AugmentConfig, Validation) {
  AugmentConfig cfg;
  cfg.max_rotation = -0.1;
  EXPECT_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  cfg = AugmentConfig{};
  cfg.contrast_lo = 1.2;
  EXPECT_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  cfg = AugmentConfig{};
  cfg.contrast_lo = 0.0;
  EXPECT_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  EXPECT_NO_THROW(AugmentConfig::digits_recipe().validate());
}

TEST(AugmentConfig, Recipes) {
  const auto d = AugmentConfig::digits_recipe();
  EXPECT_TRUE(d.rotation && d.contrast && !d.flip_horizontal);
  const auto f = AugmentConfig::flip_rotate_recipe();
  EXPECT_TRUE(f.flip_horizontal && f.rotation && !f.contrast);
  EXPECT_FALSE(AugmentConfig::disabled().enabled());
}

TEST(AugmentSample, DisabledIsBitwiseIdentity) {
  std::mt19937_64 rng(6);
  const Image img = random_image(8, 8, rng);
  std::mt19937_64 stream(1);
  EXPECT_EQ(augment_sample(img, AugmentConfig::disabled(), stream), img);
}

TEST(AugmentSample, SeededStreamIsReproducible) {
  std::mt19937_64 rng(7);
  const Image img = random_image(8, 8, rng);
  AugmentConfig cfg = AugmentConfig::digits_recipe();
  cfg.flip_horizontal = true;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 a(seed), b(seed);
    EXPECT_EQ(augment_sample(img, cfg, a), augment_sample(img, cfg, b));
  }
}

TEST(AugmentSample, OutputsStayInRangeAndShape) {
  std::mt19937_64 rng(8);
  AugmentConfig cfg = AugmentConfig::digits_recipe();
  cfg.flip_horizontal = true;
  for (int i = 0; i < 500; ++i) {
    const Image img = random_image(8, 8, rng);
    const Image out = augment_sample(img, cfg, rng);
    ASSERT_EQ(out.height, 8);
    ASSERT_EQ(out.width, 8);
    for (double v : out.pixels) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(AugmentSample, FixedOrderFlipRotateContrast) {
  std::mt19937_64 rng(9);
  const Image img = random_image(8, 8, rng);
  AugmentConfig cfg = AugmentConfig::digits_recipe();
  cfg.flip_horizontal = true;
  std::mt19937_64 a(3), b(3);
  const AugmentDraw draw = draw_augmentation(cfg, a);
  Image manual = draw.flip ? flip_h(img) : img;
  manual = rotate(manual, draw.angle);
  manual = contrast(manual, draw.factor);
  EXPECT_EQ(augment_sample(img, cfg, b), manual);
}

TEST(AugmentSample, DrawBoundsOverTenThousandDraws) {
  AugmentConfig cfg = AugmentConfig::digits_recipe();
  cfg.flip_horizontal = true;
  std::mt19937_64 rng(10);
  double amin = 1, amax = -1, fmin = 2, fmax = 0;
  int flips = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const AugmentDraw d = draw_augmentation(cfg, rng);
    amin = std::min(amin, d.angle);
    amax = std::max(amax, d.angle);
    fmin = std::min(fmin, d.factor);
    fmax = std::max(fmax, d.factor);
    flips += d.flip;
  }
  EXPECT_GT(amin, -0.05);
  EXPECT_LT(amax, 0.05);
  EXPECT_GT(fmin, 0.9);
  EXPECT_LT(fmax, 1.1);
  EXPECT_LT(amin, -0.049);
  EXPECT_GT(amax, 0.049);
  EXPECT_NEAR(flips / static_cast<double>(draws), 0.5, 0.03);
}

}  // namespace
}  // namespace qcnnlab
