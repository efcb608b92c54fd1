#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "qcnnlab/image.hpp"

namespace qcnnlab {

/// Rows of `label,v0,...,v63` with label 0..9 and values 0..16; pixels are v/16
/// on an 8x8 grid. Throws Malformed naming the offending line.
Dataset load_digits_csv(const std::filesystem::path& path);
void save_digits_csv(const std::filesystem::path& path, const Dataset& ds);

/// Big-endian IDX pair: images (magic 2051, count, rows, cols, bytes) and
/// labels (magic 2049, count, bytes). Pixels are byte/255.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Binary "P5" greymap with maxval 255.
Image load_pgm(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const Image& img);

/// Every *.pgm in `dir` (sorted by name); the label comes from the longest
/// class_map key that prefixes the file name.
Dataset load_pgm_dir(const std::filesystem::path& dir, const std::map<std::string, int>& class_map);

/// Block-average down to out_h x out_w; throws NonIntegerFactor unless the
/// output size divides the input size.
Image resize_area(const Image& img, int out_h, int out_w);

struct Split {
  Dataset train;
  Dataset test;
};

/// Seeded sampling without replacement: n_per_class of each class for
/// training, n_test (balanced, class_a gets the odd one) for testing, drawn
/// from the remaining samples. Labels become class_a -> 0, class_b -> 1.
Split binary_subset(const Dataset& ds, int class_a, int class_b, int n_per_class, int n_test,
                    std::uint64_t seed);

}  // namespace qcnnlab
