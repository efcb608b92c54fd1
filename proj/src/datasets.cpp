#include "qcnnlab/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <vector>

#include "qcnnlab/error.hpp"

namespace qcnnlab {

namespace {

constexpr int kDigitsSide = 8;
constexpr int kDigitsMax = 16;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open " + path.string());
  return in;
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) fail(ErrorCode::TruncatedFile, path.string() + ": short header");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<std::string> digit_class_names() {
  std::vector<std::string> names;
  for (int d = 0; d < 10; ++d) names.push_back(std::to_string(d));
  return names;
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

int pgm_int(std::istream& in, const std::filesystem::path& path) {
  const std::string token = pgm_token(in);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value <= 0) {
    fail(ErrorCode::UnsupportedPgm, path.string() + ": bad header field '" + token + "'");
  }
  return value;
}

}  // namespace

Dataset load_digits_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  Dataset ds;
  ds.class_names = digit_class_names();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto malformed = [&](const std::string& why) {
      fail(ErrorCode::Malformed, path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    std::vector<int> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = std::min(line.find(',', start), line.size());
      int v = 0;
      const char* first = line.data() + start;
      const char* last = line.data() + comma;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last) malformed("field " + std::to_string(fields.size()) + " is not an integer");
      fields.push_back(v);
      start = comma + 1;
    }
    if (fields.size() != 1 + kDigitsSide * kDigitsSide) {
      malformed("expected 65 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0] < 0 || fields[0] > 9) malformed("label out of range 0..9");
    ImageSample sample{Image(kDigitsSide, kDigitsSide), fields[0]};
    for (int i = 0; i < kDigitsSide * kDigitsSide; ++i) {
      const int v = fields[1 + i];
      if (v < 0 || v > kDigitsMax) malformed("pixel value " + std::to_string(v) + " outside 0..16");
      sample.image.pixels[i] = v / static_cast<double>(kDigitsMax);
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

void save_digits_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FileNotFound, "cannot write " + path.string());
  for (const auto& s : ds.samples) {
    if (s.image.size() != kDigitsSide * kDigitsSide) {
      fail(ErrorCode::ShapeMismatch, "digits CSV holds 8x8 images only");
    }
    out << s.label;
    for (double v : s.image.pixels) out << ',' << std::lround(v * kDigitsMax);
    out << '\n';
  }
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const auto images = read_all(images_path);
  const auto labels = read_all(labels_path);
  if (read_be32(images, 0, images_path) != 0x00000803U) {
    fail(ErrorCode::BadMagic, images_path.string() + ": not an IDX image file");
  }
  if (read_be32(labels, 0, labels_path) != 0x00000801U) {
    fail(ErrorCode::BadMagic, labels_path.string() + ": not an IDX label file");
  }
  const std::uint32_t count = read_be32(images, 4, images_path);
  const std::uint32_t rows = read_be32(images, 8, images_path);
  const std::uint32_t cols = read_be32(images, 12, images_path);
  const std::uint32_t label_count = read_be32(labels, 4, labels_path);
  if (count != label_count) {
    fail(ErrorCode::CountMismatch, std::to_string(count) + " images but " +
                                       std::to_string(label_count) + " labels");
  }
  const std::size_t pixels_per = static_cast<std::size_t>(rows) * cols;
  if (images.size() < 16 + pixels_per * count) {
    fail(ErrorCode::TruncatedFile, images_path.string() + ": pixel data ends early");
  }
  if (labels.size() < 8 + std::size_t{count}) {
    fail(ErrorCode::TruncatedFile, labels_path.string() + ": label data ends early");
  }
  Dataset ds;
  int max_label = 0;
  ds.samples.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ImageSample sample{Image(static_cast<int>(rows), static_cast<int>(cols)), labels[8 + i]};
    const std::size_t base = 16 + i * pixels_per;
    for (std::size_t p = 0; p < pixels_per; ++p) sample.image.pixels[p] = images[base + p] / 255.0;
    max_label = std::max(max_label, sample.label);
    ds.samples.push_back(std::move(sample));
  }
  for (int c = 0; c <= max_label; ++c) ds.class_names.push_back(std::to_string(c));
  return ds;
}

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  const std::string magic = pgm_token(in);
  if (magic != "P5") {
    fail(ErrorCode::UnsupportedPgm, path.string() + ": magic '" + magic + "', expected P5");
  }
  const int width = pgm_int(in, path);
  const int height = pgm_int(in, path);
  const int maxval = pgm_int(in, path);
  if (maxval != 255) {
    fail(ErrorCode::UnsupportedPgm, path.string() + ": maxval " + std::to_string(maxval));
  }
  // pgm_token consumed exactly one whitespace byte after maxval.
  Image img(height, width);
  std::vector<char> raw(img.size());
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    fail(ErrorCode::TruncatedFile, path.string() + ": pixel data ends early");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    img.pixels[i] = static_cast<unsigned char>(raw[i]) / 255.0;
  }
  return img;
}

void save_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::FileNotFound, "cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<char> raw(img.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<char>(std::lround(std::clamp(img.pixels[i], 0.0, 1.0) * 255.0));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

Dataset load_pgm_dir(const std::filesystem::path& dir, const std::map<std::string, int>& class_map) {
  if (!std::filesystem::is_directory(dir)) {
    fail(ErrorCode::FileNotFound, "no such directory " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Dataset ds;
  int max_label = 0;
  for (const auto& [prefix, label] : class_map) {
    if (label < 0 || prefix.empty()) {
      fail(ErrorCode::InvalidConfig, "class map entries need a prefix and a label >= 0");
    }
    max_label = std::max(max_label, label);
  }
  ds.class_names.assign(static_cast<std::size_t>(max_label) + 1, "");
  for (const auto& [prefix, label] : class_map) ds.class_names[label] = prefix;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    const std::string* best = nullptr;
    int label = -1;
    for (const auto& [prefix, cls] : class_map) {
      if (name.starts_with(prefix) && (best == nullptr || prefix.size() > best->size())) {
        best = &prefix;
        label = cls;
      }
    }
    if (best == nullptr) fail(ErrorCode::UnknownClassPrefix, name + " matches no class prefix");
    ds.samples.push_back({load_pgm(file), label});
  }
  return ds;
}

Image resize_area(const Image& img, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0 || img.height % out_h != 0 || img.width % out_w != 0) {
    fail(ErrorCode::NonIntegerFactor, std::to_string(img.height) + "x" + std::to_string(img.width) +
                                          " does not reduce to " + std::to_string(out_h) + "x" +
                                          std::to_string(out_w));
  }
  const int fy = img.height / out_h;
  const int fx = img.width / out_w;
  Image out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    for (int c = 0; c < out_w; ++c) {
      double sum = 0.0;
      for (int dy = 0; dy < fy; ++dy)
        for (int dx = 0; dx < fx; ++dx) sum += img.at(r * fy + dy, c * fx + dx);
      out.at(r, c) = sum / (fy * fx);
    }
  }
  return out;
}

Split binary_subset(const Dataset& ds, int class_a, int class_b, int n_per_class, int n_test,
                    std::uint64_t seed) {
  if (n_per_class < 1 || n_test < 0) {
    fail(ErrorCode::InvalidConfig, "n_per_class must be >= 1 and n_test >= 0");
  }
  if (class_a == class_b) fail(ErrorCode::InvalidConfig, "class_a and class_b must differ");
  std::vector<std::size_t> idx_a;
  std::vector<std::size_t> idx_b;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    if (ds.samples[i].label == class_a) idx_a.push_back(i);
    if (ds.samples[i].label == class_b) idx_b.push_back(i);
  }
  const int test_a = (n_test + 1) / 2;
  const int test_b = n_test / 2;
  auto check = [&](const std::vector<std::size_t>& idx, int cls, int need) {
    if (static_cast<int>(idx.size()) < need) {
      fail(ErrorCode::InsufficientSamples, "class " + std::to_string(cls) + " has " +
                                               std::to_string(idx.size()) + " samples, need " +
                                               std::to_string(need));
    }
  };
  check(idx_a, class_a, n_per_class + test_a);
  check(idx_b, class_b, n_per_class + test_b);

  std::mt19937_64 rng(seed);
  std::shuffle(idx_a.begin(), idx_a.end(), rng);
  std::shuffle(idx_b.begin(), idx_b.end(), rng);

  Split split;
  auto name = [&](int cls) {
    return cls >= 0 && cls < static_cast<int>(ds.class_names.size()) ? ds.class_names[cls]
                                                                      : std::to_string(cls);
  };
  split.train.class_names = split.test.class_names = {name(class_a), name(class_b)};
  auto take = [&](Dataset& into, const std::vector<std::size_t>& idx, int from, int count, int label) {
    for (int k = from; k < from + count; ++k) into.samples.push_back({ds.samples[idx[k]].image, label});
  };
  // Interleave classes so sample order carries no class blocks.
  for (int k = 0; k < n_per_class; ++k) {
    take(split.train, idx_a, k, 1, 0);
    take(split.train, idx_b, k, 1, 1);
  }
  for (int k = 0; k < std::max(test_a, test_b); ++k) {
    if (k < test_a) take(split.test, idx_a, n_per_class + k, 1, 0);
    if (k < test_b) take(split.test, idx_b, n_per_class + k, 1, 1);
  }
  return split;
}

}  // namespace qcnnlab
