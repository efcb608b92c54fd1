#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include <unistd.h>

#include "qcnnlab/datasets.hpp"
#include "test_helpers.hpp"

namespace qcnnlab {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("qcnnlab_ds_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string digits_row(int label, int fill, int count = 64) {
  std::string row = std::to_string(label);
  for (int i = 0; i < count; ++i) row += "," + std::to_string(fill);
  return row + "\n";
}

TEST(DigitsCsv, ZeroRowAndFullScale) {
  TempDir dir;
  write_text(dir / "d.csv", digits_row(0, 0) + digits_row(3, 16));
  const Dataset ds = load_digits_csv(dir / "d.csv");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.samples[0].label, 0);
  EXPECT_EQ(ds.samples[0].image.height, 8);
  for (double v : ds.samples[0].image.pixels) EXPECT_EQ(v, 0.0);
  for (double v : ds.samples[1].image.pixels) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(ds.class_names.size(), 10u);
}

TEST(DigitsCsv, MalformedRowsNameTheLine) {
  TempDir dir;
  write_text(dir / "a.csv", digits_row(0, 1) + digits_row(0, 17));
  try {
    load_digits_csv(dir / "a.csv");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Malformed);
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  write_text(dir / "b.csv", digits_row(0, 1, 63));
  EXPECT_ERROR(load_digits_csv(dir / "b.csv"), ErrorCode::Malformed);
  write_text(dir / "c.csv", digits_row(10, 1));
  EXPECT_ERROR(load_digits_csv(dir / "c.csv"), ErrorCode::Malformed);
  write_text(dir / "d.csv", digits_row(1, -1));
  EXPECT_ERROR(load_digits_csv(dir / "d.csv"), ErrorCode::Malformed);
  write_text(dir / "e.csv", "1,x" + digits_row(0, 1).substr(1));
  EXPECT_ERROR(load_digits_csv(dir / "e.csv"), ErrorCode::Malformed);
  EXPECT_ERROR(load_digits_csv(dir / "missing.csv"), ErrorCode::FileNotFound);
}

TEST(DigitsCsv, RoundTripIsBitwise) {
  TempDir dir;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 16), l(0, 9);
  std::string text;
  for (int r = 0; r < 20; ++r) {
    text += std::to_string(l(rng));
    for (int i = 0; i < 64; ++i) text += "," + std::to_string(v(rng));
    text += "\n";
  }
  write_text(dir / "in.csv", text);
  const Dataset a = load_digits_csv(dir / "in.csv");
  save_digits_csv(dir / "out.csv", a);
  const Dataset b = load_digits_csv(dir / "out.csv");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.samples[i].image, b.samples[i].image);
    EXPECT_EQ(a.samples[i].label, b.samples[i].label);
  }
  std::ifstream in(dir / "out.csv");
  const std::string written{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  EXPECT_EQ(written, text);
}

TEST(DigitsCsv, BundledFileShape) {
  const Dataset ds = load_digits_csv(QCNNLAB_DATA_DIR "/digits.csv");
  EXPECT_EQ(ds.size(), 1797u);
  std::vector<int> counts(10, 0);
  for (const auto& s : ds.samples) ++counts[s.label];
  for (int c : counts) EXPECT_GE(c, 170);
}

std::vector<unsigned char> idx_images(std::uint32_t magic, std::uint32_t n, std::uint32_t rows,
                                      std::uint32_t cols, std::vector<unsigned char> pixels) {
  std::vector<unsigned char> out;
  for (std::uint32_t v : {magic, n, rows, cols})
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<unsigned char>(v >> s));
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

std::vector<unsigned char> idx_labels(std::uint32_t n, std::vector<unsigned char> labels) {
  std::vector<unsigned char> out;
  for (std::uint32_t v : {0x801U, n})
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<unsigned char>(v >> s));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

TEST(Idx, MinimalFile) {
  TempDir dir;
  write_bytes(dir / "img", idx_images(0x803, 1, 2, 2, {0, 255, 0, 255}));
  write_bytes(dir / "lab", idx_labels(1, {7}));
  const Dataset ds = load_idx(dir / "img", dir / "lab");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.samples[0].image.pixels, (std::vector<double>{0.0, 1.0, 0.0, 1.0}));
  EXPECT_EQ(ds.samples[0].label, 7);
}

TEST(Idx, Errors) {
  TempDir dir;
  write_bytes(dir / "lab", idx_labels(1, {7}));
  EXPECT_ERROR(load_idx(dir / "lab", dir / "lab"), ErrorCode::BadMagic);
  write_bytes(dir / "img", idx_images(0x803, 1, 2, 2, {0, 255, 0, 255}));
  EXPECT_ERROR(load_idx(dir / "img", dir / "img"), ErrorCode::BadMagic);
  write_bytes(dir / "lab2", idx_labels(2, {7, 1}));
  EXPECT_ERROR(load_idx(dir / "img", dir / "lab2"), ErrorCode::CountMismatch);
  write_bytes(dir / "short", idx_images(0x803, 1, 2, 2, {0, 255, 0}));
  EXPECT_ERROR(load_idx(dir / "short", dir / "lab"), ErrorCode::TruncatedFile);
  write_bytes(dir / "shortlab", idx_labels(1, {}));
  EXPECT_ERROR(load_idx(dir / "img", dir / "shortlab"), ErrorCode::TruncatedFile);
  write_bytes(dir / "tiny", {0, 0, 8});
  EXPECT_ERROR(load_idx(dir / "tiny", dir / "lab"), ErrorCode::TruncatedFile);
  EXPECT_ERROR(load_idx(dir / "none", dir / "lab"), ErrorCode::FileNotFound);
}

TEST(Pgm, MinimalFile) {
  TempDir dir;
  std::vector<unsigned char> bytes = {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n'};
  for (unsigned char b : {0, 128, 255, 64}) bytes.push_back(b);
  write_bytes(dir / "a.pgm", bytes);
  const Image img = load_pgm(dir / "a.pgm");
  EXPECT_EQ(img.height, 2);
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.pixels, (std::vector<double>{0.0, 128.0 / 255.0, 1.0, 64.0 / 255.0}));
}

TEST(Pgm, HeaderComments) {
  TempDir dir;
  std::vector<unsigned char> bytes;
  for (char c : std::string("P5\n# made by hand\n3 1\n# max\n255\n")) bytes.push_back(c);
  for (unsigned char b : {1, 2, 3}) bytes.push_back(b);
  write_bytes(dir / "c.pgm", bytes);
  EXPECT_EQ(load_pgm(dir / "c.pgm").width, 3);
}

TEST(Pgm, Errors) {
  TempDir dir;
  write_text(dir / "ascii.pgm", "P2\n2 2\n255\n0 1 2 3\n");
  EXPECT_ERROR(load_pgm(dir / "ascii.pgm"), ErrorCode::UnsupportedPgm);
  std::vector<unsigned char> deep = {'P', '5', '\n', '1', ' ', '1', '\n', '6', '5', '5', '3', '5', '\n', 0, 1};
  write_bytes(dir / "deep.pgm", deep);
  EXPECT_ERROR(load_pgm(dir / "deep.pgm"), ErrorCode::UnsupportedPgm);
  std::vector<unsigned char> shrt = {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n', 1, 2};
  write_bytes(dir / "short.pgm", shrt);
  EXPECT_ERROR(load_pgm(dir / "short.pgm"), ErrorCode::TruncatedFile);
}

TEST(Pgm, RoundTripIsBitwise) {
  TempDir dir;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<double> px(12 * 7);
  for (auto& p : px) p = byte(rng) / 255.0;
  const Image img(12, 7, px);
  save_pgm(dir / "x.pgm", img);
  const Image back = load_pgm(dir / "x.pgm");
  EXPECT_EQ(back, img);
  save_pgm(dir / "y.pgm", back);
  std::ifstream a(dir / "x.pgm", std::ios::binary), b(dir / "y.pgm", std::ios::binary);
  const std::string sa{std::istreambuf_iterator<char>(a), {}}, sb{std::istreambuf_iterator<char>(b), {}};
  EXPECT_EQ(sa, sb);
}

TEST(PgmDir, ClassFromLongestPrefix) {
  TempDir dir;
  save_pgm(dir / "cat.1.pgm", Image(2, 2, 0.0));
  save_pgm(dir / "dog.1.pgm", Image(2, 2, 1.0));
  save_pgm(dir / "dogfish.1.pgm", Image(2, 2, 1.0));
  write_text(dir / "notes.txt", "ignored");
  const Dataset ds = load_pgm_dir(dir.path(), {{"cat", 0}, {"dog", 1}, {"dogfish", 2}});
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.samples[0].label, 0);
  EXPECT_EQ(ds.samples[1].label, 1);
  EXPECT_EQ(ds.samples[2].label, 2);
  EXPECT_EQ(ds.class_names[1], "dog");
  save_pgm(dir / "bird.pgm", Image(2, 2, 1.0));
  EXPECT_ERROR(load_pgm_dir(dir.path(), {{"cat", 0}, {"dog", 1}}), ErrorCode::UnknownClassPrefix);
  EXPECT_ERROR(load_pgm_dir(dir / "nope", {{"cat", 0}}), ErrorCode::FileNotFound);
}

TEST(Resize, Examples) {
  std::mt19937_64 rng(3);
  std::vector<double> px(16);
  for (auto& p : px) p = std::uniform_real_distribution<double>(0, 1)(rng);
  const Image img(4, 4, px);
  EXPECT_EQ(resize_area(img, 4, 4), img);
  EXPECT_EQ(resize_area(Image(6, 6, 0.3), 3, 2).pixels, std::vector<double>(6, 0.3));
  const Image block(2, 2, std::vector<double>{0, 0, 1, 1});
  EXPECT_EQ(resize_area(block, 1, 1).pixels, std::vector<double>{0.5});
  EXPECT_ERROR(resize_area(img, 3, 3), ErrorCode::NonIntegerFactor);
}

Dataset indexed_dataset(int per_class) {
  // Pixel 0 carries a unique id so selections can be compared.
  Dataset ds;
  int id = 0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < per_class; ++k) {
      Image img(2, 2, 0.0);
      img.pixels[0] = id++;
      ds.samples.push_back({img, c});
    }
  return ds;
}

TEST(BinarySubset, CountsBalanceAndLabels) {
  const Dataset digits = load_digits_csv(QCNNLAB_DATA_DIR "/digits.csv");
  const Split s = binary_subset(digits, 0, 1, 50, 100, 7);
  ASSERT_EQ(s.train.size(), 100u);
  ASSERT_EQ(s.test.size(), 100u);
  int train_ones = 0, test_ones = 0;
  for (const auto& x : s.train.samples) train_ones += x.label;
  for (const auto& x : s.test.samples) test_ones += x.label;
  EXPECT_EQ(train_ones, 50);
  EXPECT_EQ(test_ones, 50);
  const Split five = binary_subset(digits, 0, 1, 5, 100, 7);
  EXPECT_EQ(five.train.size(), 10u);
}

TEST(BinarySubset, RemapsAndIsSeeded) {
  const Dataset ds = indexed_dataset(20);
  const Split a = binary_subset(ds, 2, 0, 5, 7, 11);
  const Split b = binary_subset(ds, 2, 0, 5, 7, 11);
  const Split c = binary_subset(ds, 2, 0, 5, 7, 12);
  for (const auto& s : a.train.samples) {
    const int original = static_cast<int>(s.image.pixels[0]) / 20;
    EXPECT_EQ(s.label, original == 2 ? 0 : 1);
  }
  EXPECT_EQ(a.test.size(), 7u);
  int a_count = 0;
  for (const auto& s : a.test.samples) a_count += s.label == 0;
  EXPECT_EQ(a_count, 4);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    same = same && a.train.samples[i].image == b.train.samples[i].image;
    differs = differs || a.train.samples[i].image != c.train.samples[i].image;
  }
  EXPECT_TRUE(same);
  EXPECT_TRUE(differs);
}

TEST(BinarySubset, TrainAndTestAreDisjoint) {
  const Dataset ds = indexed_dataset(30);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Split s = binary_subset(ds, 0, 1, 10, 20, seed);
    std::set<double> train_ids, test_ids;
    for (const auto& x : s.train.samples) train_ids.insert(x.image.pixels[0]);
    for (const auto& x : s.test.samples) test_ids.insert(x.image.pixels[0]);
    EXPECT_EQ(train_ids.size(), 20u);
    EXPECT_EQ(test_ids.size(), 20u);
    for (double id : train_ids) EXPECT_EQ(test_ids.count(id), 0u);
  }
}

TEST(BinarySubset, Errors) {
  const Dataset ds = indexed_dataset(10);
  EXPECT_ERROR(binary_subset(ds, 0, 1, 8, 6, 1), ErrorCode::InsufficientSamples);
  EXPECT_ERROR(binary_subset(ds, 0, 0, 2, 2, 1), ErrorCode::InvalidConfig);
  EXPECT_ERROR(binary_subset(ds, 0, 1, 0, 2, 1), ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace qcnnlab
