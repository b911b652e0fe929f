#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "test_util.hpp"
#include "toposnake/io.hpp"
#include "toposnake/level_set.hpp"
#include "toposnake/synth.hpp"

using namespace toposnake;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("toposnake_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

void write_bytes(const std::string& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST_F(TempDir, AsciiPgmNormalizes) {
  write_bytes(path("a.pgm"), "P2\n# comment\n2 2\n255\n0 255\n128 64\n");
  const ScalarField f = load_image(path("a.pgm"));
  ASSERT_EQ(f.dims(), GridDims(2, 2));
  EXPECT_EQ(f(0, 0), 0.0);
  EXPECT_EQ(f(0, 1), 1.0);
  EXPECT_NEAR(f(1, 0), 0.50196, 1e-5);
  EXPECT_NEAR(f(1, 1), 0.25098, 1e-5);
}

TEST_F(TempDir, PgmRoundTripIsIdempotent) {
  const ScalarField img = synth_two_circles();
  save_image(path("a.pgm"), img);
  const ScalarField once = load_image(path("a.pgm"));
  save_image(path("b.pgm"), once);
  const ScalarField twice = load_image(path("b.pgm"));
  EXPECT_EQ(once, twice);
  for (std::size_t k = 0; k < img.size(); ++k) EXPECT_NEAR(once[k], img[k], 0.5 / 255.0 + 1e-12);
}

TEST_F(TempDir, PngAndPgmAgree) {
  const ScalarField img = synth_hand();
  save_image(path("a.pgm"), img);
  save_image(path("a.png"), img);
  EXPECT_EQ(load_image(path("a.pgm")), load_image(path("a.png")));
}

TEST_F(TempDir, RgbPngUsesLuma) {
  Raster r{1, 3, 3, {255, 0, 0, 0, 255, 0, 0, 0, 255}};
  write_png(path("rgb.png"), r);
  const ScalarField f = load_image(path("rgb.png"));
  ASSERT_EQ(f.cols(), 3u);
  EXPECT_NEAR(f(0, 0), 0.299, 1e-3);
  EXPECT_NEAR(f(0, 1), 0.587, 1e-3);
  EXPECT_NEAR(f(0, 2), 0.114, 1e-3);
}

TEST_F(TempDir, Errors) {
  EXPECT_THROW(load_image(path("missing.pgm")), ImageIoError);
  write_bytes(path("t.pgm"), "P5\n4 4\n255\nab");
  EXPECT_THROW(load_image(path("t.pgm")), ImageIoError);
  write_bytes(path("z.pgm"), "P2\n0 3\n255\n");
  EXPECT_THROW(load_image(path("z.pgm")), ImageIoError);
  write_bytes(path("x.bmp"), "BM....");
  EXPECT_THROW(load_image(path("x.bmp")), ImageIoError);
  write_bytes(path("w.pgm"), "P2\n1 1\n65535\n7\n");
  EXPECT_THROW(load_image(path("w.pgm")), ImageIoError);
}

TEST_F(TempDir, MaskRoundTrip) {
  std::mt19937 rng(3);
  Mask m({17, 23});
  std::bernoulli_distribution b(0.4);
  for (auto& v : m.values()) v = b(rng) ? 1 : 0;
  save_mask_png(path("m.png"), m);
  EXPECT_EQ(load_mask(path("m.png")), m);
}

TEST_F(TempDir, OverlayKeepsDimensions) {
  const ScalarField img = synth_two_circles();
  const ScalarField phi = init_level_set(two_circles_init(), img.dims());
  save_overlay_png(path("o.png"), img, phi);
  const ScalarField back = load_image(path("o.png"));
  EXPECT_EQ(back.dims(), img.dims());
}
