#include <gtest/gtest.h>

#include <cmath>

#include "madphys/core/error.hpp"
#include "madphys/harness/render.hpp"

using namespace madphys;
using namespace madphys::harness;

namespace {

bool is_white(const Image& image, int x, int y) {
  const std::size_t k = (static_cast<std::size_t>(y) * image.width + x) * 3;
  return image.rgb[k] == 255 && image.rgb[k + 1] == 255 && image.rgb[k + 2] == 255;
}

std::uint32_t be32(const std::vector<std::uint8_t>& bytes, std::size_t at) {
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) | (std::uint32_t{bytes[at + 2]} << 8) |
         bytes[at + 3];
}

}  // namespace

TEST(Render, DiscCentreAndRadius) {
  for (double radius : {0.5, 1.0, 2.3}) {
    const Disc disc{3.0, -4.0, radius, 0};
    const int size = 200;
    const Image image = render_discs(std::span(&disc, 1), -10.0, 10.0, size);
    // World (3, -4) maps to column 130, row 140 with y pointing up.
    int min_x = size, max_x = -1, min_y = size, max_y = -1;
    for (int y = 1; y < size - 1; ++y)
      for (int x = 1; x < size - 1; ++x)
        if (!is_white(image, x, y)) {
          min_x = std::min(min_x, x), max_x = std::max(max_x, x);
          min_y = std::min(min_y, y), max_y = std::max(max_y, y);
        }
    const double cx = 0.5 * (min_x + max_x + 1), cy = 0.5 * (min_y + max_y + 1);
    EXPECT_NEAR(cx, 130.0, 1.0);
    EXPECT_NEAR(cy, 140.0, 1.0);
    const double expected = std::round(radius * size / 20.0);
    EXPECT_NEAR(0.5 * (max_x - min_x + 1), expected, 1.0) << radius;
    EXPECT_NEAR(0.5 * (max_y - min_y + 1), expected, 1.0) << radius;
  }
}

TEST(Render, BorderAndBackground) {
  const Image image = render_discs({}, -10.0, 10.0, 64);
  EXPECT_FALSE(is_white(image, 0, 10));
  EXPECT_FALSE(is_white(image, 63, 63));
  EXPECT_TRUE(is_white(image, 32, 32));
  EXPECT_THROW(render_discs({}, -10.0, 10.0, 4), ArgumentError);
}

TEST(Render, TinyBodiesStayVisible) {
  const Disc disc{0.0, 0.0, 0.001, 2};
  const Image image = render_discs(std::span(&disc, 1), -10.0, 10.0, 100);
  EXPECT_FALSE(is_white(image, 50, 50));
}

TEST(Render, PngIsDeterministicAndWellFormed) {
  classical::ClassicalConfig config;
  numerics::SeededRng rng(3, numerics::Stream::Init);
  const classical::ParticleState state = classical::init_classical(config, rng);
  const auto a = render_classical(state, config, 96);
  const auto b = render_classical(state, config, 96);
  EXPECT_EQ(a, b);
  const std::vector<std::uint8_t> signature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  ASSERT_GT(a.size(), 33u);
  EXPECT_TRUE(std::equal(signature.begin(), signature.end(), a.begin()));
  EXPECT_EQ(std::string(a.begin() + 12, a.begin() + 16), "IHDR");
  EXPECT_EQ(be32(a, 16), 96u);
  EXPECT_EQ(be32(a, 20), 96u);
  EXPECT_EQ(std::string(a.end() - 8, a.end() - 4), "IEND");
}

TEST(Render, ThreeDimensionalStateRejected) {
  classical::ClassicalConfig config;
  config.dim = 3;
  numerics::SeededRng rng(3, numerics::Stream::Init);
  const classical::ParticleState state = classical::init_classical(config, rng);
  EXPECT_THROW(render_classical(state, config, 64), ConfigError);
}

TEST(Render, HeatmapColours) {
  numerics::RealGrid2D field(4, 4, 1.0, 1.0);
  field.at(0, 0) = 1.0;
  field.at(2, 2) = -1.0;
  const Image image = render_heatmap(field, 8);
  // Node (0, 0) sits at the bottom-left corner; node (2, 2) at the centre.
  const std::size_t bottom_left = (static_cast<std::size_t>(7) * 8 + 0) * 3;
  EXPECT_EQ(image.rgb[bottom_left], 255);
  EXPECT_LT(image.rgb[bottom_left + 2], 255);
  const std::size_t centre = (static_cast<std::size_t>(3) * 8 + 4) * 3;
  EXPECT_LT(image.rgb[centre], 255);
  EXPECT_EQ(image.rgb[centre + 2], 255);
  EXPECT_THROW(render_heatmap(numerics::RealGrid2D{}, 8), ArgumentError);
}

TEST(Base64, KnownVectorsAndRoundTrip) {
  auto enc = [](std::string_view s) {
    return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
  std::vector<std::uint8_t> bytes(256);
  for (int k = 0; k < 256; ++k) bytes[k] = static_cast<std::uint8_t>(k);
  EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  EXPECT_THROW(base64_decode("Zm9"), ArgumentError);
  EXPECT_THROW(base64_decode("Zm9v!A=="), ArgumentError);
}
