#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "madphys/classical/classical.hpp"
#include "madphys/numerics/interp.hpp"

namespace madphys::harness {

/// 8-bit RGB raster, row-major from the top row.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int width, int height, std::uint8_t fill = 255);
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// Deterministic PNG encoding (no timestamps or text chunks).
std::vector<std::uint8_t> encode_png(const Image& image);

/// Disc in world coordinates; `color_index` selects a stable palette entry.
struct Disc {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  std::size_t color_index = 0;
};

/// White canvas, black box border, filled discs. The square box
/// [box_min, box_max]^2 maps onto the image with y pointing up; a disc of
/// radius R covers round(R * size / (box_max - box_min)) pixels.
Image render_discs(std::span<const Disc> discs, double box_min, double box_max, int size);

/// All particles of a 2D state. Throws ConfigError for 3D states.
std::vector<std::uint8_t> render_classical(const classical::ParticleState& state,
                                           const classical::ClassicalConfig& config, int size);

/// Diverging blue-white-red heatmap of a periodic field, x to the right and
/// y up. The colour scale is symmetric: [-limit, limit], with limit defaulting
/// to the field's largest magnitude.
Image render_heatmap(const numerics::RealGrid2D& field, int size, std::optional<double> limit = std::nullopt);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ArgumentError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace madphys::harness
