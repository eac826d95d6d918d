#include "madphys/harness/render.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "madphys/core/error.hpp"

namespace madphys::harness {

namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 10> kPalette{{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {214, 39, 40},
    {148, 103, 189},
    {140, 86, 75},
    {227, 119, 194},
    {127, 127, 127},
    {188, 189, 34},
    {23, 190, 207},
}};

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

}  // namespace

Image::Image(int w, int h, std::uint8_t fill)
    : width(w), height(h), rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {
  if (w <= 0 || h <= 0) throw ArgumentError("Image: dimensions must be positive");
}

void Image::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t at = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  rgb[at] = r;
  rgb[at + 1] = g;
  rgb[at + 2] = b;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.rgb.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height) * 3)
    throw ArgumentError("encode_png: pixel buffer size mismatch");
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("encode_png: libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("encode_png: libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("encode_png: libpng write failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    auto* row = const_cast<png_bytep>(image.rgb.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width) * 3);
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image render_discs(std::span<const Disc> discs, double box_min, double box_max, int size) {
  if (size < 8) throw ArgumentError("render_discs: image size must be at least 8");
  if (!(box_max > box_min)) throw ArgumentError("render_discs: empty box");
  Image image(size, size);
  for (int i = 0; i < size; ++i) {
    image.set(i, 0, 0, 0, 0);
    image.set(i, size - 1, 0, 0, 0);
    image.set(0, i, 0, 0, 0);
    image.set(size - 1, i, 0, 0, 0);
  }
  const double extent = box_max - box_min;
  const double scale = static_cast<double>(size) / extent;
  for (const Disc& d : discs) {
    const double cx = (d.x - box_min) * scale;
    const double cy = (box_max - d.y) * scale;
    const double r = std::round(d.radius * scale);
    const auto& colour = kPalette[d.color_index % kPalette.size()];
    const int x0 = static_cast<int>(std::floor(cx - r - 1.0));
    const int x1 = static_cast<int>(std::ceil(cx + r + 1.0));
    const int y0 = static_cast<int>(std::floor(cy - r - 1.0));
    const int y1 = static_cast<int>(std::ceil(cy + r + 1.0));
    for (int py = std::max(y0, 0); py <= std::min(y1, size - 1); ++py)
      for (int px = std::max(x0, 0); px <= std::min(x1, size - 1); ++px) {
        const double dx = px + 0.5 - cx;
        const double dy = py + 0.5 - cy;
        if (dx * dx + dy * dy <= r * r) image.set(px, py, colour[0], colour[1], colour[2]);
      }
    // Always mark the centre pixel so sub-pixel bodies stay visible.
    image.set(static_cast<int>(std::floor(cx)), static_cast<int>(std::floor(cy)), colour[0], colour[1], colour[2]);
  }
  return image;
}

std::vector<std::uint8_t> render_classical(const classical::ParticleState& state,
                                           const classical::ClassicalConfig& config, int size) {
  if (state.dim != 2) throw ConfigError("render_classical: only 2D states can be rendered");
  std::vector<Disc> discs;
  for (std::size_t i = 0; i < state.n; ++i)
    discs.push_back({state.x[i * 2], state.x[i * 2 + 1], state.radius[i], i});
  return encode_png(render_discs(discs, config.box_min, config.box_max, size));
}

Image render_heatmap(const numerics::RealGrid2D& field, int size, std::optional<double> limit) {
  if (size < 8) throw ArgumentError("render_heatmap: image size must be at least 8");
  if (field.values.empty()) throw ArgumentError("render_heatmap: empty field");
  double lim = 0.0;
  if (limit) {
    lim = *limit;
  } else {
    for (double v : field.values) lim = std::max(lim, std::abs(v));
  }
  if (!(lim > 0.0)) lim = 1.0;
  Image image(size, size);
  for (int py = 0; py < size; ++py) {
    const double y = (static_cast<double>(size - 1 - py) + 0.5) / size * field.length_y;
    for (int px = 0; px < size; ++px) {
      const double x = (static_cast<double>(px) + 0.5) / size * field.length_x;
      const double t = std::clamp(numerics::bilinear_interpolate(field, x, y) / lim, -1.0, 1.0);
      // Negative values fade white -> blue, positive white -> red.
      const auto fade = [](double s) { return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - s))); };
      if (t >= 0.0) {
        image.set(px, py, 255, fade(t), fade(t));
      } else {
        image.set(px, py, fade(-t), fade(-t), 255);
      }
    }
  }
  return image;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ArgumentError("base64_decode: length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      std::uint32_t digit = 0;
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw ArgumentError("base64_decode: misplaced padding");
        ++pad;
      } else {
        if (pad) throw ArgumentError("base64_decode: data after padding");
        const auto pos = kBase64Alphabet.find(c);
        if (pos == std::string_view::npos) throw ArgumentError("base64_decode: invalid character");
        digit = static_cast<std::uint32_t>(pos);
      }
      v = (v << 6) | digit;
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

}  // namespace madphys::harness
