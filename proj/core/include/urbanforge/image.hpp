#pragma once

#include <cstdint>
#include <vector>

#include "urbanforge/errors.hpp"
#include "urbanforge/land_use.hpp"

namespace urbanforge {

// Row-major 8-bit RGB raster.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  static RasterImage filled(int width, int height, Rgb color) {
    RasterImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(std::size_t(width) * std::size_t(height), color);
    return img;
  }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  Rgb& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

// Per-pixel boolean raster; true means white / valid.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  static BinaryMask filled(int width, int height, bool value) {
    BinaryMask mask;
    mask.width = width;
    mask.height = height;
    mask.bits.assign(std::size_t(width) * std::size_t(height), value ? 1 : 0);
    return mask;
  }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  bool test(int x, int y) const { return bits[std::size_t(y) * width + x] != 0; }
  void set(int x, int y, bool value) { bits[std::size_t(y) * width + x] = value ? 1 : 0; }

  std::int64_t count_set() const {
    std::int64_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }
};

// PNG codecs. Color images load as RGB (alpha dropped, palette expanded);
// mask loading converts to luma and binarizes at >= 128.
Expected<RasterImage> load_png(const std::string& path);
Status save_png(const RasterImage& image, const std::string& path);
Expected<BinaryMask> load_mask_png(const std::string& path);
Status save_mask_png(const BinaryMask& mask, const std::string& path);

}  // namespace urbanforge
