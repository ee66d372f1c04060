#include <png.h>

#include <cstdio>
#include <memory>

#include "urbanforge/image.hpp"

namespace urbanforge {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Expected<RasterImage> load_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    return make_error(Errc::kIoError, "cannot open " + path);
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return make_error(Errc::kIoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return make_error(Errc::kIoError, "png_create_info_struct failed");
  }

  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return make_error(Errc::kIoError, "not a readable PNG: " + path);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);

  // Normalize every input to 8-bit RGB.
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  data.resize(row_bytes * height);
  row_ptrs.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) row_ptrs[y] = data.data() + row_bytes * y;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  RasterImage image;
  image.width = int(width);
  image.height = int(height);
  image.pixels.resize(std::size_t(width) * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_byte* row = data.data() + row_bytes * y;
    for (png_uint_32 x = 0; x < width; ++x) {
      image.pixels[std::size_t(y) * width + x] = Rgb{row[3 * x], row[3 * x + 1], row[3 * x + 2]};
    }
  }
  return image;
}

Status save_png(const RasterImage& image, const std::string& path) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != std::size_t(image.width) * std::size_t(image.height)) {
    return Status(Errc::kInvalidConfig, "image dimensions do not match pixel count");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    return Status(Errc::kIoError, "cannot write " + path);
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return Status(Errc::kIoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return Status(Errc::kIoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return Status(Errc::kIoError, "png write failed: " + path);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, png_uint_32(image.width), png_uint_32(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(std::size_t(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Rgb& px = image.at(x, y);
      row[3 * std::size_t(x)] = px.r;
      row[3 * std::size_t(x) + 1] = px.g;
      row[3 * std::size_t(x) + 2] = px.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return Status();
}

Expected<BinaryMask> load_mask_png(const std::string& path) {
  Expected<RasterImage> image = load_png(path);
  if (!image.ok()) return image.error();

  const RasterImage& img = image.value();
  BinaryMask mask;
  mask.width = img.width;
  mask.height = img.height;
  mask.bits.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const Rgb& px = img.pixels[i];
    // Integer Rec.601 luma; >= 128 counts as white.
    const int luma = (299 * px.r + 587 * px.g + 114 * px.b + 500) / 1000;
    mask.bits[i] = luma >= 128 ? 1 : 0;
  }
  return mask;
}

Status save_mask_png(const BinaryMask& mask, const std::string& path) {
  RasterImage image;
  image.width = mask.width;
  image.height = mask.height;
  image.pixels.resize(mask.bits.size());
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const std::uint8_t v = mask.bits[i] != 0 ? 255 : 0;
    image.pixels[i] = Rgb{v, v, v};
  }
  return save_png(image, path);
}

}  // namespace urbanforge
