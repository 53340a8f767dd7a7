#include "mscs/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mscs/errors.hpp"

namespace mscs {

GrayImage read_png_gray(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read PNG " + path.string() + ": " + image.message);
  }
  const bool wide = (image.flags & PNG_IMAGE_FLAG_16BIT_sRGB) != 0 ||
                    PNG_IMAGE_SAMPLE_COMPONENT_SIZE(image.format) == 2;
  image.format = wide ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;
  GrayImage out;
  out.rows = image.height;
  out.cols = image.width;
  out.bit_depth = wide ? 16 : 8;
  out.pixels.resize(out.rows * out.cols);
  if (wide) {
    std::vector<std::uint16_t> buf(PNG_IMAGE_SIZE(image) / 2);
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
      throw DataError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = buf[i] / 65535.0;
  } else {
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
      throw DataError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = buf[i] / 255.0;
  }
  return out;
}

void write_png_gray(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                    std::span<const double> values, double lo, double hi) {
  if (values.size() != rows * cols) throw ConfigError("image size mismatch");
  std::vector<std::uint8_t> bytes(values.size());
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = std::clamp((values[i] - lo) / span, 0.0, 1.0);
    bytes[i] = static_cast<std::uint8_t>(std::lround(255.0 * t));
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(cols);
  image.height = static_cast<png_uint_32>(rows);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw DataError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

void write_png_indexed(const std::filesystem::path& path, std::size_t rows,
                       std::size_t cols, std::span<const std::uint8_t> indices,
                       std::span<const Rgb> palette) {
  if (indices.size() != rows * cols) throw ConfigError("image size mismatch");
  if (palette.empty() || palette.size() > 256) throw ConfigError("bad palette size");
  std::vector<std::uint8_t> colormap;
  for (const Rgb& c : palette) colormap.insert(colormap.end(), c.begin(), c.end());
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(cols);
  image.height = static_cast<png_uint_32>(rows);
  image.format = PNG_FORMAT_RGB_COLORMAP;
  image.colormap_entries = static_cast<png_uint_32>(palette.size());
  if (!png_image_write_to_file(&image, path.c_str(), 0, indices.data(), 0,
                               colormap.data())) {
    throw DataError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::vector<Rgb> band_palette(std::size_t count) {
  std::vector<Rgb> pal(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Hue sweeps violet -> red like the visible spectrum.
    const double h =
        300.0 * (1.0 - static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(count - 1, 1)));
    const double x = 1.0 - std::fabs(std::fmod(h / 60.0, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h / 60.0) % 6) {
      case 0: r = 1; g = x; break;
      case 1: r = x; g = 1; break;
      case 2: g = 1; b = x; break;
      case 3: g = x; b = 1; break;
      case 4: r = x; b = 1; break;
      default: r = 1; b = x; break;
    }
    pal[i] = {static_cast<std::uint8_t>(std::lround(255 * r)),
              static_cast<std::uint8_t>(std::lround(255 * g)),
              static_cast<std::uint8_t>(std::lround(255 * b))};
  }
  return pal;
}

}  // namespace mscs
