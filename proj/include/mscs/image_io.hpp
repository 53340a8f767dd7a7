#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mscs {

struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;  // row-major, scaled to [0, 1] by the bit depth
  int bit_depth = 8;
};

// Reads 8- or 16-bit PNGs; colour images are converted to luminance.
GrayImage read_png_gray(const std::filesystem::path& path);

// Writes values clamped to [lo, hi] as 8-bit grayscale.
void write_png_gray(const std::filesystem::path& path, std::size_t rows,
                    std::size_t cols, std::span<const double> values, double lo = 0.0,
                    double hi = 1.0);

using Rgb = std::array<std::uint8_t, 3>;

void write_png_indexed(const std::filesystem::path& path, std::size_t rows,
                       std::size_t cols, std::span<const std::uint8_t> indices,
                       std::span<const Rgb> palette);

// Evenly spread hues, used for layout maps.
std::vector<Rgb> band_palette(std::size_t count);

}  // namespace mscs
