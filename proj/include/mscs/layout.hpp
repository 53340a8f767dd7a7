#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mscs {

enum class LayoutKind { mosaic, random, tiled };

std::string_view to_string(LayoutKind kind);
LayoutKind parse_layout_kind(std::string_view name);

// Assignment of Fabry-Perot filters (bands) to the m_u x m_v sensor pixels.
//
// Each pixel samples exactly one band, so the per-band masks M_l partition
// the sensor: sum_l M_l = Id and M_l M_l' = 0 for l != l'.
class SensorLayout {
 public:
  SensorLayout(LayoutKind kind, std::size_t m_u, std::size_t m_v, std::size_t n_bands,
               std::size_t period, std::uint64_t seed,
               std::vector<std::uint16_t> band_of_pixel);

  LayoutKind kind() const { return kind_; }
  std::size_t m_u() const { return m_u_; }
  std::size_t m_v() const { return m_v_; }
  std::size_t pixels() const { return m_u_ * m_v_; }
  std::size_t n_bands() const { return n_bands_; }
  std::size_t period() const { return period_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t band_at(std::size_t u, std::size_t v) const {
    return band_of_pixel_[u * m_v_ + v];
  }
  std::size_t band_of(std::size_t pixel) const { return band_of_pixel_[pixel]; }
  const std::vector<std::uint16_t>& band_of_pixel() const { return band_of_pixel_; }

  // Row-major pixel indices sampled by `band`, ascending.
  const std::vector<std::size_t>& pixels_of_band(std::size_t band) const {
    return pixels_of_band_[band];
  }
  std::vector<std::size_t> band_counts() const;

  // Indicator image of M_band (1 where the pixel samples `band`).
  std::vector<double> mask(std::size_t band) const;

 private:
  LayoutKind kind_;
  std::size_t m_u_, m_v_, n_bands_, period_;
  std::uint64_t seed_;
  std::vector<std::uint16_t> band_of_pixel_;
  std::vector<std::vector<std::size_t>> pixels_of_band_;
};

// mosaic: period x period macro-pixels, requires n_bands == period^2.
// tiled:  period x period grid of contiguous tiles, requires n_bands == period^2.
// random: seeded full-sensor permutation of a balanced band assignment.
SensorLayout make_layout(LayoutKind kind, std::size_t m_u, std::size_t m_v,
                         std::size_t n_bands, std::size_t period, std::uint64_t seed = 0);

void write_layout_text(const std::filesystem::path& path, const SensorLayout& layout);
SensorLayout read_layout_text(const std::filesystem::path& path);
void write_layout_png(const std::filesystem::path& path, const SensorLayout& layout);

}  // namespace mscs
