#include "mscs/layout.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "mscs/errors.hpp"
#include "mscs/image_io.hpp"
#include "mscs/random.hpp"

namespace mscs {

std::string_view to_string(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::mosaic: return "mosaic";
    case LayoutKind::random: return "random";
    case LayoutKind::tiled: return "tiled";
  }
  return "?";
}

LayoutKind parse_layout_kind(std::string_view name) {
  if (name == "mosaic") return LayoutKind::mosaic;
  if (name == "random") return LayoutKind::random;
  if (name == "tiled") return LayoutKind::tiled;
  throw ConfigError("unknown layout kind '" + std::string(name) + "'");
}

SensorLayout::SensorLayout(LayoutKind kind, std::size_t m_u, std::size_t m_v,
                           std::size_t n_bands, std::size_t period, std::uint64_t seed,
                           std::vector<std::uint16_t> band_of_pixel)
    : kind_(kind),
      m_u_(m_u),
      m_v_(m_v),
      n_bands_(n_bands),
      period_(period),
      seed_(seed),
      band_of_pixel_(std::move(band_of_pixel)),
      pixels_of_band_(n_bands) {
  if (m_u == 0 || m_v == 0 || n_bands == 0) {
    throw ConfigError("layout dimensions must be positive");
  }
  if (band_of_pixel_.size() != m_u * m_v) throw ConfigError("layout map size mismatch");
  for (std::size_t p = 0; p < band_of_pixel_.size(); ++p) {
    if (band_of_pixel_[p] >= n_bands) throw ConfigError("layout band index out of range");
    pixels_of_band_[band_of_pixel_[p]].push_back(p);
  }
}

std::vector<std::size_t> SensorLayout::band_counts() const {
  std::vector<std::size_t> counts(n_bands_);
  for (std::size_t b = 0; b < n_bands_; ++b) counts[b] = pixels_of_band_[b].size();
  return counts;
}

std::vector<double> SensorLayout::mask(std::size_t band) const {
  std::vector<double> m(pixels(), 0.0);
  for (std::size_t p : pixels_of_band_.at(band)) m[p] = 1.0;
  return m;
}

SensorLayout make_layout(LayoutKind kind, std::size_t m_u, std::size_t m_v,
                         std::size_t n_bands, std::size_t period, std::uint64_t seed) {
  if (m_u == 0 || m_v == 0 || n_bands == 0) {
    throw ConfigError("layout dimensions must be positive");
  }
  if (n_bands > 65535) throw ConfigError("too many bands");
  std::vector<std::uint16_t> map(m_u * m_v);
  switch (kind) {
    case LayoutKind::mosaic:
      if (period == 0 || period * period != n_bands) {
        throw ConfigError("mosaic layout needs n_bands == period^2");
      }
      for (std::size_t u = 0; u < m_u; ++u)
        for (std::size_t v = 0; v < m_v; ++v)
          map[u * m_v + v] = static_cast<std::uint16_t>((u % period) * period + v % period);
      break;
    case LayoutKind::tiled:
      if (period == 0 || period * period != n_bands) {
        throw ConfigError("tiled layout needs n_bands == period^2");
      }
      if (m_u < period || m_v < period) throw ConfigError("sensor smaller than tile grid");
      for (std::size_t u = 0; u < m_u; ++u)
        for (std::size_t v = 0; v < m_v; ++v)
          map[u * m_v + v] =
              static_cast<std::uint16_t>((u * period / m_u) * period + v * period / m_v);
      break;
    case LayoutKind::random: {
      // Balanced contiguous assignment, then a seeded permutation over the sensor.
      const std::size_t m = m_u * m_v;
      for (std::size_t p = 0; p < m; ++p) {
        map[p] = static_cast<std::uint16_t>(p * n_bands / m);
      }
      Rng rng(seed);
      rng.shuffle(std::span<std::uint16_t>(map));
      break;
    }
  }
  return SensorLayout(kind, m_u, m_v, n_bands, period, seed, std::move(map));
}

void write_layout_text(const std::filesystem::path& path, const SensorLayout& layout) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os << "mslayout " << to_string(layout.kind()) << ' ' << layout.m_u() << ' '
     << layout.m_v() << ' ' << layout.n_bands() << ' ' << layout.period() << ' '
     << layout.seed() << '\n';
  for (std::size_t u = 0; u < layout.m_u(); ++u) {
    for (std::size_t v = 0; v < layout.m_v(); ++v) {
      if (v) os << ' ';
      os << layout.band_at(u, v);
    }
    os << '\n';
  }
}

SensorLayout read_layout_text(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  std::string magic, kind;
  std::size_t m_u = 0, m_v = 0, n_b = 0, period = 0;
  std::uint64_t seed = 0;
  is >> magic >> kind >> m_u >> m_v >> n_b >> period >> seed;
  if (!is || magic != "mslayout") throw DataError("bad layout header in " + path.string());
  std::vector<std::uint16_t> map(m_u * m_v);
  for (auto& b : map) {
    unsigned v;
    if (!(is >> v)) throw DataError("truncated layout grid in " + path.string());
    b = static_cast<std::uint16_t>(v);
  }
  return SensorLayout(parse_layout_kind(kind), m_u, m_v, n_b, period, seed, std::move(map));
}

void write_layout_png(const std::filesystem::path& path, const SensorLayout& layout) {
  if (layout.n_bands() > 256) throw ConfigError("PNG export supports at most 256 bands");
  std::vector<std::uint8_t> idx(layout.band_of_pixel().begin(),
                                layout.band_of_pixel().end());
  const auto palette = band_palette(layout.n_bands());
  write_png_indexed(path, layout.m_u(), layout.m_v(), idx, palette);
}

}  // namespace mscs
