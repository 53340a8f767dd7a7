#include "mscs/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "mscs/errors.hpp"

namespace mscs {
namespace {

struct Lattice {
  std::size_t off_u, off_v, step, rows, cols;
};

// The band's samples form the full lattice {(off_u + step i, off_v + step j)}?
std::optional<Lattice> find_lattice(const SensorLayout& layout, std::size_t band) {
  const std::size_t p = layout.period();
  if (p == 0) return std::nullopt;
  const auto& px = layout.pixels_of_band(band);
  if (px.empty()) return std::nullopt;
  const std::size_t mv = layout.m_v();
  Lattice l{(px[0] / mv) % p, (px[0] % mv) % p, p, 0, 0};
  if (l.off_u >= layout.m_u() || l.off_v >= mv) return std::nullopt;
  l.rows = (layout.m_u() - l.off_u + p - 1) / p;
  l.cols = (mv - l.off_v + p - 1) / p;
  if (px.size() != l.rows * l.cols) return std::nullopt;
  for (std::size_t i = 0; i < l.rows; ++i) {
    for (std::size_t j = 0; j < l.cols; ++j) {
      if (layout.band_at(l.off_u + p * i, l.off_v + p * j) != band) return std::nullopt;
    }
  }
  return l;
}

// Position along one lattice axis: index of the lower site and weight of
// the upper one.
std::pair<std::size_t, double> axis_pos(std::size_t x, std::size_t off, std::size_t step,
                                        std::size_t count) {
  if (x <= off) return {0, 0.0};
  const std::size_t i = (x - off) / step;
  if (i + 1 >= count) return {count - 1, 0.0};
  return {i, static_cast<double>((x - off) % step) / static_cast<double>(step)};
}

void bilinear(std::span<const double> snap, const SensorLayout& layout, const Lattice& l,
              std::span<double> out) {
  const std::size_t mu = layout.m_u(), mv = layout.m_v();
  auto site = [&](std::size_t i, std::size_t j) {
    return snap[(l.off_u + l.step * i) * mv + l.off_v + l.step * j];
  };
  for (std::size_t u = 0; u < mu; ++u) {
    const auto [i, fu] = axis_pos(u, l.off_u, l.step, l.rows);
    const std::size_t i1 = std::min(i + 1, l.rows - 1);
    for (std::size_t v = 0; v < mv; ++v) {
      const auto [j, fv] = axis_pos(v, l.off_v, l.step, l.cols);
      const std::size_t j1 = std::min(j + 1, l.cols - 1);
      out[u * mv + v] = (1 - fu) * ((1 - fv) * site(i, j) + fv * site(i, j1)) +
                        fu * ((1 - fv) * site(i1, j) + fv * site(i1, j1));
    }
  }
}

// Multi-source BFS (4-neighbour) to the nearest sample of `band`.
std::vector<std::size_t> nearest_sample_map(const SensorLayout& layout, std::size_t band) {
  const std::size_t mu = layout.m_u(), mv = layout.m_v();
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> src(mu * mv, none);
  std::deque<std::size_t> q;
  for (std::size_t p : layout.pixels_of_band(band)) {
    src[p] = p;
    q.push_back(p);
  }
  while (!q.empty()) {
    const std::size_t p = q.front();
    q.pop_front();
    const std::size_t u = p / mv, v = p % mv;
    auto visit = [&](std::size_t n) {
      if (src[n] == none) {
        src[n] = src[p];
        q.push_back(n);
      }
    };
    if (u > 0) visit(p - mv);
    if (u + 1 < mu) visit(p + mv);
    if (v > 0) visit(p - 1);
    if (v + 1 < mv) visit(p + 1);
  }
  return src;
}

void inverse_distance(std::span<const double> snap, const SensorLayout& layout, std::size_t band,
                      std::span<double> out) {
  constexpr long kMaxRadius = 8;
  constexpr std::size_t kMinSamples = 4;
  const long mu = static_cast<long>(layout.m_u()), mv = static_cast<long>(layout.m_v());
  std::vector<std::size_t> fallback;
  for (long u = 0; u < mu; ++u) {
    for (long v = 0; v < mv; ++v) {
      const std::size_t p = static_cast<std::size_t>(u * mv + v);
      if (layout.band_of(p) == band) {
        out[p] = snap[p];
        continue;
      }
      double wsum = 0.0, vsum = 0.0;
      std::size_t found = 0;
      long r = 1;
      bool extra_ring = false;
      for (; r <= kMaxRadius; ++r) {
        for (long du = -r; du <= r; ++du) {
          for (long dv = -r; dv <= r; ++dv) {
            if (std::max(std::labs(du), std::labs(dv)) != r) continue;
            const long uu = u + du, vv = v + dv;
            if (uu < 0 || vv < 0 || uu >= mu || vv >= mv) continue;
            const std::size_t q = static_cast<std::size_t>(uu * mv + vv);
            if (layout.band_of(q) != band) continue;
            const double w = 1.0 / static_cast<double>(du * du + dv * dv);
            wsum += w;
            vsum += w * snap[q];
            ++found;
          }
        }
        if (extra_ring) break;
        if (found >= kMinSamples) extra_ring = true;  // one more ring for symmetry
      }
      if (found == 0) {
        if (fallback.empty()) fallback = nearest_sample_map(layout, band);
        out[p] = snap[fallback[p]];
      } else {
        out[p] = vsum / wsum;
      }
    }
  }
}

}  // namespace

Vec interpolate_3d(std::span<const double> snapshot, const SensorLayout& layout) {
  const std::size_t px = layout.pixels();
  if (snapshot.size() != px) throw ConfigError("interpolate_3d: snapshot size mismatch");
  Vec out(layout.n_bands() * px);
  for (std::size_t b = 0; b < layout.n_bands(); ++b) {
    if (layout.pixels_of_band(b).empty()) {
      throw DataError("interpolate_3d: band " + std::to_string(b) + " has no samples");
    }
    auto dst = std::span<double>(out).subspan(b * px, px);
    if (auto lat = find_lattice(layout, b)) {
      bilinear(snapshot, layout, *lat, dst);
    } else {
      inverse_distance(snapshot, layout, b, dst);
    }
    for (std::size_t p : layout.pixels_of_band(b)) dst[p] = snapshot[p];
  }
  return out;
}

Vec interpolate_frame(const MeasurementFrame& frame, const SensorLayout& layout) {
  if (frame.m_u != layout.m_u() || frame.m_v != layout.m_v()) {
    throw ConfigError("interpolate_frame: frame and layout sizes differ");
  }
  Vec out;
  out.reserve(frame.snapshots * layout.n_bands() * layout.pixels());
  for (std::size_t p = 0; p < frame.snapshots; ++p) {
    const Vec one = interpolate_3d(frame.snapshot(p), layout);
    out.insert(out.end(), one.begin(), one.end());
  }
  return out;
}

}  // namespace mscs
