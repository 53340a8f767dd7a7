#include "mscs/prox.hpp"

#include <algorithm>
#include <cmath>

#include "mscs/errors.hpp"
#include "mscs/simd.hpp"

namespace mscs {

void prox_weighted_l1(std::span<const double> v, std::span<const double> w, double mu,
                      std::span<double> out) {
  if (v.size() != w.size() || v.size() != out.size()) {
    throw ConfigError("prox_weighted_l1: size mismatch");
  }
  simd::soft_threshold(v, w, mu, out);
}

void prox_l2_ball(std::span<const double> z, const RestrictionOp& r, std::span<const double> y,
                  double tau, std::span<double> out) {
  if (z.size() != r.cols() || out.size() != z.size() || y.size() != r.rows()) {
    throw ConfigError("prox_l2_ball: size mismatch");
  }
  if (out.data() != z.data()) std::copy(z.begin(), z.end(), out.begin());
  const auto& kept = r.kept();
  double dist2 = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double d = z[kept[i]] - y[i];
    dist2 += d * d;
  }
  const double dist = std::sqrt(dist2);
  if (dist <= tau) return;
  const double s = tau / dist;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out[kept[i]] = y[i] + s * (z[kept[i]] - y[i]);
  }
}

void prox_box_and_zero(std::span<const double> x, std::span<const unsigned char> kept_mask,
                       double lo, double hi, std::span<double> out) {
  if (x.size() != kept_mask.size() || x.size() != out.size()) {
    throw ConfigError("prox_box_and_zero: size mismatch");
  }
  simd::clamp(x, lo, hi, out);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!kept_mask[i]) out[i] = 0.0;
  }
}

}  // namespace mscs
