#include "mscs/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mscs/errors.hpp"
#include "mscs/simd.hpp"

namespace mscs {

WaveletFilters wavelet_filters(std::string_view name) {
  WaveletFilters f;
  f.name = std::string(name);
  if (name == "db4") {
    // minimum-phase Daubechies factor, roots solved at 50 digits
    f.lo = {0.23037781330889650086,  0.71484657055291564709,  0.63088076792985890788,
            -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
            0.032883011666885199735, -0.010597401785069032105};
  } else if (name == "haar") {
    f.lo = {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2};
  } else {
    throw ConfigError("unknown wavelet '" + std::string(name) + "' (expected db4 or haar)");
  }
  const std::size_t L = f.lo.size();
  f.hi.resize(L);
  for (std::size_t k = 0; k < L; ++k) f.hi[k] = (k % 2 ? -1.0 : 1.0) * f.lo[L - 1 - k];
  return f;
}

Eigen::MatrixXd dct_matrix(std::size_t n) {
  Eigen::MatrixXd c(n, n);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ck = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    for (std::size_t i = 0; i < n; ++i) {
      c(k, i) = ck * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * nn));
    }
  }
  return c;
}

namespace {

// out += f (*) in over independent blocks of length `len`, where tap k
// moves data by shift(k) elements (circularly within the block).
//   forward: out[j] += f[k] in[j - s]
//   adjoint: out[j] += f[k] in[j + s]
void circ_filter(std::span<const double> in, std::span<double> out, std::size_t len,
                 std::span<const double> f, std::span<const std::size_t> shifts, bool adjoint) {
  const std::size_t blocks = in.size() / len;
  for (std::size_t b = 0; b < blocks; ++b) {
    auto src = in.subspan(b * len, len);
    auto dst = out.subspan(b * len, len);
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::size_t s = shifts[k];
      if (!adjoint) {
        simd::axpy(f[k], src.first(len - s), dst.subspan(s));
        if (s) simd::axpy(f[k], src.subspan(len - s), dst.first(s));
      } else {
        simd::axpy(f[k], src.subspan(s), dst.first(len - s));
        if (s) simd::axpy(f[k], src.first(s), dst.subspan(len - s));
      }
    }
  }
}

}  // namespace

Udwt2::Udwt2(std::size_t n_u, std::size_t n_v, WaveletFilters filters, std::size_t levels)
    : n_u_(n_u), n_v_(n_v), levels_(levels), filters_(std::move(filters)) {
  if (levels_ == 0) throw ConfigError("wavelet levels must be >= 1");
  const std::size_t L = filters_.lo.size();
  if (n_u_ < L || n_v_ < L) {
    throw ConfigError("image " + std::to_string(n_u_) + "x" + std::to_string(n_v_) +
                      " smaller than the " + std::to_string(L) + "-tap filter support");
  }
  lo_ = filters_.lo;
  hi_ = filters_.hi;
  for (double& v : lo_) v /= std::numbers::sqrt2;
  for (double& v : hi_) v /= std::numbers::sqrt2;
}

std::size_t Udwt2::band_level(std::size_t band) const {
  return band >= 3 * levels_ ? levels_ : band / 3 + 1;
}

std::string Udwt2::band_name(std::size_t band) const {
  if (band >= 3 * levels_) return "LL" + std::to_string(levels_);
  static const char* kNames[] = {"LH", "HL", "HH"};
  return std::string(kNames[band % 3]) + std::to_string(band / 3 + 1);
}

void Udwt2::forward(std::span<const double> image, std::span<double> coeffs) const {
  const std::size_t n = band_size();
  if (image.size() != n || coeffs.size() != output_size()) {
    throw ConfigError("Udwt2::forward: size mismatch");
  }
  std::vector<double> a(image.begin(), image.end()), lv(n), hv(n);
  std::vector<std::size_t> sv(lo_.size()), su(lo_.size());
  for (std::size_t j = 0; j < levels_; ++j) {
    const std::size_t d = std::size_t{1} << j;
    for (std::size_t k = 0; k < lo_.size(); ++k) {
      sv[k] = (k * d) % n_v_;
      su[k] = ((k * d) % n_u_) * n_v_;
    }
    std::fill(lv.begin(), lv.end(), 0.0);
    std::fill(hv.begin(), hv.end(), 0.0);
    circ_filter(a, lv, n_v_, lo_, sv, false);
    circ_filter(a, hv, n_v_, hi_, sv, false);

    auto lh = coeffs.subspan((3 * j) * n, n);
    auto hl = coeffs.subspan((3 * j + 1) * n, n);
    auto hh = coeffs.subspan((3 * j + 2) * n, n);
    std::fill(lh.begin(), lh.end(), 0.0);
    std::fill(hl.begin(), hl.end(), 0.0);
    std::fill(hh.begin(), hh.end(), 0.0);
    std::fill(a.begin(), a.end(), 0.0);
    circ_filter(lv, a, n, lo_, su, false);
    circ_filter(lv, hl, n, hi_, su, false);
    circ_filter(hv, lh, n, lo_, su, false);
    circ_filter(hv, hh, n, hi_, su, false);
  }
  std::copy(a.begin(), a.end(), coeffs.begin() + static_cast<std::ptrdiff_t>(3 * levels_ * n));
}

void Udwt2::adjoint(std::span<const double> coeffs, std::span<double> image) const {
  const std::size_t n = band_size();
  if (image.size() != n || coeffs.size() != output_size()) {
    throw ConfigError("Udwt2::adjoint: size mismatch");
  }
  auto last = coeffs.subspan(3 * levels_ * n, n);
  std::vector<double> a(last.begin(), last.end()), lv(n), hv(n);
  std::vector<std::size_t> sv(lo_.size()), su(lo_.size());
  for (std::size_t j = levels_; j-- > 0;) {
    const std::size_t d = std::size_t{1} << j;
    for (std::size_t k = 0; k < lo_.size(); ++k) {
      sv[k] = (k * d) % n_v_;
      su[k] = ((k * d) % n_u_) * n_v_;
    }
    std::fill(lv.begin(), lv.end(), 0.0);
    std::fill(hv.begin(), hv.end(), 0.0);
    circ_filter(a, lv, n, lo_, su, true);
    circ_filter(coeffs.subspan((3 * j + 1) * n, n), lv, n, hi_, su, true);
    circ_filter(coeffs.subspan((3 * j) * n, n), hv, n, lo_, su, true);
    circ_filter(coeffs.subspan((3 * j + 2) * n, n), hv, n, hi_, su, true);

    std::fill(a.begin(), a.end(), 0.0);
    circ_filter(lv, a, n_v_, lo_, sv, true);
    circ_filter(hv, a, n_v_, hi_, sv, true);
  }
  std::copy(a.begin(), a.end(), image.begin());
}

}  // namespace mscs
