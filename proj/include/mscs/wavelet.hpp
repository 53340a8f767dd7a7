#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mscs {

// Orthonormal two-channel filter bank: sum(lo) = sqrt(2), sum(lo^2) = 1,
// hi[k] = (-1)^k lo[L-1-k].
struct WaveletFilters {
  std::string name;
  std::vector<double> lo;
  std::vector<double> hi;
};

// "db4" (8 taps, 4 vanishing moments) or "haar".
WaveletFilters wavelet_filters(std::string_view name);

// Orthonormal DCT-II matrix C (n x n), C(k, i) = c_k cos(pi (2i+1) k / 2n).
Eigen::MatrixXd dct_matrix(std::size_t n);

// Undecimated 2-D wavelet transform (a trous), periodic boundary.
//
// Each level filters the running approximation along v then u with the
// filters dilated by 2^j and scaled by 1/sqrt(2), so the full stack is a
// Parseval frame: adjoint(forward(x)) = x. Output bands, each n_u*n_v:
//   level 0: LH HL HH, level 1: LH HL HH, ..., then the final LL.
// (first letter: filter along u, second: along v.)
class Udwt2 {
 public:
  Udwt2(std::size_t n_u, std::size_t n_v, WaveletFilters filters, std::size_t levels);

  std::size_t n_u() const { return n_u_; }
  std::size_t n_v() const { return n_v_; }
  std::size_t levels() const { return levels_; }
  std::size_t band_count() const { return 3 * levels_ + 1; }
  std::size_t band_size() const { return n_u_ * n_v_; }
  std::size_t output_size() const { return band_count() * band_size(); }
  const WaveletFilters& filters() const { return filters_; }

  // 1-based dilation level of each band; the final LL reports `levels`.
  std::size_t band_level(std::size_t band) const;
  std::string band_name(std::size_t band) const;

  void forward(std::span<const double> image, std::span<double> coeffs) const;
  void adjoint(std::span<const double> coeffs, std::span<double> image) const;

 private:
  std::size_t n_u_, n_v_, levels_;
  WaveletFilters filters_;
  std::vector<double> lo_, hi_;  // scaled by 1/sqrt(2)
};

}  // namespace mscs
