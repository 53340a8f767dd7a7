#pragma once

// Reference implementations used only by the tests. They are written from
// the model definitions with plain loops and dense matrices, and share no
// code with the library beyond the data types.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "mscs/layout.hpp"

namespace oracle {

using Mat = Eigen::MatrixXd;

Mat kron(const Mat& a, const Mat& b);

double lanczos(double t, int a);
// n_dst x n_src, pixel-centre alignment, clamped taps, rows summing to 1.
Mat lanczos_matrix(std::size_t n_src, std::size_t n_dst, int a);

// Orthonormal DCT-II from the cosine formula.
Mat dct(std::size_t n);

// Sensor readings in pixel order: y[p] = (Up x_band(p))[p].
Mat msvi_matrix(std::size_t n_u, std::size_t n_v, std::size_t n_bands,
                const mscs::SensorLayout& layout, int a);

// out (s_u-n_u+1) x (s_v-n_v+1), out[i][j] = sum S[i+n_u-1-a][j+n_v-1-b] X[a][b]
std::vector<double> valid_convolve(std::span<const double> s, std::size_t s_u, std::size_t s_v,
                                   std::span<const double> x, std::size_t n_u, std::size_t n_v);

// Rows ordered (snapshot, pixel); pattern(p, band) is s_u x s_v.
template <class PatternFn>
Mat msrc_matrix(std::size_t n_u, std::size_t n_v, std::size_t n_bands, std::size_t snapshots,
                const mscs::SensorLayout& layout, std::size_t s_u, std::size_t s_v,
                PatternFn pattern) {
  const std::size_t m_u = s_u - n_u + 1, m_v = s_v - n_v + 1;
  const std::size_t px = m_u * m_v, n = n_u * n_v;
  Mat phi = Mat::Zero(snapshots * px, n_bands * n);
  for (std::size_t p = 0; p < snapshots; ++p) {
    for (std::size_t i = 0; i < m_u; ++i) {
      for (std::size_t j = 0; j < m_v; ++j) {
        const std::size_t b = layout.band_at(i, j);
        const std::vector<double>& s = pattern(p, b);
        for (std::size_t a = 0; a < n_u; ++a) {
          for (std::size_t c = 0; c < n_v; ++c) {
            phi(p * px + i * m_v + j, b * n + a * n_v + c) =
                s[(i + n_u - 1 - a) * s_v + (j + n_v - 1 - c)];
          }
        }
      }
    }
  }
  return phi;
}

// Centred s x s crop of the full 2-D convolution of a pattern with a
// (2h+1) x (2h+1) kernel.
std::vector<double> blur_pattern(std::span<const double> pattern, std::size_t s_u,
                                 std::size_t s_v, std::span<const double> kernel,
                                 std::size_t size);

// Integral of sinc^2(x / z) over [p - 1/2, p + 1/2] by composite Simpson.
double sinc2_cell(double p, double z, std::size_t intervals = 4000);

// Circular filter along one axis, dilated: (C x)[j] = sum_k f[k] x[j - k d].
Mat circular_filter(std::size_t n, std::span<const double> f, std::size_t d);

// Parseval UDWT with the LL band passed through a 2-D DCT, bands stacked
// (LH HL HH per level, then LL), rows (band, u, v).
Mat spatial_frame(std::size_t n_u, std::size_t n_v, std::span<const double> lo,
                  std::span<const double> hi, std::size_t levels);

// kron(C_lambda, spatial_frame): coefficient rows (spectral, band, pixel).
Mat analysis_frame(std::size_t n_u, std::size_t n_v, std::size_t n_bands,
                   std::span<const double> lo, std::span<const double> hi, std::size_t levels);

double spectral_norm(const Mat& m);

}  // namespace oracle
