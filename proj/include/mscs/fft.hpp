#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mscs {

using cplx = std::complex<double>;

// Real 2-D DFT of a rows x cols array (row-major) via FFTW r2c/c2r.
//
// The half spectrum has rows x (cols/2 + 1) bins. Neither direction is
// normalized: inverse(forward(x)) = rows*cols*x. Plans use FFTW_ESTIMATE so
// results are identical from run to run.
// Smallest size >= n whose prime factors are all 2, 3, 5 or 7.
std::size_t good_fft_size(std::size_t n);

class Fft2 {
 public:
  Fft2(std::size_t rows, std::size_t cols);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }
  std::size_t half_cols() const { return cols_ / 2 + 1; }
  std::size_t spectrum_size() const { return rows_ * half_cols(); }

  void forward(std::span<const double> in, std::span<cplx> out) const;
  // `in` is left untouched (copied to scratch; c2r destroys its input).
  void inverse(std::span<const cplx> in, std::span<double> out) const;

  // Multiplicity of each half-spectrum bin in the full spectrum (1 or 2),
  // so that sum_full |X|^2 = sum_half weight * |X|^2.
  double bin_weight(std::size_t col) const {
    return (col == 0 || (cols_ % 2 == 0 && col == cols_ / 2)) ? 1.0 : 2.0;
  }

 private:
  std::size_t rows_, cols_;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
};

}  // namespace mscs
