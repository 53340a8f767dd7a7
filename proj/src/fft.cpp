#include "mscs/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <vector>

#include "mscs/errors.hpp"

namespace mscs {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx>& scratch(std::size_t n) {
  thread_local std::vector<cplx> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

Fft2::Fft2(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw ConfigError("Fft2: empty grid");
  std::vector<double> r(size());
  std::vector<cplx> c(spectrum_size());
  auto* cr = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_r2c_ = fftw_plan_dft_r2c_2d(static_cast<int>(rows), static_cast<int>(cols), r.data(), cr,
                                   flags);
  plan_c2r_ = fftw_plan_dft_c2r_2d(static_cast<int>(rows), static_cast<int>(cols), cr, r.data(),
                                   flags);
  if (!plan_r2c_ || !plan_c2r_) throw ConfigError("FFTW planning failed");
}

Fft2::~Fft2() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

void Fft2::forward(std::span<const double> in, std::span<cplx> out) const {
  if (in.size() != size() || out.size() != spectrum_size()) {
    throw ConfigError("Fft2::forward: size mismatch");
  }
  // r2c does not write to its input; FFTW's signature is just not const.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft2::inverse(std::span<const cplx> in, std::span<double> out) const {
  if (in.size() != spectrum_size() || out.size() != size()) {
    throw ConfigError("Fft2::inverse: size mismatch");
  }
  auto& buf = scratch(in.size());
  std::copy(in.begin(), in.end(), buf.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                       reinterpret_cast<fftw_complex*>(buf.data()), out.data());
}

std::size_t good_fft_size(std::size_t n) {
  for (std::size_t k = std::max<std::size_t>(n, 1);; ++k) {
    std::size_t r = k;
    for (std::size_t f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return k;
  }
}

}  // namespace mscs
