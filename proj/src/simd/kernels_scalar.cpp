#include <cmath>

#include "mscs/simd.hpp"

namespace mscs::simd {
namespace {

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(std::size_t n, double a, const double* x, double b, const double* y,
           double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dist_sq(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double weighted_abs_sum(std::size_t n, const double* x, const double* w) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(w[i] * x[i]);
  return s;
}

void soft_threshold(std::size_t n, const double* v, const double* w, double t,
                    double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::fabs(v[i]) - t * w[i];
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
}

void clamp(std::size_t n, const double* v, double lo, double hi, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v[i] < lo ? lo : v[i];
    out[i] = x > hi ? hi : x;
  }
}

void cmul(std::size_t n, const double* a, const double* b, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
}

void cmul_conj_acc(std::size_t n, const double* a, const double* b, double* acc) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    acc[2 * i] += ar * br + ai * bi;
    acc[2 * i + 1] += ar * bi - ai * br;
  }
}

void abs2_acc(std::size_t n, const double* a, double* acc) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1];
  }
}

void cscale(std::size_t n, const double* z, const double* d, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = z[2 * i] * d[i];
    out[2 * i + 1] = z[2 * i + 1] * d[i];
  }
}

constexpr KernelTable kScalar = {
    "scalar", axpy, axpby,   dot,           dist_sq,  weighted_abs_sum, soft_threshold,
    clamp,    cmul, cmul_conj_acc, abs2_acc, cscale};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace mscs::simd
