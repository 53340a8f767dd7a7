// AVX2/FMA variants of the kernels in kernels_scalar.cpp. This translation
// unit is compiled with -mavx2 -mfma and only reached after a CPU check.

#include <immintrin.h>

#include <cmath>

#include "mscs/simd.hpp"

namespace mscs::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

const __m256d kSignMask = _mm256_set1_pd(-0.0);

void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void axpby(std::size_t n, double a, const double* x, double b, const double* y,
           double* out) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = std::fma(a, x[i], b * y[i]);
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dist_sq(std::size_t n, const double* x, const double* y) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
    s1 = _mm256_fmadd_pd(d1, d1, s1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double weighted_abs_sum(std::size_t n, const double* x, const double* w) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(w + i));
    s = _mm256_add_pd(s, _mm256_andnot_pd(kSignMask, p));
  }
  double r = hsum(s);
  for (; i < n; ++i) r += std::fabs(w[i] * x[i]);
  return r;
}

void soft_threshold(std::size_t n, const double* v, const double* w, double t,
                    double* out) {
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d mag =
        _mm256_fnmadd_pd(vt, _mm256_loadu_pd(w + i), _mm256_andnot_pd(kSignMask, x));
    const __m256d keep = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(kSignMask, x));
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, signed_mag));
  }
  for (; i < n; ++i) {
    const double mag = std::fma(-t, w[i], std::fabs(v[i]));
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
}

void clamp(std::size_t n, const double* v, double lo, double hi, double* out) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(v + i), vlo), vhi));
  }
  for (; i < n; ++i) {
    const double x = v[i] < lo ? lo : v[i];
    out[i] = x > hi ? hi : x;
  }
}

void cmul(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    const __m256d re = _mm256_movedup_pd(va);
    const __m256d im = _mm256_permute_pd(va, 0xF);
    const __m256d sw = _mm256_permute_pd(vb, 0x5);
    _mm256_storeu_pd(out + 2 * i, _mm256_fmaddsub_pd(re, vb, _mm256_mul_pd(im, sw)));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = std::fma(ar, br, -ai * bi);
    out[2 * i + 1] = std::fma(ar, bi, ai * br);
  }
}

void cmul_conj_acc(std::size_t n, const double* a, const double* b, double* acc) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    const __m256d re = _mm256_movedup_pd(va);
    const __m256d im = _mm256_permute_pd(va, 0xF);
    const __m256d sw = _mm256_permute_pd(vb, 0x5);
    const __m256d prod = _mm256_fmsubadd_pd(re, vb, _mm256_mul_pd(im, sw));
    _mm256_storeu_pd(acc + 2 * i, _mm256_add_pd(_mm256_loadu_pd(acc + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    acc[2 * i] += std::fma(ar, br, ai * bi);
    acc[2 * i + 1] += std::fma(ar, bi, -ai * br);
  }
}

void abs2_acc(std::size_t n, const double* a, double* acc) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(a + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(a + 2 * i + 4);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    const __m256d ordered = _mm256_permute4x64_pd(h, 0xD8);  // lanes 0,2,1,3
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), ordered));
  }
  for (; i < n; ++i) acc[i] += a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1];
}

void cscale(std::size_t n, const double* z, const double* d, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vd = _mm256_loadu_pd(d + i);
    const __m256d d01 = _mm256_permute4x64_pd(vd, 0x50);
    const __m256d d23 = _mm256_permute4x64_pd(vd, 0xFA);
    _mm256_storeu_pd(out + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(z + 2 * i), d01));
    _mm256_storeu_pd(out + 2 * i + 4, _mm256_mul_pd(_mm256_loadu_pd(z + 2 * i + 4), d23));
  }
  for (; i < n; ++i) {
    out[2 * i] = z[2 * i] * d[i];
    out[2 * i + 1] = z[2 * i + 1] * d[i];
  }
}

constexpr KernelTable kAvx2 = {
    "avx2", axpy, axpby,   dot,           dist_sq,  weighted_abs_sum, soft_threshold,
    clamp,  cmul, cmul_conj_acc, abs2_acc, cscale};

}  // namespace

const KernelTable& avx2_table_unchecked() { return kAvx2; }

}  // namespace mscs::simd
