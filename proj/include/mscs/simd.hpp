#pragma once

// Data-parallel inner loops used by the operators and the solver.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is picked once at first use from the
// CPU features; MSCS_SIMD=scalar|avx2 in the environment overrides it.

#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace mscs::simd {

struct KernelTable {
  const char* name;
  // y += a * x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // out = a * x + b * y
  void (*axpby)(std::size_t n, double a, const double* x, double b, const double* y,
                double* out);
  double (*dot)(std::size_t n, const double* x, const double* y);
  // sum (x - y)^2
  double (*dist_sq)(std::size_t n, const double* x, const double* y);
  // sum |w_i x_i|
  double (*weighted_abs_sum)(std::size_t n, const double* x, const double* w);
  // out_i = sign(v_i) max(|v_i| - t w_i, 0)
  void (*soft_threshold)(std::size_t n, const double* v, const double* w, double t,
                         double* out);
  void (*clamp)(std::size_t n, const double* v, double lo, double hi, double* out);
  // Interleaved complex arrays of n elements (2n doubles).
  void (*cmul)(std::size_t n, const double* a, const double* b, double* out);
  // acc += conj(a) * b
  void (*cmul_conj_acc)(std::size_t n, const double* a, const double* b, double* acc);
  // acc_i += |a_i|^2 (acc is real, length n)
  void (*abs2_acc)(std::size_t n, const double* a, double* acc);
  // out_i = z_i * d_i, z complex, d real
  void (*cscale)(std::size_t n, const double* z, const double* d, double* out);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

const KernelTable& active();
// Selects "scalar" or "avx2"; returns false if unavailable.
bool select(std::string_view name);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(x.size(), a, x.data(), y.data());
}
inline void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
                  std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  active().axpby(x.size(), a, x.data(), b, y.data(), out.data());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.size(), x.data(), y.data());
}
inline double norm_sq(std::span<const double> x) { return dot(x, x); }
inline double dist_sq(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dist_sq(x.size(), x.data(), y.data());
}
inline double weighted_abs_sum(std::span<const double> x, std::span<const double> w) {
  assert(x.size() == w.size());
  return active().weighted_abs_sum(x.size(), x.data(), w.data());
}
inline void soft_threshold(std::span<const double> v, std::span<const double> w, double t,
                           std::span<double> out) {
  assert(v.size() == w.size() && v.size() == out.size());
  active().soft_threshold(v.size(), v.data(), w.data(), t, out.data());
}
inline void clamp(std::span<const double> v, double lo, double hi, std::span<double> out) {
  assert(v.size() == out.size());
  active().clamp(v.size(), v.data(), lo, hi, out.data());
}

using cplx = std::complex<double>;

inline const double* raw(std::span<const cplx> z) {
  return reinterpret_cast<const double*>(z.data());
}
inline double* raw(std::span<cplx> z) { return reinterpret_cast<double*>(z.data()); }

inline void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active().cmul(a.size(), raw(a), raw(b), raw(out));
}
inline void cmul_conj_acc(std::span<const cplx> a, std::span<const cplx> b,
                          std::span<cplx> acc) {
  assert(a.size() == b.size() && a.size() == acc.size());
  active().cmul_conj_acc(a.size(), raw(a), raw(b), raw(acc));
}
inline void abs2_acc(std::span<const cplx> a, std::span<double> acc) {
  assert(a.size() == acc.size());
  active().abs2_acc(a.size(), raw(a), acc.data());
}
inline void cscale(std::span<const cplx> z, std::span<const double> d, std::span<cplx> out) {
  assert(z.size() == d.size() && z.size() == out.size());
  active().cscale(z.size(), raw(z), d.data(), raw(out));
}

}  // namespace mscs::simd
