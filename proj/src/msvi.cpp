#include "mscs/msvi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mscs/errors.hpp"
#include "mscs/simd.hpp"

namespace mscs {

double lanczos_kernel(double t, int a) {
  const double at = std::fabs(t);
  if (at >= a) return 0.0;
  if (t == 0.0) return 1.0;
  if (at == std::round(at)) return 0.0;  // exact zeros at nonzero integers
  const double pt = std::numbers::pi * t;
  return a * std::sin(pt) * std::sin(pt / a) / (pt * pt);
}

Lanczos1d::Lanczos1d(std::size_t n_src, std::size_t n_dst, int order) : n_src_(n_src) {
  if (n_src == 0 || n_dst == 0) throw ConfigError("Lanczos1d: empty axis");
  if (order < 1) throw ConfigError("Lanczos order must be >= 1");
  rows_.resize(n_dst);
  const double scale = static_cast<double>(n_src) / static_cast<double>(n_dst);
  const long last = static_cast<long>(n_src) - 1;
  for (std::size_t i = 0; i < n_dst; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * scale - 0.5;
    const long base = static_cast<long>(std::floor(t));
    std::vector<double> acc(n_src, 0.0);
    long lo = last, hi = 0;
    for (long k = base - order + 1; k <= base + order; ++k) {
      const double w = lanczos_kernel(t - static_cast<double>(k), order);
      if (w == 0.0) continue;
      const long kc = std::clamp(k, 0L, last);
      acc[static_cast<std::size_t>(kc)] += w;
      lo = std::min(lo, kc);
      hi = std::max(hi, kc);
    }
    Row& r = rows_[i];
    r.first = static_cast<std::size_t>(lo);
    r.w.assign(acc.begin() + lo, acc.begin() + hi + 1);
    const double s = std::accumulate(r.w.begin(), r.w.end(), 0.0);
    for (double& w : r.w) w /= s;
  }
}

Eigen::MatrixXd Lanczos1d::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_dst(), n_src_);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (std::size_t k = 0; k < rows_[i].w.size(); ++k) m(i, rows_[i].first + k) = rows_[i].w[k];
  }
  return m;
}

UpsamplingOp::UpsamplingOp(std::size_t n_u, std::size_t n_v, std::size_t m_u, std::size_t m_v,
                           int order)
    : LinearOperator(m_u * m_v, n_u * n_v), lu_(n_u, m_u, order), lv_(n_v, m_v, order) {}

void UpsamplingOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  if (is_identity()) {
    std::copy(x.begin(), x.end(), y.begin());
    return;
  }
  const std::size_t n_u = lu_.n_src(), n_v = lv_.n_src();
  const std::size_t m_u = lu_.n_dst(), m_v = lv_.n_dst();
  // along v: tmp (n_u x m_v)
  std::vector<double> tmp(n_u * m_v);
  for (std::size_t u = 0; u < n_u; ++u) {
    const double* src = x.data() + u * n_v;
    double* dst = tmp.data() + u * m_v;
    for (std::size_t j = 0; j < m_v; ++j) {
      const auto& r = lv_.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < r.w.size(); ++k) s += r.w[k] * src[r.first + k];
      dst[j] = s;
    }
  }
  // along u: whole rows
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < m_u; ++i) {
    const auto& r = lu_.row(i);
    auto out = y.subspan(i * m_v, m_v);
    for (std::size_t k = 0; k < r.w.size(); ++k) {
      simd::axpy(r.w[k], std::span<const double>(tmp).subspan((r.first + k) * m_v, m_v), out);
    }
  }
}

void UpsamplingOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  if (is_identity()) {
    std::copy(z.begin(), z.end(), x.begin());
    return;
  }
  const std::size_t n_u = lu_.n_src(), n_v = lv_.n_src();
  const std::size_t m_u = lu_.n_dst(), m_v = lv_.n_dst();
  std::vector<double> tmp(n_u * m_v, 0.0);
  for (std::size_t i = 0; i < m_u; ++i) {
    const auto& r = lu_.row(i);
    auto in = z.subspan(i * m_v, m_v);
    for (std::size_t k = 0; k < r.w.size(); ++k) {
      simd::axpy(r.w[k], in, std::span<double>(tmp).subspan((r.first + k) * m_v, m_v));
    }
  }
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t u = 0; u < n_u; ++u) {
    const double* src = tmp.data() + u * m_v;
    double* dst = x.data() + u * n_v;
    for (std::size_t j = 0; j < m_v; ++j) {
      const auto& r = lv_.row(j);
      for (std::size_t k = 0; k < r.w.size(); ++k) dst[r.first + k] += r.w[k] * src[j];
    }
  }
}

MsviSensing::MsviSensing(std::size_t n_u, std::size_t n_v, std::size_t n_bands,
                         SensorLayout layout, int lanczos_order)
    : n_u_(n_u), n_v_(n_v), n_bands_(n_bands), order_(lanczos_order), layout_(std::move(layout)) {
  if (layout_.n_bands() != n_bands_) {
    throw ConfigError("layout has " + std::to_string(layout_.n_bands()) + " bands, scene has " +
                      std::to_string(n_bands_));
  }
  if (layout_.m_u() < n_u_ || layout_.m_v() < n_v_) {
    throw ConfigError("MSVI needs a sensor at least as large as the scene");
  }
  up_ = std::make_shared<UpsamplingOp>(n_u_, n_v_, layout_.m_u(), layout_.m_v(), order_);
  phi_bar_ = block_diag_repeat(up_, n_bands_);

  const std::size_t px = layout_.pixels();
  std::vector<std::size_t> kept(px);
  for (std::size_t p = 0; p < px; ++p) kept[p] = layout_.band_of(p) * px + p;
  r_m_ = restriction(n_bands_ * px, std::move(kept));
  std::vector<std::size_t> all(n());
  std::iota(all.begin(), all.end(), std::size_t{0});
  r_n_ = restriction(n(), std::move(all));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> su(up_->axis_u().dense().transpose() *
                                                    up_->axis_u().dense());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sv(up_->axis_v().dense().transpose() *
                                                    up_->axis_v().dense());
  q_u_ = su.eigenvectors();
  e_u_ = su.eigenvalues();
  q_v_ = sv.eigenvectors();
  e_v_ = sv.eigenvalues();
  norm_ = up_->is_identity() ? 1.0 : std::sqrt(e_u_.maxCoeff() * e_v_.maxCoeff());

  Fingerprint fp;
  fp.add("msvi", 4).add_value(n_u_).add_value(n_v_).add_value(n_bands_).add_value(order_);
  fp.add_value(layout_.m_u()).add_value(layout_.m_v());
  fp.add(layout_.band_of_pixel().data(), layout_.band_of_pixel().size() * sizeof(std::uint16_t));
  fingerprint_ = fp.value();
}

void MsviSensing::normal_inverse(std::span<const double> v, double mu,
                                 std::span<double> out) const {
  if (!(mu > 0.0)) throw ConfigError("normal_inverse needs mu > 0");
  if (v.size() != n() || out.size() != n()) throw ConfigError("normal_inverse: size mismatch");
  if (up_->is_identity()) {
    const double s = 1.0 / (1.0 + mu);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
    return;
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::size_t bs = n_u_ * n_v_;
  for (std::size_t l = 0; l < n_bands_; ++l) {
    Eigen::Map<const RowMat> vb(v.data() + l * bs, n_u_, n_v_);
    RowMat t = q_u_.transpose() * vb * q_v_;
    for (std::size_t i = 0; i < n_u_; ++i) {
      for (std::size_t j = 0; j < n_v_; ++j) t(i, j) /= e_u_(i) * e_v_(j) + mu;
    }
    Eigen::Map<RowMat>(out.data() + l * bs, n_u_, n_v_) = q_u_ * t * q_v_.transpose();
  }
}

Vec MsviSensing::lift_sensor_cubes(std::span<const double> cubes) const {
  if (cubes.size() != m_bar()) throw ConfigError("lift_sensor_cubes: size mismatch");
  return Vec(cubes.begin(), cubes.end());
}

std::string MsviSensing::describe() const {
  std::ostringstream os;
  os << "msvi " << n_u_ << "x" << n_v_ << "x" << n_bands_ << " -> " << m_u() << "x" << m_v()
     << " " << to_string(layout_.kind()) << " lanczos" << order_;
  return os.str();
}

}  // namespace mscs
