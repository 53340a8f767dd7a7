#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "mscs/sensing.hpp"

namespace mscs {

// Lanczos window sinc(t) sinc(t/a) on |t| < a.
double lanczos_kernel(double t, int a);

// 1-D Lanczos resampling from n_src to n_dst samples. Target sample i sits at
// source coordinate (i + 0.5) n_src / n_dst - 0.5 (pixel centres aligned);
// taps falling outside the source are clamped to the edge, and each row is
// renormalized to sum to 1.
class Lanczos1d {
 public:
  Lanczos1d(std::size_t n_src, std::size_t n_dst, int order = 3);

  std::size_t n_src() const { return n_src_; }
  std::size_t n_dst() const { return rows_.size(); }
  bool is_identity() const { return n_src_ == rows_.size(); }

  struct Row {
    std::size_t first = 0;
    std::vector<double> w;
  };
  const Row& row(std::size_t i) const { return rows_[i]; }
  Eigen::MatrixXd dense() const;

 private:
  std::size_t n_src_;
  std::vector<Row> rows_;
};

// Separable 2-D Lanczos upsampling, (n_u x n_v) -> (m_u x m_v), row-major images.
class UpsamplingOp final : public LinearOperator {
 public:
  UpsamplingOp(std::size_t n_u, std::size_t n_v, std::size_t m_u, std::size_t m_v,
               int order = 3);

  const Lanczos1d& axis_u() const { return lu_; }
  const Lanczos1d& axis_v() const { return lv_; }
  bool is_identity() const { return lu_.is_identity() && lv_.is_identity(); }

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return is_identity() ? OpKind::identity : OpKind::dense; }
  std::string name() const override { return "lanczos-up"; }

 private:
  Lanczos1d lu_, lv_;
};

// Volume-inpainting sensor: Phi_l = M_l Up.
//   Phibar = bdiag_{n_bands}(Up), R_m = the stacked band masks, R_n = Id.
class MsviSensing final : public ExtendedSensing {
 public:
  MsviSensing(std::size_t n_u, std::size_t n_v, std::size_t n_bands, SensorLayout layout,
              int lanczos_order = 3);

  std::size_t n_u() const override { return n_u_; }
  std::size_t n_v() const override { return n_v_; }
  std::size_t n_bands() const override { return n_bands_; }
  std::size_t m_u() const override { return layout_.m_u(); }
  std::size_t m_v() const override { return layout_.m_v(); }
  std::size_t snapshots() const override { return 1; }
  const SensorLayout& layout() const override { return layout_; }

  std::shared_ptr<const UpsamplingOp> up() const { return up_; }
  OperatorPtr phi_bar() const override { return phi_bar_; }
  std::shared_ptr<const RestrictionOp> r_m() const override { return r_m_; }
  std::shared_ptr<const RestrictionOp> r_n() const override { return r_n_; }

  // Up^* Up = G_u (x) G_v is inverted exactly through the eigendecompositions
  // of the two small Gram matrices.
  void normal_inverse(std::span<const double> v, double mu, std::span<double> out) const override;
  double phi_bar_norm() const override { return norm_; }
  Vec lift_sensor_cubes(std::span<const double> cubes) const override;

  std::uint64_t fingerprint() const override { return fingerprint_; }
  std::string describe() const override;

 private:
  std::size_t n_u_, n_v_, n_bands_;
  int order_;
  SensorLayout layout_;
  std::shared_ptr<const UpsamplingOp> up_;
  OperatorPtr phi_bar_;
  std::shared_ptr<const RestrictionOp> r_m_, r_n_;
  Eigen::MatrixXd q_u_, q_v_;
  Eigen::VectorXd e_u_, e_v_;
  double norm_ = 1.0;
  std::uint64_t fingerprint_ = 0;
};

}  // namespace mscs
