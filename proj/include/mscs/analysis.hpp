#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <string>

#include "mscs/linop.hpp"
#include "mscs/wavelet.hpp"

namespace mscs {

struct AnalysisOptions {
  std::string wavelet = "db4";
  std::size_t levels = 3;
  // "identity": unit weights on the Parseval frame.
  // "atrous": weights 2^level, i.e. the same transform built from the
  // unscaled orthonormal filters.
  // "balanced": weights 2^-level. A level-j band holds 4^j shifted copies of
  // the decimated DWT band, each shrunk by 2^j, so this matches the l1 cost
  // of the orthonormal DWT averaged over shifts.
  std::string weights = "balanced";
};

// Per-band weights for a Parseval UDWT stack under the given mode.
Vec tight_frame_weights(const Udwt2& udwt, std::string_view mode);

// The normalized spatio-spectral frame: orthonormal DCT along the bands,
// then per band the Parseval UDWT whose final approximation band is passed
// through an orthonormal 2-D DCT. Tight: adjoint(apply(x)) = x.
//
// Coefficients are laid out spectral coefficient outer, then wavelet band,
// then pixel (row-major). The full weighted transform is diag(weights()) * this.
class AnalysisTransform final : public LinearOperator {
 public:
  AnalysisTransform(std::size_t n_u, std::size_t n_v, std::size_t n_bands,
                    AnalysisOptions options = {});

  std::size_t n_u() const { return udwt_.n_u(); }
  std::size_t n_v() const { return udwt_.n_v(); }
  std::size_t n_bands() const { return n_bands_; }
  const Udwt2& udwt() const { return udwt_; }
  const AnalysisOptions& options() const { return options_; }

  // Omega, one entry per coefficient.
  const Vec& weights() const { return weights_; }
  // ||Omega Atilde x||_1
  double weighted_l1(std::span<const double> x) const;

  // Spatial part only, on one image: n_u*n_v -> band_count*n_u*n_v.
  void spatial_forward(std::span<const double> image, std::span<double> coeffs) const;
  void spatial_adjoint(std::span<const double> coeffs, std::span<double> image) const;
  const Eigen::MatrixXd& spectral_dct() const { return c_l_; }

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::composite; }
  std::string name() const override { return "analysis"; }

 private:
  std::size_t n_bands_;
  AnalysisOptions options_;
  Udwt2 udwt_;
  Eigen::MatrixXd c_u_, c_v_, c_l_;
  Vec weights_;
};

// Extended analysis on the padded variable: [Atilde R_n ; R_n^c], with
// weights [Omega ; 0]. Tight whenever Atilde is.
class ExtendedAnalysis final : public LinearOperator {
 public:
  ExtendedAnalysis(std::shared_ptr<const AnalysisTransform> a,
                   std::shared_ptr<const RestrictionOp> r_n);

  const AnalysisTransform& base() const { return *a_; }
  const RestrictionOp& r_n() const { return *r_n_; }
  const Vec& weights() const { return weights_; }
  double weighted_l1(std::span<const double> xbar) const;

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::composite; }
  std::string name() const override { return "extended-analysis"; }

 private:
  std::shared_ptr<const AnalysisTransform> a_;
  std::shared_ptr<const RestrictionOp> r_n_;
  std::vector<std::size_t> comp_;
  Vec weights_;
};

}  // namespace mscs
