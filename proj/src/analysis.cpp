#include "mscs/analysis.hpp"

#include <cmath>

#include "mscs/errors.hpp"
#include "mscs/simd.hpp"

namespace mscs {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

Vec tight_frame_weights(const Udwt2& udwt, std::string_view mode) {
  Vec w(udwt.band_count(), 1.0);
  if (mode == "identity") return w;
  if (mode == "atrous") {
    for (std::size_t b = 0; b < w.size(); ++b) {
      w[b] = std::ldexp(1.0, static_cast<int>(udwt.band_level(b)));
    }
    return w;
  }
  if (mode == "balanced") {
    for (std::size_t b = 0; b < w.size(); ++b) {
      w[b] = std::ldexp(1.0, -static_cast<int>(udwt.band_level(b)));
    }
    return w;
  }
  throw ConfigError("unknown prior weights '" + std::string(mode) +
                    "' (expected balanced, identity or atrous)");
}

AnalysisTransform::AnalysisTransform(std::size_t n_u, std::size_t n_v, std::size_t n_bands,
                                     AnalysisOptions options)
    : LinearOperator(n_u * n_v * n_bands * (3 * options.levels + 1), n_u * n_v * n_bands),
      n_bands_(n_bands),
      options_(std::move(options)),
      udwt_(n_u, n_v, wavelet_filters(options_.wavelet), options_.levels),
      c_u_(dct_matrix(n_u)),
      c_v_(dct_matrix(n_v)),
      c_l_(dct_matrix(n_bands)) {
  const Vec bw = tight_frame_weights(udwt_, options_.weights);
  weights_.resize(rows());
  const std::size_t bs = udwt_.band_size();
  for (std::size_t l = 0; l < n_bands_; ++l) {
    for (std::size_t b = 0; b < bw.size(); ++b) {
      const std::size_t off = (l * bw.size() + b) * bs;
      std::fill_n(weights_.begin() + static_cast<std::ptrdiff_t>(off), bs, bw[b]);
    }
  }
}

void AnalysisTransform::spatial_forward(std::span<const double> image,
                                        std::span<double> coeffs) const {
  udwt_.forward(image, coeffs);
  auto ll = coeffs.subspan(3 * udwt_.levels() * udwt_.band_size(), udwt_.band_size());
  RowMap m(ll.data(), n_u(), n_v());
  RowMat t = c_u_ * m * c_v_.transpose();
  m = t;
}

void AnalysisTransform::spatial_adjoint(std::span<const double> coeffs,
                                        std::span<double> image) const {
  std::vector<double> tmp(coeffs.begin(), coeffs.end());
  auto ll = std::span<double>(tmp).subspan(3 * udwt_.levels() * udwt_.band_size(),
                                           udwt_.band_size());
  RowMap m(ll.data(), n_u(), n_v());
  RowMat t = c_u_.transpose() * m * c_v_;
  m = t;
  udwt_.adjoint(tmp, image);
}

void AnalysisTransform::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  const std::size_t np = n_u() * n_v();
  RowMat spec = c_l_ * ConstRowMap(x.data(), n_bands_, np);
  const std::size_t per = udwt_.output_size();
  for (std::size_t l = 0; l < n_bands_; ++l) {
    spatial_forward(std::span<const double>(spec.data() + l * np, np), y.subspan(l * per, per));
  }
}

void AnalysisTransform::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  const std::size_t np = n_u() * n_v();
  const std::size_t per = udwt_.output_size();
  RowMat spec(n_bands_, np);
  for (std::size_t l = 0; l < n_bands_; ++l) {
    spatial_adjoint(z.subspan(l * per, per), std::span<double>(spec.data() + l * np, np));
  }
  RowMap(x.data(), n_bands_, np) = c_l_.transpose() * spec;
}

double AnalysisTransform::weighted_l1(std::span<const double> x) const {
  const Vec c = apply(x);
  return simd::weighted_abs_sum(c, weights_);
}

ExtendedAnalysis::ExtendedAnalysis(std::shared_ptr<const AnalysisTransform> a,
                                   std::shared_ptr<const RestrictionOp> r_n)
    : LinearOperator(a->rows() + (r_n->cols() - r_n->rows()), r_n->cols()),
      a_(std::move(a)),
      r_n_(std::move(r_n)) {
  if (r_n_->rows() != a_->cols()) {
    throw ConfigError("extended analysis: R_n keeps " + std::to_string(r_n_->rows()) +
                      " entries but the transform expects " + std::to_string(a_->cols()));
  }
  comp_ = r_n_->complement_indices();
  weights_ = a_->weights();
  weights_.resize(rows(), 0.0);
}

void ExtendedAnalysis::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  Vec inner(a_->cols());
  r_n_->apply_into(x, inner);
  a_->apply_into(inner, y.first(a_->rows()));
  auto tail = y.subspan(a_->rows());
  for (std::size_t i = 0; i < comp_.size(); ++i) tail[i] = x[comp_[i]];
}

void ExtendedAnalysis::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  Vec inner(a_->cols());
  a_->adjoint_into(z.first(a_->rows()), inner);
  r_n_->adjoint_into(inner, x);
  auto tail = z.subspan(a_->rows());
  for (std::size_t i = 0; i < comp_.size(); ++i) x[comp_[i]] = tail[i];
}

double ExtendedAnalysis::weighted_l1(std::span<const double> xbar) const {
  const Vec c = apply(xbar);
  return simd::weighted_abs_sum(c, weights_);
}

}  // namespace mscs
