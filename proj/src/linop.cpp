#include "mscs/linop.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mscs/errors.hpp"
#include "mscs/random.hpp"
#include "mscs/simd.hpp"

namespace mscs {

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::identity: return "identity";
    case OpKind::dense: return "dense";
    case OpKind::diagonal: return "diagonal";
    case OpKind::restriction: return "restriction";
    case OpKind::block_diagonal: return "block-diagonal";
    case OpKind::dft_diagonalized: return "dft-diagonalized";
    case OpKind::composite: return "composite";
  }
  return "?";
}

Vec LinearOperator::apply(std::span<const double> x) const {
  Vec y(rows());
  apply_into(x, y);
  return y;
}

Vec LinearOperator::apply_adjoint(std::span<const double> z) const {
  Vec x(cols());
  adjoint_into(z, x);
  return x;
}

void LinearOperator::check_apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw ConfigError(name() + ": apply expects " + std::to_string(cols_) + " -> " +
                      std::to_string(rows_) + ", got " + std::to_string(x.size()) +
                      " -> " + std::to_string(y.size()));
  }
}

void LinearOperator::check_adjoint(std::span<const double> z, std::span<double> x) const {
  if (z.size() != rows_ || x.size() != cols_) {
    throw ConfigError(name() + ": adjoint expects " + std::to_string(rows_) + " -> " +
                      std::to_string(cols_) + ", got " + std::to_string(z.size()) +
                      " -> " + std::to_string(x.size()));
  }
}

// --- identity / diagonal ---------------------------------------------------

void IdentityOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  std::copy(x.begin(), x.end(), y.begin());
}

void IdentityOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  std::copy(z.begin(), z.end(), x.begin());
}

DiagonalOp::DiagonalOp(Vec d) : LinearOperator(d.size(), d.size()), d_(std::move(d)) {}

void DiagonalOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  for (std::size_t i = 0; i < d_.size(); ++i) y[i] = d_[i] * x[i];
}

void DiagonalOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  for (std::size_t i = 0; i < d_.size(); ++i) x[i] = d_[i] * z[i];
}

// --- restriction -----------------------------------------------------------

RestrictionOp::RestrictionOp(std::size_t n, std::vector<std::size_t> kept)
    : LinearOperator(kept.size(), n), kept_(std::move(kept)) {
  std::vector<char> seen(n, 0);
  for (std::size_t i : kept_) {
    if (i >= n) throw ConfigError("restriction index out of range");
    if (seen[i]) throw ConfigError("restriction indices must be distinct");
    seen[i] = 1;
  }
}

std::vector<std::size_t> RestrictionOp::complement_indices() const {
  std::vector<char> seen(cols(), 0);
  for (std::size_t i : kept_) seen[i] = 1;
  std::vector<std::size_t> out;
  out.reserve(cols() - kept_.size());
  for (std::size_t i = 0; i < cols(); ++i) {
    if (!seen[i]) out.push_back(i);
  }
  return out;
}

RestrictionOp RestrictionOp::complement() const {
  return RestrictionOp(cols(), complement_indices());
}

void RestrictionOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  for (std::size_t i = 0; i < kept_.size(); ++i) y[i] = x[kept_[i]];
}

void RestrictionOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t i = 0; i < kept_.size(); ++i) x[kept_[i]] = z[i];
}

// --- dense -----------------------------------------------------------------

DenseOp::DenseOp(Eigen::MatrixXd m)
    : LinearOperator(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())),
      m_(std::move(m)) {}

void DenseOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  yv.noalias() = m_ * xv;
}

void DenseOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  xv.noalias() = m_.transpose() * zv;
}

// --- scaled / adjoint --------------------------------------------------------

ScaledOp::ScaledOp(double a, OperatorPtr op)
    : LinearOperator(op->rows(), op->cols()), a_(a), op_(std::move(op)) {}

void ScaledOp::apply_into(std::span<const double> x, std::span<double> y) const {
  op_->apply_into(x, y);
  for (double& v : y) v *= a_;
}

void ScaledOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  op_->adjoint_into(z, x);
  for (double& v : x) v *= a_;
}

std::string ScaledOp::name() const { return "scaled(" + op_->name() + ")"; }

AdjointOp::AdjointOp(OperatorPtr op)
    : LinearOperator(op->cols(), op->rows()), op_(std::move(op)) {}

void AdjointOp::apply_into(std::span<const double> x, std::span<double> y) const {
  op_->adjoint_into(x, y);
}

void AdjointOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  op_->apply_into(z, x);
}

// --- composite ---------------------------------------------------------------

namespace {

std::size_t composite_rows(const std::vector<OperatorPtr>& f) {
  if (f.empty()) throw ConfigError("compose needs at least one factor");
  return f.front()->rows();
}

std::size_t composite_cols(const std::vector<OperatorPtr>& f) {
  if (f.empty()) throw ConfigError("compose needs at least one factor");
  return f.back()->cols();
}

}  // namespace

CompositeOp::CompositeOp(std::vector<OperatorPtr> factors)
    : LinearOperator(composite_rows(factors), composite_cols(factors)),
      factors_(std::move(factors)) {
  for (std::size_t i = 0; i + 1 < factors_.size(); ++i) {
    if (factors_[i]->cols() != factors_[i + 1]->rows()) {
      throw ConfigError("compose: inner dimensions differ (" + factors_[i]->name() + " takes " +
                        std::to_string(factors_[i]->cols()) + ", " + factors_[i + 1]->name() +
                        " gives " + std::to_string(factors_[i + 1]->rows()) + ")");
    }
  }
}

void CompositeOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  if (factors_.size() == 1) return factors_[0]->apply_into(x, y);
  Vec cur(x.begin(), x.end()), next;
  for (std::size_t k = factors_.size(); k-- > 1;) {
    next.resize(factors_[k]->rows());
    factors_[k]->apply_into(cur, next);
    cur.swap(next);
  }
  factors_[0]->apply_into(cur, y);
}

void CompositeOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  if (factors_.size() == 1) return factors_[0]->adjoint_into(z, x);
  Vec cur(z.begin(), z.end()), next;
  for (std::size_t k = 0; k + 1 < factors_.size(); ++k) {
    next.resize(factors_[k]->cols());
    factors_[k]->adjoint_into(cur, next);
    cur.swap(next);
  }
  factors_.back()->adjoint_into(cur, x);
}

std::string CompositeOp::name() const {
  std::string s;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += " . ";
    s += factors_[i]->name();
  }
  return "(" + s + ")";
}

// --- block diagonal / stacked --------------------------------------------------

namespace {

std::size_t sum_rows(const std::vector<OperatorPtr>& ops) {
  std::size_t s = 0;
  for (const auto& op : ops) s += op->rows();
  return s;
}

std::size_t sum_cols(const std::vector<OperatorPtr>& ops) {
  std::size_t s = 0;
  for (const auto& op : ops) s += op->cols();
  return s;
}

}  // namespace

BlockDiagOp::BlockDiagOp(std::vector<OperatorPtr> blocks)
    : LinearOperator(sum_rows(blocks), sum_cols(blocks)), blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ConfigError("block_diag needs at least one block");
}

void BlockDiagOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  std::size_t xi = 0, yi = 0;
  for (const auto& b : blocks_) {
    b->apply_into(x.subspan(xi, b->cols()), y.subspan(yi, b->rows()));
    xi += b->cols();
    yi += b->rows();
  }
}

void BlockDiagOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  std::size_t xi = 0, zi = 0;
  for (const auto& b : blocks_) {
    b->adjoint_into(z.subspan(zi, b->rows()), x.subspan(xi, b->cols()));
    xi += b->cols();
    zi += b->rows();
  }
}

StackedOp::StackedOp(std::vector<OperatorPtr> parts)
    : LinearOperator(sum_rows(parts), parts.empty() ? 0 : parts.front()->cols()),
      parts_(std::move(parts)) {
  if (parts_.empty()) throw ConfigError("stack needs at least one operator");
  for (const auto& p : parts_) {
    if (p->cols() != cols()) throw ConfigError("stack: operators differ in input size");
  }
}

void StackedOp::apply_into(std::span<const double> x, std::span<double> y) const {
  check_apply(x, y);
  std::size_t yi = 0;
  for (const auto& p : parts_) {
    p->apply_into(x, y.subspan(yi, p->rows()));
    yi += p->rows();
  }
}

void StackedOp::adjoint_into(std::span<const double> z, std::span<double> x) const {
  check_adjoint(z, x);
  std::fill(x.begin(), x.end(), 0.0);
  Vec tmp(cols());
  std::size_t zi = 0;
  for (const auto& p : parts_) {
    p->adjoint_into(z.subspan(zi, p->rows()), tmp);
    simd::axpy(1.0, tmp, x);
    zi += p->rows();
  }
}

// --- factories -----------------------------------------------------------------

OperatorPtr identity(std::size_t n) { return std::make_shared<IdentityOp>(n); }
OperatorPtr diagonal(Vec d) { return std::make_shared<DiagonalOp>(std::move(d)); }

std::shared_ptr<const RestrictionOp> restriction(std::size_t n, std::vector<std::size_t> kept) {
  return std::make_shared<RestrictionOp>(n, std::move(kept));
}

OperatorPtr dense(Eigen::MatrixXd m) { return std::make_shared<DenseOp>(std::move(m)); }

OperatorPtr scale(double a, OperatorPtr op) {
  return std::make_shared<ScaledOp>(a, std::move(op));
}

OperatorPtr adjoint(OperatorPtr op) { return std::make_shared<AdjointOp>(std::move(op)); }

OperatorPtr compose(OperatorPtr a, OperatorPtr b) {
  if (a->cols() != b->rows()) {
    throw ConfigError("compose: " + a->name() + " takes " + std::to_string(a->cols()) +
                      " but " + b->name() + " gives " + std::to_string(b->rows()));
  }
  auto da = std::dynamic_pointer_cast<const DiagonalOp>(a);
  auto db = std::dynamic_pointer_cast<const DiagonalOp>(b);
  if (da && db) {
    Vec d = da->diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= db->diagonal()[i];
    return diagonal(std::move(d));
  }
  if (a->kind() == OpKind::identity) return b;
  if (b->kind() == OpKind::identity) return a;
  return std::make_shared<CompositeOp>(std::vector<OperatorPtr>{std::move(a), std::move(b)});
}

OperatorPtr compose(std::vector<OperatorPtr> factors) {
  return std::make_shared<CompositeOp>(std::move(factors));
}

OperatorPtr block_diag(std::vector<OperatorPtr> blocks) {
  return std::make_shared<BlockDiagOp>(std::move(blocks));
}

OperatorPtr block_diag_repeat(OperatorPtr op, std::size_t k) {
  if (k == 0) throw ConfigError("block_diag_repeat: k must be >= 1");
  return block_diag(std::vector<OperatorPtr>(k, std::move(op)));
}

OperatorPtr stack(std::vector<OperatorPtr> parts) {
  return std::make_shared<StackedOp>(std::move(parts));
}

// --- diagnostics -----------------------------------------------------------------

double estimate_operator_norm(const LinearOperator& op, std::size_t iterations,
                              std::uint64_t seed) {
  if (op.rows() == 0 || op.cols() == 0) return 0.0;
  Vec x = gaussian_vector(op.cols(), seed);
  Vec y(op.rows());
  double nx = std::sqrt(simd::norm_sq(x));
  double est = 0.0;
  for (std::size_t it = 0; it < std::max<std::size_t>(iterations, 1); ++it) {
    for (double& v : x) v /= nx;
    op.apply_into(x, y);
    est = std::sqrt(simd::norm_sq(y));
    op.adjoint_into(y, x);
    nx = std::sqrt(simd::norm_sq(x));
    if (nx == 0.0) return 0.0;
  }
  // ||A*A x|| for unit x converges to sigma_max^2 from below; est is
  // ||A x|| which converges to sigma_max from below as well. Take the larger.
  return std::max(est, std::sqrt(nx));
}

double adjoint_dot_test(const LinearOperator& op, std::size_t trials, std::uint64_t seed) {
  const double norm = estimate_operator_norm(op, 20, seed ^ 0x9e3779b97f4a7c15ULL);
  double worst = 0.0;
  Vec ax(op.rows()), atz(op.cols());
  for (std::size_t t = 0; t < trials; ++t) {
    const Vec x = gaussian_vector(op.cols(), seed + 2 * t + 1);
    const Vec z = gaussian_vector(op.rows(), seed + 2 * t + 2);
    op.apply_into(x, ax);
    op.adjoint_into(z, atz);
    const double lhs = simd::dot(ax, z);
    const double rhs = simd::dot(x, atz);
    const double denom =
        std::sqrt(simd::norm_sq(x)) * std::sqrt(simd::norm_sq(z)) * (norm > 0.0 ? norm : 1.0);
    worst = std::max(worst, denom > 0.0 ? std::fabs(lhs - rhs) / denom : std::fabs(lhs - rhs));
  }
  return worst;
}

Eigen::MatrixXd materialize(const LinearOperator& op, std::size_t max_entries) {
  if (op.rows() * op.cols() > max_entries) {
    throw ConfigError("materialize: " + std::to_string(op.rows()) + "x" +
                      std::to_string(op.cols()) + " exceeds the entry budget");
  }
  Eigen::MatrixXd m(op.rows(), op.cols());
  Vec e(op.cols(), 0.0), col(op.rows());
  for (std::size_t j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    op.apply_into(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < op.rows(); ++i) m(i, j) = col[i];
  }
  return m;
}

namespace {

double to_le(double v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[8];
    std::memcpy(b, &v, 8);
    std::reverse(b, b + 8);
    std::memcpy(&v, b, 8);
  }
  return v;
}

}  // namespace

void write_dense_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  os << "msmat " << m.rows() << ' ' << m.cols() << '\n';
  std::vector<double> buf(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) buf[k++] = to_le(m(i, j));
  }
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!os) throw DataError("short write to " + path.string());
}

Eigen::MatrixXd read_dense_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  std::string tag;
  long rows = -1, cols = -1;
  hs >> tag >> rows >> cols;
  if (tag != "msmat" || rows < 0 || cols < 0) throw DataError("bad matrix header in " + path.string());
  std::vector<double> buf(static_cast<std::size_t>(rows * cols));
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (static_cast<std::size_t>(is.gcount()) != buf.size() * sizeof(double)) {
    throw DataError("truncated matrix in " + path.string());
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = to_le(buf[k++]);
  }
  return m;
}

}  // namespace mscs
