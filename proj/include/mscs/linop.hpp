#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mscs {

using Vec = std::vector<double>;

enum class OpKind {
  identity,
  dense,
  diagonal,
  restriction,
  block_diagonal,
  dft_diagonalized,
  composite,
};

const char* to_string(OpKind kind);

// Real linear map R^cols -> R^rows with an adjoint.
//
// Subclasses implement apply_into/adjoint_into; outputs are fully
// overwritten. Instances are immutable, apply paths are reentrant.
class LinearOperator {
 public:
  LinearOperator(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  virtual ~LinearOperator() = default;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  virtual void apply_into(std::span<const double> x, std::span<double> y) const = 0;
  virtual void adjoint_into(std::span<const double> z, std::span<double> x) const = 0;
  virtual OpKind kind() const = 0;
  virtual std::string name() const { return to_string(kind()); }

  Vec apply(std::span<const double> x) const;
  Vec apply_adjoint(std::span<const double> z) const;

 protected:
  void check_apply(std::span<const double> x, std::span<double> y) const;
  void check_adjoint(std::span<const double> z, std::span<double> x) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class IdentityOp final : public LinearOperator {
 public:
  explicit IdentityOp(std::size_t n) : LinearOperator(n, n) {}
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::identity; }
};

class DiagonalOp final : public LinearOperator {
 public:
  explicit DiagonalOp(Vec d);
  const Vec& diagonal() const { return d_; }
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::diagonal; }

 private:
  Vec d_;
};

// R: R^N -> R^k keeping the listed entries in the listed order.
class RestrictionOp final : public LinearOperator {
 public:
  RestrictionOp(std::size_t n, std::vector<std::size_t> kept);

  const std::vector<std::size_t>& kept() const { return kept_; }
  // Ascending indices not in kept().
  std::vector<std::size_t> complement_indices() const;
  RestrictionOp complement() const;

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::restriction; }

 private:
  std::vector<std::size_t> kept_;
};

class DenseOp final : public LinearOperator {
 public:
  explicit DenseOp(Eigen::MatrixXd m);
  const Eigen::MatrixXd& matrix() const { return m_; }
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::dense; }

 private:
  Eigen::MatrixXd m_;
};

// a * A
class ScaledOp final : public LinearOperator {
 public:
  ScaledOp(double a, OperatorPtr op);
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return op_->kind(); }
  std::string name() const override;

 private:
  double a_;
  OperatorPtr op_;
};

// A*
class AdjointOp final : public LinearOperator {
 public:
  explicit AdjointOp(OperatorPtr op);
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return op_->kind(); }
  std::string name() const override { return op_->name() + "*"; }

 private:
  OperatorPtr op_;
};

// A_1 A_2 ... A_k (rightmost applied first)
class CompositeOp final : public LinearOperator {
 public:
  explicit CompositeOp(std::vector<OperatorPtr> factors);
  const std::vector<OperatorPtr>& factors() const { return factors_; }
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::composite; }
  std::string name() const override;

 private:
  std::vector<OperatorPtr> factors_;
};

// bdiag(A_1, ..., A_k) acting on contiguous input/output segments.
class BlockDiagOp final : public LinearOperator {
 public:
  explicit BlockDiagOp(std::vector<OperatorPtr> blocks);
  const std::vector<OperatorPtr>& blocks() const { return blocks_; }
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::block_diagonal; }

 private:
  std::vector<OperatorPtr> blocks_;
};

// [A_1; ...; A_k] sharing one input.
class StackedOp final : public LinearOperator {
 public:
  explicit StackedOp(std::vector<OperatorPtr> parts);
  const std::vector<OperatorPtr>& parts() const { return parts_; }
  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> z, std::span<double> x) const override;
  OpKind kind() const override { return OpKind::composite; }
  std::string name() const override { return "stacked"; }

 private:
  std::vector<OperatorPtr> parts_;
};

OperatorPtr identity(std::size_t n);
OperatorPtr diagonal(Vec d);
std::shared_ptr<const RestrictionOp> restriction(std::size_t n, std::vector<std::size_t> kept);
OperatorPtr dense(Eigen::MatrixXd m);
OperatorPtr scale(double a, OperatorPtr op);
OperatorPtr adjoint(OperatorPtr op);
// compose(A, B) x = A(B x). Two diagonals collapse into one diagonal.
OperatorPtr compose(OperatorPtr a, OperatorPtr b);
OperatorPtr compose(std::vector<OperatorPtr> factors);
OperatorPtr block_diag(std::vector<OperatorPtr> blocks);
OperatorPtr block_diag_repeat(OperatorPtr op, std::size_t k);
OperatorPtr stack(std::vector<OperatorPtr> parts);

// Power iteration on A*A from a seeded random start. Returns ||A||_2.
double estimate_operator_norm(const LinearOperator& op, std::size_t iterations = 100,
                              std::uint64_t seed = 1);

// max over trials of |<Ax, z> - <x, A*z>| / (||x|| ||z|| ||A||), x and z
// Gaussian. ||A|| is estimated with a few power iterations.
double adjoint_dot_test(const LinearOperator& op, std::size_t trials = 5,
                        std::uint64_t seed = 1);

// Column-by-column materialization. Refuses more than max_entries entries.
Eigen::MatrixXd materialize(const LinearOperator& op, std::size_t max_entries = 50'000'000);

// "msmat <rows> <cols>\n" then rows*cols float64 LE, row-major.
void write_dense_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_dense_matrix(const std::filesystem::path& path);

}  // namespace mscs
