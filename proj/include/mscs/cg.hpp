#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mscs {

using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // ||b - A x|| / ||b||
  bool converged = false;
};

// Conjugate gradients for symmetric positive definite A. `x` holds the
// starting point on entry and the iterate on exit.
CgResult conjugate_gradient(const ApplyFn& apply, std::span<const double> b,
                            std::span<double> x, double tol, std::size_t max_iter);

}  // namespace mscs
