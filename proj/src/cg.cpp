#include "mscs/cg.hpp"

#include <cmath>
#include <vector>

#include "mscs/errors.hpp"
#include "mscs/simd.hpp"

namespace mscs {

CgResult conjugate_gradient(const ApplyFn& apply, std::span<const double> b,
                            std::span<double> x, double tol, std::size_t max_iter) {
  const std::size_t n = b.size();
  if (x.size() != n) throw ConfigError("conjugate_gradient: size mismatch");
  CgResult res;
  const double bnorm = std::sqrt(simd::norm_sq(b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), p(n), ap(n);
  apply(x, ap);
  simd::axpby(1.0, b, -1.0, ap, r);
  p = r;
  double rr = simd::norm_sq(r);
  res.relative_residual = std::sqrt(rr) / bnorm;
  if (res.relative_residual <= tol) {
    res.converged = true;
    return res;
  }

  for (std::size_t k = 0; k < max_iter; ++k) {
    apply(p, ap);
    const double pap = simd::dot(p, ap);
    if (!(pap > 0.0)) {
      if (std::isnan(pap)) throw SolverError("conjugate_gradient: NaN in operator output");
      break;  // operator not positive definite along p; keep the current iterate
    }
    const double alpha = rr / pap;
    simd::axpy(alpha, p, x);
    simd::axpy(-alpha, ap, r);
    const double rr_new = simd::norm_sq(r);
    res.iterations = k + 1;
    res.relative_residual = std::sqrt(rr_new) / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      break;
    }
    simd::axpby(1.0, r, rr_new / rr, p, p);
    rr = rr_new;
  }
  return res;
}

}  // namespace mscs
