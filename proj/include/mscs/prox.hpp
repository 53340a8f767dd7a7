#pragma once

#include <span>

#include "mscs/linop.hpp"

namespace mscs {

// out = argmin_p mu ||diag(w) p||_1 + 1/2 ||p - v||^2, w >= 0.
// Zero weights pass entries through unchanged.
void prox_weighted_l1(std::span<const double> v, std::span<const double> w, double mu,
                      std::span<double> out);

// Projects the kept entries R z onto {q : ||y - q|| <= tau}; the other
// entries of z are copied unchanged.
void prox_l2_ball(std::span<const double> z, const RestrictionOp& r, std::span<const double> y,
                  double tau, std::span<double> out);

// Clamps the kept entries to [lo, hi] and zeroes the complement.
// `kept_mask` has one flag per entry (1 = kept).
void prox_box_and_zero(std::span<const double> x, std::span<const unsigned char> kept_mask,
                       double lo, double hi, std::span<double> out);

}  // namespace mscs
