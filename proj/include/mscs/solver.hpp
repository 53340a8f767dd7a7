#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mscs/analysis.hpp"
#include "mscs/cg.hpp"
#include "mscs/cube.hpp"
#include "mscs/sensing.hpp"

namespace mscs {

// min ||Omega A x||_1  s.t.  ||y - Phi x||_2 <= tau,  x in [x_min, x_max]^n
struct Problem {
  const ExtendedSensing* sensing = nullptr;
  const ExtendedAnalysis* prior = nullptr;
  std::span<const double> y;
  double tau = 0.0;
  double x_min = 0.0;
  double x_max = 1.0;
};

struct AdmmParams {
  double rho = 40.0;
  double mu1_scale = 50.0;  // mu_1 = mu1_scale * rho / ||Phibar||^2, mu_2 = mu_3 = rho
  std::size_t max_iter = 2000;
  double tol = 5e-5;
  bool keep_telemetry = true;
};

struct TelemetryRow {
  std::size_t iteration = 0;
  double relative_change = 0.0;
  double feasibility_gap = 0.0;  // ||y - R_m Phibar xbar|| - tau
  double l1_objective = 0.0;     // ||Omegabar Abar xbar||_1
};

struct AdmmResult {
  Vec x;                 // R_n of the box/zero split, length n
  Vec x_bar;             // box/zero split of the final extended primal
  std::size_t iterations = 0;
  bool converged = false;
  double relative_change = 0.0;
  double feasibility_gap = 0.0;  // on x: ||y - Phi x|| - tau
  double l1_objective = 0.0;     // on x: ||Omega A x||_1
  double initial_feasibility_gap = 0.0;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;
  std::vector<TelemetryRow> telemetry;
};

// Three-split ADMM on the extended variable (H_1 = Phibar, H_2 = Abar,
// H_3 = Id), scaled duals. One iteration:
//   xbar  <- (mu1 Phibar^*Phibar + (mu2+mu3) Id)^{-1} sum_j mu_j H_j^*(u_j - d_j)
//   u_j   <- prox_{g_j / mu_j}(H_j xbar + d_j)
//   d_j   <- d_j + H_j xbar - u_j
// Stops when ||xbar_k - xbar_{k-1}|| <= tol ||xbar_{k-1}|| or at max_iter.
// `x_init` (length n) seeds xbar = R_n^* x_init. Throws SolverError on NaN.
AdmmResult admm_solve(const Problem& problem, const AdmmParams& params,
                      std::span<const double> x_init);

struct TikhonovResult {
  Vec x;
  Vec y_lin;  // lifted interpolated measurements, length mbar
  CgResult cg;
};

// ((Phibar R_n^*)^*(Phibar R_n^*) + tau^2 Id) x = (Phibar R_n^*)^* y_lin by CG from
// zero, where y_lin lifts the per-band interpolation of the frame.
TikhonovResult tikhonov_init(const MeasurementFrame& frame, const ExtendedSensing& sensing,
                             double tau, double cg_tol = 1e-3, std::size_t cg_max_iter = 10);

// Same solve for an already lifted y_lin.
TikhonovResult tikhonov_solve(std::span<const double> y_lin, const ExtendedSensing& sensing,
                              double tau, double cg_tol = 1e-3, std::size_t cg_max_iter = 10);

void write_telemetry_csv(std::ostream& os, const std::vector<TelemetryRow>& rows);
void write_telemetry_csv(const std::filesystem::path& path, const std::vector<TelemetryRow>& rows);

}  // namespace mscs
