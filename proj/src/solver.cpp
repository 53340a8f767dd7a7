#include "mscs/solver.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "mscs/errors.hpp"
#include "mscs/interpolate.hpp"
#include "mscs/prox.hpp"
#include "mscs/simd.hpp"

namespace mscs {
namespace {

double data_gap(std::span<const double> phibar_x, const RestrictionOp& r_m,
                std::span<const double> y, double tau) {
  double d2 = 0.0;
  const auto& kept = r_m.kept();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double d = phibar_x[kept[i]] - y[i];
    d2 += d * d;
  }
  return std::sqrt(d2) - tau;
}

}  // namespace

AdmmResult admm_solve(const Problem& pb, const AdmmParams& params,
                      std::span<const double> x_init) {
  if (!pb.sensing || !pb.prior) throw ConfigError("admm_solve: problem is incomplete");
  const ExtendedSensing& s = *pb.sensing;
  const ExtendedAnalysis& a = *pb.prior;
  const LinearOperator& phibar = *s.phi_bar();
  const RestrictionOp& r_m = *s.r_m();
  const RestrictionOp& r_n = *s.r_n();
  const std::size_t nbar = s.n_bar(), mbar = s.m_bar(), kbar = a.rows();
  if (a.cols() != nbar) throw ConfigError("admm_solve: prior and sensing disagree on nbar");
  if (pb.y.size() != s.m()) throw ConfigError("admm_solve: measurement length mismatch");
  if (x_init.size() != s.n()) throw ConfigError("admm_solve: x_init length mismatch");
  if (!(pb.tau >= 0.0)) throw ConfigError("admm_solve: tau must be >= 0");
  if (!(pb.x_min < pb.x_max)) throw ConfigError("admm_solve: empty range");
  if (!(params.rho > 0.0) || !(params.mu1_scale > 0.0)) {
    throw ConfigError("admm_solve: penalties must be positive");
  }

  AdmmResult res;
  const double norm = s.phi_bar_norm();
  res.mu1 = params.mu1_scale * params.rho / (norm * norm);
  res.mu2 = params.rho;
  res.mu3 = params.rho;
  const double mu1 = res.mu1, mu2 = res.mu2, mu3 = res.mu3;
  const double mu_ratio = (mu2 + mu3) / mu1;

  std::vector<unsigned char> kept_mask(nbar, 0);
  for (std::size_t i : r_n.kept()) kept_mask[i] = 1;
  const Vec& wbar = a.weights();

  Vec xbar(nbar), xprev(nbar);
  r_n.adjoint_into(x_init, xbar);
  Vec u1 = phibar.apply(xbar), u2 = a.apply(xbar), u3 = xbar;
  Vec d1(mbar, 0.0), d2(kbar, 0.0), d3(nbar, 0.0);
  Vec h1(mbar), h2(kbar), t1(mbar), t2(kbar), rhs(nbar), tmp(nbar);
  res.initial_feasibility_gap = data_gap(u1, r_m, pb.y, pb.tau);

  for (std::size_t it = 1; it <= params.max_iter; ++it) {
    xprev.swap(xbar);

    // rhs = sum_j mu_j H_j^*(u_j - d_j), scaled by 1/mu1 for the inverse.
    simd::axpby(1.0, u1, -1.0, d1, t1);
    phibar.adjoint_into(t1, rhs);
    simd::axpby(1.0, u2, -1.0, d2, t2);
    a.adjoint_into(t2, tmp);
    simd::axpy(mu2 / mu1, tmp, rhs);
    simd::axpby(1.0, u3, -1.0, d3, tmp);
    simd::axpy(mu3 / mu1, tmp, rhs);
    s.normal_inverse(rhs, mu_ratio, xbar);

    // split 1: data ball on the sensor readings
    phibar.apply_into(xbar, h1);
    simd::axpby(1.0, h1, 1.0, d1, t1);
    prox_l2_ball(t1, r_m, pb.y, pb.tau, u1);
    simd::axpby(1.0, t1, -1.0, u1, d1);

    // split 2: weighted l1 on the analysis coefficients
    a.apply_into(xbar, h2);
    simd::axpby(1.0, h2, 1.0, d2, t2);
    prox_weighted_l1(t2, wbar, 1.0 / mu2, u2);
    simd::axpby(1.0, t2, -1.0, u2, d2);

    // split 3: range on the scene, zero outside it
    simd::axpby(1.0, xbar, 1.0, d3, tmp);
    prox_box_and_zero(tmp, kept_mask, pb.x_min, pb.x_max, u3);
    simd::axpby(1.0, tmp, -1.0, u3, d3);

    const double prev_norm = std::sqrt(simd::norm_sq(xprev));
    const double change = std::sqrt(simd::dist_sq(xbar, xprev));
    const double rel = prev_norm > 0.0 ? change / prev_norm : change;
    if (!std::isfinite(rel)) {
      throw SolverError("ADMM produced a non-finite iterate at iteration " + std::to_string(it));
    }
    res.iterations = it;
    res.relative_change = rel;
    if (params.keep_telemetry) {
      res.telemetry.push_back({it, rel, data_gap(h1, r_m, pb.y, pb.tau),
                               simd::weighted_abs_sum(h2, wbar)});
    }
    // With u_j = H_j xbar_0 and zero duals the first update returns xbar_0.
    if (it > 1 && rel <= params.tol) {
      res.converged = true;
      break;
    }
  }

  res.x.resize(s.n());
  r_n.apply_into(u3, res.x);
  res.x_bar = u3;
  const Vec phix = s.phi()->apply(res.x);
  res.feasibility_gap = std::sqrt(simd::dist_sq(phix, pb.y)) - pb.tau;
  Vec xe(nbar);
  r_n.adjoint_into(res.x, xe);
  res.l1_objective = a.weighted_l1(xe);
  return res;
}

TikhonovResult tikhonov_solve(std::span<const double> y_lin, const ExtendedSensing& sensing,
                              double tau, double cg_tol, std::size_t cg_max_iter) {
  if (y_lin.size() != sensing.m_bar()) throw ConfigError("tikhonov: y_lin length mismatch");
  const OperatorPtr b = sensing.phi_bar_embedded();
  TikhonovResult r;
  r.y_lin.assign(y_lin.begin(), y_lin.end());
  const Vec rhs = b->apply_adjoint(y_lin);
  const double reg = tau * tau;
  Vec scratch(b->rows());
  auto normal = [&](std::span<const double> x, std::span<double> out) {
    b->apply_into(x, scratch);
    b->adjoint_into(scratch, out);
    simd::axpy(reg, x, out);
  };
  r.x.assign(sensing.n(), 0.0);
  r.cg = conjugate_gradient(normal, rhs, r.x, cg_tol, cg_max_iter);
  return r;
}

TikhonovResult tikhonov_init(const MeasurementFrame& frame, const ExtendedSensing& sensing,
                             double tau, double cg_tol, std::size_t cg_max_iter) {
  if (frame.m_u != sensing.m_u() || frame.m_v != sensing.m_v() ||
      frame.snapshots != sensing.snapshots()) {
    throw ConfigError("tikhonov_init: frame does not match the sensor");
  }
  const Vec cubes = interpolate_frame(frame, sensing.layout());
  return tikhonov_solve(sensing.lift_sensor_cubes(cubes), sensing, tau, cg_tol, cg_max_iter);
}

void write_telemetry_csv(std::ostream& os, const std::vector<TelemetryRow>& rows) {
  os << "iteration,relative_change,feasibility_gap,l1_objective\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.iteration << ',' << r.relative_change << ',' << r.feasibility_gap << ','
       << r.l1_objective << '\n';
  }
}

void write_telemetry_csv(const std::filesystem::path& path, const std::vector<TelemetryRow>& rows) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  write_telemetry_csv(os, rows);
}

}  // namespace mscs
