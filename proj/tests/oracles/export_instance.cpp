// Writes the dense form of each small solver instance for convex_oracle.py:
//   <dir>/<name>/phi.msmat       Phi (m x n)
//   <dir>/<name>/prior.msmat     diag(Omega) A (k x n)
//   <dir>/<name>/y.msmat         y (m x 1)
//   <dir>/<name>/meta.txt        tau x_min x_max frozen_oracle_l1
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "instances.hpp"
#include "mscs/linop.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: export_instance <out-dir>\n";
    return 2;
  }
  const std::filesystem::path root = argv[1];
  for (const auto& name : testing_support::solver_instance_names()) {
    auto inst = testing_support::make_solver_instance(name);
    const auto dir = root / name;
    std::filesystem::create_directories(dir);
    mscs::write_dense_matrix(dir / "phi.msmat", mscs::materialize(*inst.sensing->phi()));
    Eigen::MatrixXd a = mscs::materialize(*inst.analysis);
    const auto& w = inst.analysis->weights();
    for (Eigen::Index i = 0; i < a.rows(); ++i) a.row(i) *= w[static_cast<std::size_t>(i)];
    mscs::write_dense_matrix(dir / "prior.msmat", a);
    Eigen::MatrixXd y(inst.frame.data.size(), 1);
    for (std::size_t i = 0; i < inst.frame.data.size(); ++i) y(i, 0) = inst.frame.data[i];
    mscs::write_dense_matrix(dir / "y.msmat", y);
    std::ofstream(dir / "meta.txt") << std::setprecision(17) << inst.frame.noise_bound << ' '
                                    << inst.cfg.x_min << ' ' << inst.cfg.x_max << ' '
                                    << inst.oracle_l1 << '\n';
    std::cout << name << '\n';
  }
  return 0;
}
