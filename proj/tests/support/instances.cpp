#include "instances.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mscs/harness.hpp"

namespace testing_support {

using namespace mscs;

namespace {

struct Recipe {
  Architecture arch;
  LayoutKind layout;
  std::size_t n_uv, n_bands, period;
  double rate;
  double snr_db;  // +inf: noiseless, tau forced to 1e-6
  PsfMode psf;
  double oracle_l1;
};

// oracle_l1: tests/oracles/convex_oracle.py on the exported instance.
const std::map<std::string, Recipe>& recipes() {
  static const std::map<std::string, Recipe> r = {
      {"msvi-8x8x2-noiseless",
       {Architecture::msvi, LayoutKind::random, 8, 2, 1, 0.5,
        std::numeric_limits<double>::infinity(), PsfMode::none, 9.38546017062}},
      {"msvi-random-8x8x8",
       {Architecture::msvi, LayoutKind::random, 8, 8, 1, 0.5, 40.0, PsfMode::none, 20.6482697199}},
      {"msvi-mosaic-8x8x4",
       {Architecture::msvi, LayoutKind::mosaic, 8, 4, 2, 1.0, 40.0, PsfMode::none, 15.7808907483}},
      {"msrc-8x8x8",
       {Architecture::msrc, LayoutKind::random, 8, 8, 1, 0.25, 40.0, PsfMode::none, 17.7097950069}},
      {"msrc-5px-8x8x4",
       {Architecture::msrc, LayoutKind::random, 8, 4, 1, 0.5, 40.0, PsfMode::px5, 11.336545321}},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& solver_instance_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : recipes()) v.push_back(k);
    return v;
  }();
  return names;
}

SolverInstance make_solver_instance(const std::string& name) {
  auto it = recipes().find(name);
  if (it == recipes().end()) throw std::invalid_argument("no instance " + name);
  const Recipe& r = it->second;

  SolverInstance inst;
  inst.name = name;
  ExperimentConfig cfg;
  cfg.architecture = r.arch;
  cfg.layout = r.layout;
  cfg.period = r.period;
  cfg.n_u = cfg.n_v = r.n_uv;
  cfg.n_bands = r.n_bands;
  cfg.snr_db = r.snr_db;
  cfg.psf = r.psf;
  cfg.scene_seed = 3;
  cfg = at_rate(cfg, r.rate);
  inst.cfg = cfg;
  inst.oracle_l1 = r.oracle_l1;

  inst.truth = load_scene(cfg);
  inst.sensing = build_sensing(cfg, build_layout(cfg));
  inst.frame = simulate(cfg, *inst.sensing, inst.truth);
  if (std::isinf(r.snr_db)) inst.frame.noise_bound = 1e-6;
  inst.analysis = std::make_shared<AnalysisTransform>(
      cfg.n_u, cfg.n_v, cfg.n_bands,
      AnalysisOptions{cfg.wavelet, cfg.wavelet_levels, cfg.prior_weights});
  inst.prior = std::make_unique<ExtendedAnalysis>(inst.analysis, inst.sensing->r_n());
  return inst;
}

Problem SolverInstance::problem() const {
  return Problem{sensing.get(), prior.get(), frame.data, frame.noise_bound, cfg.x_min, cfg.x_max};
}

AdmmParams SolverInstance::params() const {
  AdmmParams p;
  p.rho = cfg.rho;
  p.mu1_scale = cfg.mu1_scale;
  p.max_iter = cfg.max_iter;
  p.tol = cfg.tol;
  return p;
}

}  // namespace testing_support
