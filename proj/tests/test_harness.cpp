#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mscs/errors.hpp"
#include "mscs/harness.hpp"
#include "mscs/random.hpp"
#include "tempdir.hpp"

using namespace mscs;

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ExperimentConfig tiny_msvi() {
  ExperimentConfig c;
  c.architecture = Architecture::msvi;
  c.layout = LayoutKind::mosaic;
  c.period = 2;
  c.n_u = c.n_v = 8;
  c.n_bands = 4;
  c.wavelet_levels = 2;
  return at_rate(c, 1.0);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("noise: realized SNR, tau and determinism") {
  const auto y = uniform_vector(20000, 1, 0.0, 1.0);
  for (double snr : {20.0, 30.0, 40.0}) {
    const auto n = add_noise(y, snr, 5);
    Vec w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) w[i] = n.y[i] - y[i];
    CHECK(n.tau == doctest::Approx(norm2(w)).epsilon(1e-12));
    const double realized = 20.0 * std::log10(norm2(y) / norm2(w));
    CHECK(std::abs(realized - snr) <= 0.5);
    CHECK(n.sigma == doctest::Approx(norm2(y) / std::sqrt(double(y.size())) * std::pow(10.0, -snr / 20)));
  }
  const auto a = add_noise(y, 30.0, 9), b = add_noise(y, 30.0, 9), c = add_noise(y, 30.0, 10);
  CHECK(a.y == b.y);
  CHECK(a.y != c.y);
  const auto clean = add_noise(y, std::numeric_limits<double>::infinity(), 3);
  CHECK(clean.y == y);
  CHECK(clean.tau == 0.0);
}

TEST_CASE("PSNR") {
  const auto t = uniform_vector(100, 2, 0.0, 1.0);
  CHECK(psnr(t, t) == kPsnrCap);
  Vec e = t;
  for (double& v : e) v += 0.1;
  CHECK(psnr(e, t) == doctest::Approx(20.0).epsilon(1e-10));
  CHECK_THROWS_AS(psnr(Vec(3), Vec(4)), ConfigError);

  MSCube truth(4, 4, 2), est(4, 4, 2);
  for (std::size_t i = 0; i < 16; ++i) est.band(1)[i] = 0.01;
  const auto bp = per_band_psnr(est, truth);
  CHECK(bp[0] == kPsnrCap);
  CHECK(bp[1] == doctest::Approx(40.0).epsilon(1e-10));
}

TEST_CASE("mosaic baseline copies each band's macro-pixel sample") {
  const auto layout = make_layout(LayoutKind::mosaic, 8, 8, 4, 2);
  Vec snap(64);
  for (std::size_t p = 0; p < 64; ++p) snap[p] = 1.0 + double(layout.band_of(p));
  const auto cube = nn_demosaick_baseline(snap, layout, 8, 8, uniform_wavelengths(4));
  for (std::size_t b = 0; b < 4; ++b)
    for (double v : cube.band(b)) CHECK(v == doctest::Approx(1.0 + double(b)));
  const auto up = nn_demosaick_baseline(Vec(64, 0.3), layout, 4, 4, uniform_wavelengths(4));
  for (double v : up.data()) CHECK(v == doctest::Approx(0.3));
  CHECK_THROWS(nn_demosaick_baseline(snap, make_layout(LayoutKind::random, 8, 8, 4, 1, 1), 8, 8,
                                     uniform_wavelengths(4)));
}

TEST_CASE("synthetic scene") {
  const auto s = synthetic_scene(32, 24, uniform_wavelengths(6), 4);
  CHECK(s.n_u() == 32);
  CHECK(s.n_v() == 24);
  CHECK(s.n_bands() == 6);
  double lo = 1.0, hi = 0.0;
  for (double v : s.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 0.0);
  CHECK(hi <= 0.95);
  CHECK(hi - lo > 0.2);
  const auto again = synthetic_scene(32, 24, uniform_wavelengths(6), 4);
  CHECK(std::equal(s.data().begin(), s.data().end(), again.data().begin()));
}

TEST_CASE("sizes for a subsampling rate") {
  ExperimentConfig c;
  c.n_u = c.n_v = 128;
  c.n_bands = 16;
  c.architecture = Architecture::msvi;
  auto r = at_rate(c, 1.0);
  CHECK(r.m_u == 512);
  CHECK(r.snapshots == 1);
  r = at_rate(c, 1.0 / 4);
  CHECK(r.m_u == 256);
  CHECK(r.subsampling_rate() == doctest::Approx(0.25));
  c.architecture = Architecture::msrc;
  r = at_rate(c, 1.0 / 16);
  CHECK(r.m_u == 128);
  CHECK(r.snapshots == 1);
  r = at_rate(c, 0.5);
  CHECK(r.snapshots == 8);
  CHECK_THROWS_AS(at_rate(c, 0.01), ConfigError);
  CHECK_THROWS_AS(at_rate(c, 0.0), ConfigError);
}

TEST_CASE("sweep CSV") {
  std::ostringstream os;
  write_sweep_csv(os, {});
  CHECK(os.str() ==
        "label,architecture,layout,psf,rate,m_u,m_v,snapshots,scene_seed,psnr,init_psnr,"
        "baseline_psnr,iterations,converged,status\n");
  SweepRow failed;
  failed.label = "msvi-random";
  failed.rate = 0.5;
  failed.error = "boom";
  std::ostringstream os2;
  write_sweep_csv(os2, {failed});
  CHECK(os2.str().find("boom") != std::string::npos);
}

TEST_CASE("small end-to-end run with artifacts") {
  testing_support::TempDir dir("harness-run");
  const auto cfg = tiny_msvi();
  RunArtifacts art;
  const auto rep = run_experiment(cfg, RunOptions{dir.path(), nullptr, true}, &art);
  CHECK(rep.converged);
  CHECK(rep.psnr > rep.init_psnr);
  CHECK(rep.psnr > 25.0);
  REQUIRE(rep.baseline_psnr.has_value());
  CHECK(rep.band_psnr.size() == 4);
  CHECK(rep.label == "msvi-mosaic");
  CHECK(rep.rate == doctest::Approx(1.0));
  CHECK(art.telemetry.size() == rep.iterations);
  CHECK(psnr(art.estimate.data(), art.truth.data()) == doctest::Approx(rep.psnr));
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["psnr"].get<double>() == doctest::Approx(rep.psnr));
  CHECK(j["iterations"].get<std::size_t>() == rep.iterations);

  // same config, same numbers
  const auto again = run_experiment(cfg);
  CHECK(again.psnr == rep.psnr);
  CHECK(again.simulation_fingerprint == rep.simulation_fingerprint);

  // reconstructing the simulated frame reproduces the run
  const auto rec = reconstruct_frame(cfg, art.frame, &art.truth);
  CHECK(rec.psnr == doctest::Approx(rep.psnr).epsilon(1e-12));
  MeasurementFrame bad = art.frame;
  bad.m_u += 1;
  CHECK_THROWS_AS(reconstruct_frame(cfg, bad, nullptr), DataError);
}

}  // TEST_SUITE
