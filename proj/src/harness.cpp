#include "mscs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mscs/analysis.hpp"
#include "mscs/errors.hpp"
#include "mscs/image_io.hpp"
#include "mscs/msvi.hpp"
#include "mscs/random.hpp"
#include "mscs/simd.hpp"
#include "mscs/solver.hpp"

namespace mscs {

NoisyMeasurements add_noise(std::span<const double> y, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw ConfigError("add_noise: snr_db is NaN");
  NoisyMeasurements r;
  r.y.assign(y.begin(), y.end());
  if (std::isinf(snr_db) && snr_db > 0) return r;
  if (y.empty()) return r;
  const double rms = std::sqrt(simd::norm_sq(y) / static_cast<double>(y.size()));
  r.sigma = rms * std::pow(10.0, -snr_db / 20.0);
  Rng rng(seed);
  double w2 = 0.0;
  for (double& v : r.y) {
    const double w = r.sigma * rng.gaussian();
    v += w;
    w2 += w * w;
  }
  r.tau = std::sqrt(w2);
  return r;
}

double psnr(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size() || truth.empty()) {
    throw ConfigError("psnr: size mismatch");
  }
  const double mse = simd::dist_sq(estimate, truth) / static_cast<double>(truth.size());
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

std::vector<double> per_band_psnr(const MSCube& estimate, const MSCube& truth) {
  if (!estimate.same_shape(truth)) throw ConfigError("per_band_psnr: shape mismatch");
  std::vector<double> out(truth.n_bands());
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = psnr(estimate.band(b), truth.band(b));
  return out;
}

MSCube nn_demosaick_baseline(std::span<const double> snapshot, const SensorLayout& layout,
                             std::size_t n_u, std::size_t n_v,
                             const std::vector<double>& wavelengths_nm) {
  if (layout.kind() != LayoutKind::mosaic) {
    throw ConfigError("nearest-neighbour demosaicking needs a mosaic layout");
  }
  if (snapshot.size() != layout.pixels()) throw ConfigError("baseline: snapshot size mismatch");
  const std::size_t p = layout.period(), mu = layout.m_u(), mv = layout.m_v();
  MSCube out(n_u, n_v, wavelengths_nm);
  for (std::size_t b = 0; b < out.n_bands(); ++b) {
    // position of band b inside the macro-pixel
    const std::size_t first = layout.pixels_of_band(b).front();
    const std::size_t du = (first / mv) % p, dv = (first % mv) % p;
    auto pick = [p](double t, std::size_t off, std::size_t m) {
      const long count = static_cast<long>((m - off + p - 1) / p);
      long i = std::lround((t - static_cast<double>(off)) / static_cast<double>(p));
      return static_cast<std::size_t>(std::clamp(i, 0L, count - 1)) * p + off;
    };
    for (std::size_t u = 0; u < n_u; ++u) {
      const double tu = (u + 0.5) * static_cast<double>(mu) / static_cast<double>(n_u) - 0.5;
      const std::size_t su = pick(tu, du, mu);
      for (std::size_t v = 0; v < n_v; ++v) {
        const double tv = (v + 0.5) * static_cast<double>(mv) / static_cast<double>(n_v) - 0.5;
        out.at(u, v, b) = snapshot[su * mv + pick(tv, dv, mv)];
      }
    }
  }
  return out;
}

// --- scenes ---------------------------------------------------------------------

namespace {

struct Spectrum {
  double base;
  double amp[2], centre[2], width[2];

  double at(double wl) const {
    double s = base;
    for (int k = 0; k < 2; ++k) {
      const double d = (wl - centre[k]) / width[k];
      s += amp[k] * std::exp(-0.5 * d * d);
    }
    return std::max(s, 0.0);
  }
};

Spectrum random_spectrum(Rng& rng) {
  Spectrum s{};
  s.base = rng.uniform(0.05, 0.35);
  for (int k = 0; k < 2; ++k) {
    s.amp[k] = rng.uniform(-0.1, 0.7);
    s.centre[k] = rng.uniform(420.0, 680.0);
    s.width[k] = rng.uniform(30.0, 120.0);
  }
  return s;
}

struct Region {
  int type;  // 0 ellipse, 1 rotated rectangle, 2 ring
  double cu, cv, a, b, angle;
  double g0, gu, gv, ripple_amp, ripple_freq, ripple_phase;
  Spectrum spectrum;

  bool contains(double u, double v) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const double x = c * (u - cu) + s * (v - cv);
    const double y = -s * (u - cu) + c * (v - cv);
    const double r = (x / a) * (x / a) + (y / b) * (y / b);
    switch (type) {
      case 0: return r <= 1.0;
      case 1: return std::fabs(x) <= a && std::fabs(y) <= b;
      default: return r <= 1.0 && r >= 0.45;
    }
  }
  double shade(double u, double v) const {
    return g0 + gu * (u - cu) + gv * (v - cv) +
           ripple_amp * std::sin(2.0 * std::numbers::pi * ripple_freq *
                                     (u * std::cos(angle) + v * std::sin(angle)) +
                                 ripple_phase);
  }
};

}  // namespace

MSCube synthetic_scene(std::size_t n_u, std::size_t n_v, const std::vector<double>& wavelengths_nm,
                       std::uint64_t seed) {
  constexpr std::size_t kSuper = 4;
  Rng rng(seed);
  const Spectrum background = random_spectrum(rng);
  const double bg_gu = rng.uniform(-0.3, 0.3), bg_gv = rng.uniform(-0.3, 0.3);
  std::vector<Region> regions(14 + rng.below(8));
  for (auto& r : regions) {
    r.type = static_cast<int>(rng.below(3));
    r.cu = rng.uniform(0.05, 0.95);
    r.cv = rng.uniform(0.05, 0.95);
    r.a = rng.uniform(0.04, 0.25);
    r.b = rng.uniform(0.04, 0.25);
    r.angle = rng.uniform(0.0, std::numbers::pi);
    r.g0 = rng.uniform(0.5, 1.0);
    r.gu = rng.uniform(-0.8, 0.8);
    r.gv = rng.uniform(-0.8, 0.8);
    r.ripple_amp = rng.uniform() < 0.3 ? rng.uniform(0.05, 0.15) : 0.0;
    r.ripple_freq = rng.uniform(2.0, 8.0);
    r.ripple_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    r.spectrum = random_spectrum(rng);
  }

  const std::size_t nb = wavelengths_nm.size();
  std::vector<double> bg_spec(nb);
  for (std::size_t b = 0; b < nb; ++b) bg_spec[b] = background.at(wavelengths_nm[b]);
  std::vector<std::vector<double>> reg_spec(regions.size(), std::vector<double>(nb));
  for (std::size_t k = 0; k < regions.size(); ++k) {
    for (std::size_t b = 0; b < nb; ++b) reg_spec[k][b] = regions[k].spectrum.at(wavelengths_nm[b]);
  }

  MSCube cube(n_u, n_v, wavelengths_nm);
  const double hu = static_cast<double>(n_u * kSuper), hv = static_cast<double>(n_v * kSuper);
  const double inv = 1.0 / static_cast<double>(kSuper * kSuper);
  for (std::size_t U = 0; U < n_u * kSuper; ++U) {
    const double u = (static_cast<double>(U) + 0.5) / hu;
    for (std::size_t V = 0; V < n_v * kSuper; ++V) {
      const double v = (static_cast<double>(V) + 0.5) / hv;
      const std::vector<double>* spec = &bg_spec;
      double shade = 0.6 + bg_gu * (u - 0.5) + bg_gv * (v - 0.5);
      for (std::size_t k = regions.size(); k-- > 0;) {
        if (regions[k].contains(u, v)) {
          spec = &reg_spec[k];
          shade = regions[k].shade(u, v);
          break;
        }
      }
      shade = std::max(shade, 0.0);
      for (std::size_t b = 0; b < nb; ++b) {
        cube.at(U / kSuper, V / kSuper, b) += inv * shade * (*spec)[b];
      }
    }
  }
  double mx = 0.0;
  for (double x : cube.data()) mx = std::max(mx, x);
  if (mx > 0.0) {
    for (double& x : cube.data()) x *= 0.95 / mx;
  }
  return cube;
}

MSCube box_downsample(const MSCube& cube, std::size_t factor) {
  if (factor == 0 || cube.n_u() % factor || cube.n_v() % factor) {
    throw ConfigError("box_downsample: factor must divide both dimensions");
  }
  if (factor == 1) return cube;
  MSCube out(cube.n_u() / factor, cube.n_v() / factor, cube.wavelengths());
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t b = 0; b < cube.n_bands(); ++b) {
    for (std::size_t u = 0; u < cube.n_u(); ++u) {
      for (std::size_t v = 0; v < cube.n_v(); ++v) {
        out.at(u / factor, v / factor, b) += inv * cube.at(u, v, b);
      }
    }
  }
  return out;
}

MSCube ingest_band_directory(const std::filesystem::path& dir, std::size_t center_u,
                             std::size_t center_v, std::size_t size,
                             const std::vector<double>& wavelengths_nm, std::size_t downsample,
                             double first_nm, double step_nm) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no PNG bands in " + dir.string());
  if (size == 0 || center_u < size / 2 || center_v < size / 2) {
    throw ConfigError("ROI does not fit the image");
  }
  MSCube roi(size, size, wavelengths_nm);
  for (std::size_t b = 0; b < wavelengths_nm.size(); ++b) {
    const double idx = std::round((wavelengths_nm[b] - first_nm) / step_nm);
    if (idx < 0 || idx >= static_cast<double>(files.size())) {
      throw DataError("no band near " + std::to_string(wavelengths_nm[b]) + " nm in " +
                      dir.string());
    }
    const GrayImage img = read_png_gray(files[static_cast<std::size_t>(idx)]);
    const std::size_t u0 = center_u - size / 2, v0 = center_v - size / 2;
    if (u0 + size > img.rows || v0 + size > img.cols) {
      throw ConfigError("ROI exceeds the " + std::to_string(img.rows) + "x" +
                        std::to_string(img.cols) + " image");
    }
    for (std::size_t u = 0; u < size; ++u) {
      for (std::size_t v = 0; v < size; ++v) {
        roi.at(u, v, b) = img.pixels[(u0 + u) * img.cols + v0 + v];
      }
    }
  }
  double mx = 0.0;
  for (double x : roi.data()) mx = std::max(mx, x);
  if (mx > 0.0) {
    for (double& x : roi.data()) x /= mx;
  }
  return box_downsample(roi, downsample);
}

MSCube load_scene(const ExperimentConfig& cfg) {
  const auto wl = uniform_wavelengths(cfg.n_bands, cfg.wavelength_min, cfg.wavelength_max);
  if (cfg.scene == "synthetic") return synthetic_scene(cfg.n_u, cfg.n_v, wl, cfg.scene_seed);
  MSCube cube = read_cube(cfg.scene);
  if (cube.n_bands() != cfg.n_bands) {
    throw DataError(cfg.scene + " has " + std::to_string(cube.n_bands()) + " bands, config wants " +
                    std::to_string(cfg.n_bands));
  }
  if (cube.n_u() != cfg.n_u || cube.n_v() != cfg.n_v) {
    if (cube.n_u() % cfg.n_u || cube.n_u() / cfg.n_u != cube.n_v() / cfg.n_v ||
        cube.n_v() % cfg.n_v) {
      throw DataError(cfg.scene + " is " + std::to_string(cube.n_u()) + "x" +
                      std::to_string(cube.n_v()) + ", not an integer multiple of the target");
    }
    cube = box_downsample(cube, cube.n_u() / cfg.n_u);
  }
  return cube;
}

SensorLayout build_layout(const ExperimentConfig& cfg) {
  return make_layout(cfg.layout, cfg.m_u, cfg.m_v, cfg.n_bands, cfg.period, cfg.layout_seed);
}

std::optional<Optics> build_optics(const ExperimentConfig& cfg) {
  if (cfg.psf == PsfMode::none) return std::nullopt;
  return Optics{cfg.aperture_pitch_um * 1e-6, cfg.effective_sensor_pitch_um() * 1e-6,
                cfg.focal_length_mm * 1e-3};
}

std::unique_ptr<ExtendedSensing> build_sensing(const ExperimentConfig& cfg, SensorLayout layout) {
  if (cfg.architecture == Architecture::msvi) {
    return std::make_unique<MsviSensing>(cfg.n_u, cfg.n_v, cfg.n_bands, std::move(layout),
                                         cfg.lanczos_order);
  }
  auto ca = generate_aperture(cfg.n_u, cfg.n_v, cfg.m_u, cfg.m_v, cfg.snapshots, cfg.aperture_seed);
  return std::make_unique<MsrcSensing>(
      cfg.n_u, cfg.n_v, uniform_wavelengths(cfg.n_bands, cfg.wavelength_min, cfg.wavelength_max),
      std::move(layout), std::move(ca), build_optics(cfg));
}

MeasurementFrame simulate(const ExperimentConfig& cfg, const ExtendedSensing& sensing,
                          const MSCube& truth) {
  const Vec clean = sensing.phi()->apply(truth.data());
  NoisyMeasurements noisy = add_noise(clean, cfg.snr_db, cfg.noise_seed);
  MeasurementFrame f;
  f.m_u = sensing.m_u();
  f.m_v = sensing.m_v();
  f.snapshots = sensing.snapshots();
  f.noise_bound = noisy.tau;
  f.data = std::move(noisy.y);
  return f;
}

ExperimentConfig at_rate(ExperimentConfig cfg, double rate) {
  if (!(rate > 0.0)) throw ConfigError("rate must be positive");
  const double nb = static_cast<double>(cfg.n_bands);
  if (cfg.architecture == Architecture::msvi) {
    const double k = std::sqrt(rate * nb);
    cfg.m_u = static_cast<std::size_t>(std::lround(static_cast<double>(cfg.n_u) * k));
    cfg.m_v = static_cast<std::size_t>(std::lround(static_cast<double>(cfg.n_v) * k));
    cfg.snapshots = 1;
  } else {
    const double snaps = rate * nb;
    if (snaps < 1.0 - 1e-9 || std::fabs(snaps - std::round(snaps)) > 1e-9) {
      throw ConfigError("MSRC rate must be a multiple of 1/n_bands");
    }
    cfg.m_u = cfg.n_u;
    cfg.m_v = cfg.n_v;
    cfg.snapshots = static_cast<std::size_t>(std::lround(snaps));
  }
  cfg.validate();
  return cfg;
}

std::string setup_label(const ExperimentConfig& cfg) {
  if (cfg.architecture == Architecture::msvi) {
    return "msvi-" + std::string(to_string(cfg.layout));
  }
  switch (cfg.psf) {
    case PsfMode::none: return "msrc";
    case PsfMode::px5: return "msrc-5px";
    case PsfMode::px11: return "msrc-11px";
    case PsfMode::custom: return "msrc-psf";
  }
  return "msrc";
}

// --- runs ---------------------------------------------------------------------------

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  nlohmann::json c;
  for (const auto& [k, v] : config.to_map()) c[k] = v;
  j["config"] = c;
  j["label"] = label;
  j["rate"] = rate;
  j["tau"] = tau;
  j["psnr"] = psnr;
  j["init_psnr"] = init_psnr;
  j["baseline_psnr"] = baseline_psnr ? nlohmann::json(*baseline_psnr) : nlohmann::json();
  j["band_psnr"] = band_psnr;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["relative_change"] = relative_change;
  j["feasibility_gap"] = feasibility_gap;
  j["l1_objective"] = l1_objective;
  j["init_cg_iterations"] = init_cg_iterations;
  j["wall_seconds"] = wall_seconds;
  j["operator"] = operator_description;
  j["simulation_fingerprint"] = simulation_fingerprint;
  j["reconstruction_fingerprint"] = reconstruction_fingerprint;
  j["output_cube"] = output_cube;
  return j;
}

namespace {

RunReport reconstruct_with(const ExperimentConfig& cfg, const ExtendedSensing& sensing,
                           const MeasurementFrame& frame, const MSCube* truth,
                           const RunOptions& options, RunArtifacts* artifacts,
                           std::chrono::steady_clock::time_point t0) {
  auto log = [&](const std::string& s) {
    if (options.log) *options.log << s << std::endl;
  };
  const auto wl = uniform_wavelengths(cfg.n_bands, cfg.wavelength_min, cfg.wavelength_max);
  RunReport rep;
  rep.config = cfg;
  rep.label = setup_label(cfg);
  rep.rate = cfg.subsampling_rate();
  rep.tau = frame.noise_bound;
  rep.operator_description = sensing.describe();
  rep.reconstruction_fingerprint = hex64(sensing.fingerprint());

  log("init: interpolation + Tikhonov (tau = " + std::to_string(frame.noise_bound) + ")");
  const TikhonovResult init =
      tikhonov_init(frame, sensing, frame.noise_bound, cfg.init_cg_tol, cfg.init_cg_max_iter);
  rep.init_cg_iterations = init.cg.iterations;

  auto a = std::make_shared<AnalysisTransform>(
      cfg.n_u, cfg.n_v, cfg.n_bands,
      AnalysisOptions{cfg.wavelet, cfg.wavelet_levels, cfg.prior_weights});
  ExtendedAnalysis abar(a, sensing.r_n());
  Problem pb{&sensing, &abar, frame.data, frame.noise_bound, cfg.x_min, cfg.x_max};
  AdmmParams params;
  params.rho = cfg.rho;
  params.mu1_scale = cfg.mu1_scale;
  params.max_iter = cfg.max_iter;
  params.tol = cfg.tol;
  params.keep_telemetry = options.keep_telemetry || !options.out_dir.empty();
  log("admm: " + sensing.describe());
  AdmmResult res = admm_solve(pb, params, init.x);
  rep.iterations = res.iterations;
  rep.converged = res.converged;
  rep.relative_change = res.relative_change;
  rep.feasibility_gap = res.feasibility_gap;
  rep.l1_objective = res.l1_objective;
  log("admm: " + std::to_string(res.iterations) + " iterations" +
      (res.converged ? "" : " (cap reached)"));

  MSCube est(cfg.n_u, cfg.n_v, wl, res.x);
  Vec init_clamped = init.x;
  simd::clamp(init_clamped, cfg.x_min, cfg.x_max, init_clamped);
  MSCube init_cube(cfg.n_u, cfg.n_v, wl, init_clamped);
  if (truth) {
    rep.psnr = psnr(est.data(), truth->data());
    rep.init_psnr = psnr(init_cube.data(), truth->data());
    rep.band_psnr = per_band_psnr(est, *truth);
    if (cfg.architecture == Architecture::msvi && cfg.layout == LayoutKind::mosaic) {
      const MSCube nn = nn_demosaick_baseline(frame.snapshot(0), sensing.layout(), cfg.n_u,
                                              cfg.n_v, wl);
      rep.baseline_psnr = psnr(nn.data(), truth->data());
    }
  }

  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    const auto& d = options.out_dir;
    write_cube(d / "reconstruction.mscube", est);
    write_cube(d / "init.mscube", init_cube);
    write_band_montage(d / "reconstruction.png", est);
    write_band_montage(d / "init.png", init_cube);
    if (truth) write_band_montage(d / "truth.png", *truth);
    write_telemetry_csv(d / "telemetry.csv", res.telemetry);
    rep.output_cube = (d / "reconstruction.mscube").string();
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!options.out_dir.empty()) {
    std::ofstream(options.out_dir / "report.json") << rep.to_json().dump(2) << "\n";
  }
  if (artifacts) {
    artifacts->estimate = std::move(est);
    artifacts->init = std::move(init_cube);
    artifacts->telemetry = std::move(res.telemetry);
  }
  return rep;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options,
                         RunArtifacts* artifacts) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  const MSCube truth = load_scene(cfg);
  const auto sensing = build_sensing(cfg, build_layout(cfg));
  const std::string sim_fp = hex64(sensing->fingerprint());
  const MeasurementFrame frame = simulate(cfg, *sensing, truth);
  RunReport rep = reconstruct_with(cfg, *sensing, frame, &truth, options, artifacts, t0);
  rep.simulation_fingerprint = sim_fp;
  if (!options.out_dir.empty()) {
    write_frame(options.out_dir / "frame.msframe", frame);
    std::ofstream(options.out_dir / "report.json") << rep.to_json().dump(2) << "\n";
  }
  if (artifacts) {
    artifacts->truth = truth;
    artifacts->frame = frame;
  }
  return rep;
}

RunReport reconstruct_frame(const ExperimentConfig& cfg, const MeasurementFrame& frame,
                            const MSCube* truth, const RunOptions& options,
                            RunArtifacts* artifacts) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  const auto sensing = build_sensing(cfg, build_layout(cfg));
  if (frame.m_u != sensing->m_u() || frame.m_v != sensing->m_v() ||
      frame.snapshots != sensing->snapshots()) {
    throw DataError("frame is " + std::to_string(frame.m_u) + "x" + std::to_string(frame.m_v) +
                    "x" + std::to_string(frame.snapshots) + ", config describes " +
                    std::to_string(sensing->m_u()) + "x" + std::to_string(sensing->m_v()) + "x" +
                    std::to_string(sensing->snapshots()));
  }
  if (truth && (truth->n_u() != cfg.n_u || truth->n_v() != cfg.n_v ||
                truth->n_bands() != cfg.n_bands)) {
    throw DataError("reference cube does not match the configured scene size");
  }
  RunReport rep = reconstruct_with(cfg, *sensing, frame, truth, options, artifacts, t0);
  if (artifacts) artifacts->frame = frame;
  return rep;
}

// --- sweeps ---------------------------------------------------------------------------

std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs,
                            const RunOptions& options) {
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const auto& cfg : configs) {
    SweepRow row;
    row.label = setup_label(cfg);
    row.rate = cfg.subsampling_rate();
    row.scene_seed = cfg.scene_seed;
    try {
      RunOptions o = options;
      if (!options.out_dir.empty()) {
        std::ostringstream name;
        name << row.label << "_r" << std::setprecision(4) << row.rate << "_s" << cfg.scene_seed;
        o.out_dir = options.out_dir / name.str();
      }
      o.keep_telemetry = false;
      row.report = run_experiment(cfg, o);
      if (options.log) {
        *options.log << row.label << " rate " << row.rate << ": " << std::fixed
                     << std::setprecision(2) << row.report->psnr << " dB ("
                     << row.report->iterations << " it, " << row.report->wall_seconds << " s)"
                     << std::defaultfloat << std::endl;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      if (options.log) *options.log << row.label << " rate " << row.rate << ": " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "label,architecture,layout,psf,rate,m_u,m_v,snapshots,scene_seed,psnr,init_psnr,"
        "baseline_psnr,iterations,converged,status\n";
  for (const auto& r : rows) {
    std::ostringstream line;
    line << std::fixed;
    line << r.label << ',';
    if (r.report) {
      const auto& c = r.report->config;
      line << to_string(c.architecture) << ',' << to_string(c.layout) << ',' << to_string(c.psf)
           << ',' << std::setprecision(6) << r.rate << ',' << c.m_u << ',' << c.m_v << ','
           << c.snapshots << ',' << r.scene_seed << ',' << std::setprecision(4) << r.report->psnr
           << ',' << r.report->init_psnr << ',';
      if (r.report->baseline_psnr) line << *r.report->baseline_psnr;
      line << ',' << r.report->iterations << ',' << (r.report->converged ? 1 : 0) << ",ok";
    } else {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      line << ",,," << std::setprecision(6) << r.rate << ",,,," << r.scene_seed << ",,,,,,error: "
           << err;
    }
    os << line.str() << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  write_sweep_csv(os, rows);
}

void write_sweep_svg(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::map<std::string, std::map<double, std::pair<double, int>>> curves;
  for (const auto& r : rows) {
    if (!r.report) continue;
    auto& cell = curves[r.label][r.rate];
    cell.first += r.report->psnr;
    cell.second += 1;
  }
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  for (const auto& [label, pts] : curves) {
    for (const auto& [rate, acc] : pts) {
      const double x = std::log2(rate), y = acc.first / acc.second;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (curves.empty()) {
    xmin = -4, xmax = 0, ymin = 20, ymax = 40;
  }
  if (xmax - xmin < 1e-9) xmax = xmin + 1;
  ymin = std::floor(ymin - 1);
  ymax = std::ceil(ymax + 1);
  const double W = 640, H = 420, L = 60, R = 150, T = 20, B = 50;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << std::fixed << std::setprecision(1);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  for (double x = std::ceil(xmin); x <= xmax + 1e-9; x += 1) {
    os << "<text x=\"" << px(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">2^"
       << static_cast<int>(x) << "</text>\n";
  }
  for (double y = ymin; y <= ymax + 1e-9; y += std::max(1.0, std::round((ymax - ymin) / 8))) {
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << y
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\">m/n</text>\n";
  os << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 14 "
     << (T + H - B) / 2 << ")\" text-anchor=\"middle\">PSNR (dB)</text>\n";
  std::size_t ci = 0;
  for (const auto& [label, pts] : curves) {
    const char* col = kColors[ci % 8];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (const auto& [rate, acc] : pts) {
      os << px(std::log2(rate)) << ',' << py(acc.first / acc.second) << ' ';
    }
    os << "\"/>\n";
    for (const auto& [rate, acc] : pts) {
      os << "<circle cx=\"" << px(std::log2(rate)) << "\" cy=\"" << py(acc.first / acc.second)
         << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    const double ly = T + 16 + 18 * static_cast<double>(ci);
    os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32
       << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">" << label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

void write_band_montage(const std::filesystem::path& path, const MSCube& cube, double lo,
                        double hi) {
  const std::size_t nb = cube.n_bands();
  const std::size_t per_row =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(nb))));
  const std::size_t grid_rows = (nb + per_row - 1) / per_row;
  constexpr std::size_t kGap = 2;
  const std::size_t rows = grid_rows * cube.n_u() + (grid_rows - 1) * kGap;
  const std::size_t cols = per_row * cube.n_v() + (per_row - 1) * kGap;
  std::vector<double> img(rows * cols, hi);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t r0 = (b / per_row) * (cube.n_u() + kGap);
    const std::size_t c0 = (b % per_row) * (cube.n_v() + kGap);
    for (std::size_t u = 0; u < cube.n_u(); ++u) {
      for (std::size_t v = 0; v < cube.n_v(); ++v) {
        img[(r0 + u) * cols + c0 + v] = cube.at(u, v, b);
      }
    }
  }
  write_png_gray(path, rows, cols, img, lo, hi);
}

}  // namespace mscs
