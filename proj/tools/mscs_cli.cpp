// Command-line front end: ingest, simulate, reconstruct, sweep, sizing-report,
// selftest.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad configuration or arguments,
// 3 missing or malformed data, 4 solver did not converge.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "mscs/errors.hpp"
#include "mscs/harness.hpp"
#include "mscs/image_io.hpp"
#include "mscs/msrc.hpp"
#include "mscs/msvi.hpp"
#include "mscs/random.hpp"
#include "mscs/simd.hpp"

namespace fs = std::filesystem;
using namespace mscs;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConvergence = 4;

// Config sources in increasing precedence: defaults, --config file,
// per-key flags (--n_u 64), --set key=value.
struct ConfigArgs {
  std::string file;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "config file (key = value lines)");
    app->add_option("--set", sets, "override, key=value (repeatable)");
    for (const auto& key : ExperimentConfig::keys()) {
      app->add_option("--" + key, flags[key])->group("Config keys");
    }
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg = file.empty() ? ExperimentConfig{} : load_config(file);
    for (const auto& [k, v] : flags) {
      if (!v.empty()) cfg.set(k, v);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

void print_report(const RunReport& r) {
  std::cout << std::fixed << std::setprecision(2);
  std::cout << r.label << "  m/n = " << std::setprecision(4) << r.rate << "\n";
  std::cout << std::setprecision(2) << "  psnr        " << r.psnr << " dB\n"
            << "  init psnr   " << r.init_psnr << " dB\n";
  if (r.baseline_psnr) std::cout << "  nn baseline " << *r.baseline_psnr << " dB\n";
  std::cout << "  iterations  " << r.iterations << (r.converged ? "" : " (cap)") << "\n"
            << "  wall time   " << r.wall_seconds << " s\n";
  std::cout << std::defaultfloat;
}

std::vector<double> parse_rates(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto slash = tok.find('/');
    try {
      if (slash == std::string::npos) {
        out.push_back(std::stod(tok));
      } else {
        out.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
      }
    } catch (const std::exception&) {
      throw ConfigError("bad rate '" + tok + "'");
    }
  }
  return out;
}

// "msvi-mosaic", "msvi-random", "msvi-tiled", "msrc", "msrc-5px", "msrc-11px"
ExperimentConfig apply_setup(ExperimentConfig cfg, const std::string& setup) {
  if (setup.rfind("msvi-", 0) == 0) {
    cfg.architecture = Architecture::msvi;
    cfg.layout = parse_layout_kind(setup.substr(5));
    return cfg;
  }
  cfg.architecture = Architecture::msrc;
  if (setup == "msrc") {
    cfg.psf = PsfMode::none;
  } else if (setup.rfind("msrc-", 0) == 0) {
    cfg.psf = parse_psf_mode(setup.substr(5));
  } else {
    throw ConfigError("unknown setup '" + setup + "'");
  }
  return cfg;
}

int selftest() {
  int failures = 0;
  auto check = [&](const std::string& what, double value, double limit) {
    const bool ok = value <= limit;
    std::cout << (ok ? "ok   " : "FAIL ") << what << "  " << std::scientific
              << std::setprecision(2) << value << std::defaultfloat << "\n";
    if (!ok) ++failures;
  };
  const auto wl = uniform_wavelengths(4);
  MsviSensing msvi(16, 16, 4, make_layout(LayoutKind::mosaic, 24, 24, 4, 2));
  check("msvi adjoint", adjoint_dot_test(*msvi.phi()), 1e-10);
  MsrcSensing msrc(16, 16, wl, make_layout(LayoutKind::random, 16, 16, 4, 2, 3),
                   generate_aperture(16, 16, 16, 16, 2, 5), Optics{});
  check("msrc adjoint", adjoint_dot_test(*msrc.phi()), 1e-10);
  auto a = std::make_shared<AnalysisTransform>(16, 16, 4);
  const Vec x = gaussian_vector(a->cols(), 9);
  const Vec back = a->apply_adjoint(a->apply(x));
  check("analysis tightness", std::sqrt(simd::dist_sq(back, x) / simd::norm_sq(x)), 1e-10);
  if (const auto* fast = simd::avx2_table()) {
    const Vec p = gaussian_vector(1003, 1), q = gaussian_vector(1003, 2);
    const auto& ref = simd::scalar_table();
    const double d0 = ref.dot(p.size(), p.data(), q.data());
    const double d1 = fast->dot(p.size(), p.data(), q.data());
    check("avx2 dot vs scalar", std::fabs(d0 - d1) / std::fabs(d0), 1e-12);
  }
  std::cout << "kernels: " << simd::active().name << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multispectral compressive imaging: simulation and reconstruction"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "build a cube from per-band PNGs, or a frame from a raw mosaic PNG");
  std::string in_dir, in_png, in_out;
  std::size_t roi_u = 0, roi_v = 0, roi_size = 256, downsample = 1;
  double first_nm = 400.0, step_nm = 10.0;
  ingest->add_option("--dir", in_dir, "directory of per-band PNGs (sorted by name)");
  ingest->add_option("--mosaic-png", in_png, "raw single-snapshot sensor image");
  ingest->add_option("--out", in_out, "output .mscube or .msframe")->required();
  ingest->add_option("--center-u", roi_u, "ROI centre row");
  ingest->add_option("--center-v", roi_v, "ROI centre column");
  ingest->add_option("--size", roi_size, "ROI side");
  ingest->add_option("--downsample", downsample, "box-downsampling factor");
  ingest->add_option("--first-nm", first_nm, "wavelength of the first PNG");
  ingest->add_option("--step-nm", step_nm, "wavelength step between PNGs");
  ConfigArgs ingest_cfg;
  ingest_cfg.attach(ingest);

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "acquire a scene and write the frame");
  std::string sim_out = "sim";
  simulate_cmd->add_option("--out", sim_out, "output directory");
  ConfigArgs sim_cfg;
  sim_cfg.attach(simulate_cmd);

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "reconstruct from a frame, or simulate and reconstruct");
  std::string rec_frame, rec_truth, rec_out = "run";
  bool allow_cap = false;
  recon->add_option("--frame", rec_frame, "measurement file; omitted = simulate from the config");
  recon->add_option("--truth", rec_truth, "reference cube for PSNR");
  recon->add_option("--out", rec_out, "output directory");
  recon->add_flag("--allow-cap", allow_cap, "exit 0 even if the iteration cap was hit");
  ConfigArgs rec_cfg;
  rec_cfg.attach(recon);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "PSNR versus m/n for several setups");
  std::string rates = "1/16,1/4,1/2,1", setups = "msvi-mosaic,msvi-random,msrc,msrc-5px,msrc-11px";
  std::string seeds = "1", sweep_out = "sweep";
  sweep_cmd->add_option("--rates", rates, "comma list, fractions allowed");
  sweep_cmd->add_option("--setups", setups, "comma list of setups");
  sweep_cmd->add_option("--seeds", seeds, "comma list of scene seeds");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  ConfigArgs sweep_cfg;
  sweep_cfg.attach(sweep_cmd);

  // sizing-report
  auto* sizing = app.add_subcommand("sizing-report", "diffraction and geometry figures for an MSRC prototype");
  ConfigArgs sizing_cfg;
  sizing_cfg.attach(sizing);

  auto* self = app.add_subcommand("selftest", "quick operator and kernel checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ingest) {
      if (!in_png.empty()) {
        const GrayImage img = read_png_gray(in_png);
        MeasurementFrame f;
        f.m_u = img.rows;
        f.m_v = img.cols;
        f.data = img.pixels;
        write_frame(in_out, f);
        std::cout << "frame " << f.m_u << "x" << f.m_v << " -> " << in_out << "\n";
        return 0;
      }
      if (in_dir.empty()) throw ConfigError("ingest needs --dir or --mosaic-png");
      const ExperimentConfig cfg = ingest_cfg.build();
      const MSCube cube = ingest_band_directory(
          in_dir, roi_u, roi_v, roi_size,
          uniform_wavelengths(cfg.n_bands, cfg.wavelength_min, cfg.wavelength_max), downsample,
          first_nm, step_nm);
      write_cube(in_out, cube);
      std::cout << "cube " << cube.n_u() << "x" << cube.n_v() << "x" << cube.n_bands() << " -> "
                << in_out << "\n";
      return 0;
    }
    if (*simulate_cmd) {
      const ExperimentConfig cfg = sim_cfg.build();
      fs::create_directories(sim_out);
      const MSCube truth = load_scene(cfg);
      const auto sensing = build_sensing(cfg, build_layout(cfg));
      const MeasurementFrame frame = simulate(cfg, *sensing, truth);
      write_cube(fs::path(sim_out) / "truth.mscube", truth);
      write_frame(fs::path(sim_out) / "frame.msframe", frame);
      write_layout_png(fs::path(sim_out) / "layout.png", sensing->layout());
      write_band_montage(fs::path(sim_out) / "truth.png", truth);
      save_config(fs::path(sim_out) / "config.txt", cfg);
      std::cout << sensing->describe() << "\n"
                << "m = " << frame.size() << ", tau = " << frame.noise_bound << "\n"
                << "fingerprint " << hex64(sensing->fingerprint()) << "\n";
      return 0;
    }
    if (*recon) {
      const ExperimentConfig cfg = rec_cfg.build();
      RunOptions opts;
      opts.out_dir = rec_out;
      opts.log = &std::cerr;
      RunReport rep;
      if (rec_frame.empty()) {
        rep = run_experiment(cfg, opts);
      } else {
        const MeasurementFrame frame = read_frame(rec_frame);
        std::optional<MSCube> truth;
        if (!rec_truth.empty()) truth = read_cube(rec_truth);
        rep = reconstruct_frame(cfg, frame, truth ? &*truth : nullptr, opts);
      }
      print_report(rep);
      if (!rep.converged && !allow_cap) {
        std::cerr << "iteration cap reached before tol " << cfg.tol << "\n";
        return kExitNoConvergence;
      }
      return 0;
    }
    if (*sweep_cmd) {
      const ExperimentConfig base = sweep_cfg.build();
      std::vector<ExperimentConfig> configs;
      std::stringstream ss(setups);
      std::string setup;
      std::vector<std::uint64_t> seed_list;
      for (const auto& s : parse_rates(seeds)) seed_list.push_back(static_cast<std::uint64_t>(s));
      while (std::getline(ss, setup, ',')) {
        for (double r : parse_rates(rates)) {
          for (auto seed : seed_list) {
            ExperimentConfig c = apply_setup(base, setup);
            c.scene_seed = seed;
            configs.push_back(at_rate(c, r));
          }
        }
      }
      fs::create_directories(sweep_out);
      RunOptions opts;
      opts.log = &std::cerr;
      const auto rows = sweep(configs, opts);
      write_sweep_csv(fs::path(sweep_out) / "sweep.csv", rows);
      write_sweep_svg(fs::path(sweep_out) / "sweep.svg", rows);
      write_sweep_csv(std::cout, rows);
      return 0;
    }
    if (*sizing) {
      const ExperimentConfig cfg = sizing_cfg.build();
      Optics optics{cfg.aperture_pitch_um * 1e-6, cfg.effective_sensor_pitch_um() * 1e-6,
                    cfg.focal_length_mm * 1e-3};
      std::cout << sizing_report(optics, cfg.n_u + cfg.m_u - 1, cfg.n_v + cfg.m_v - 1,
                                 uniform_wavelengths(cfg.n_bands, cfg.wavelength_min,
                                                     cfg.wavelength_max));
      return 0;
    }
    if (*self) return selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
