#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mscs/config.hpp"
#include "mscs/cube.hpp"
#include "mscs/layout.hpp"
#include "mscs/msrc.hpp"
#include "mscs/sensing.hpp"
#include "mscs/solver.hpp"

namespace mscs {

inline constexpr double kPsnrCap = 999.0;

struct NoisyMeasurements {
  Vec y;
  double sigma = 0.0;
  double tau = 0.0;  // ||w||_2 of the realized noise
};

// White Gaussian noise with sigma = ||y|| / sqrt(m) * 10^(-snr/20), so the
// expected SNR is snr_db. snr_db = +inf adds nothing.
NoisyMeasurements add_noise(std::span<const double> y, double snr_db, std::uint64_t seed);

// -10 log10(MSE), capped at kPsnrCap.
double psnr(std::span<const double> estimate, std::span<const double> truth);
std::vector<double> per_band_psnr(const MSCube& estimate, const MSCube& truth);

// Each band takes the sample of the nearest macro-pixel (mosaic layouts only),
// resampled to the n_u x n_v scene grid.
MSCube nn_demosaick_baseline(std::span<const double> snapshot, const SensorLayout& layout,
                             std::size_t n_u, std::size_t n_v,
                             const std::vector<double>& wavelengths_nm);

// Piecewise-smooth regions with smooth spectra, rendered at 4x resolution
// and box-averaged down. Values in [0, 0.95].
MSCube synthetic_scene(std::size_t n_u, std::size_t n_v, const std::vector<double>& wavelengths_nm,
                       std::uint64_t seed);

// CAVE-style directory of per-band PNGs (31 bands, 400..700 nm). Picks the
// band nearest to each target wavelength, crops a size x size ROI centred at
// (center_u, center_v), box-averages by `downsample`, and divides by the ROI
// maximum so values lie in [0, 1].
MSCube ingest_band_directory(const std::filesystem::path& dir, std::size_t center_u,
                             std::size_t center_v, std::size_t size,
                             const std::vector<double>& wavelengths_nm,
                             std::size_t downsample = 1, double first_nm = 400.0,
                             double step_nm = 10.0);

// Integer-factor box average of every band.
MSCube box_downsample(const MSCube& cube, std::size_t factor);

MSCube load_scene(const ExperimentConfig& cfg);
SensorLayout build_layout(const ExperimentConfig& cfg);
std::optional<Optics> build_optics(const ExperimentConfig& cfg);
std::unique_ptr<ExtendedSensing> build_sensing(const ExperimentConfig& cfg, SensorLayout layout);

// Noisy acquisition of `truth` through `sensing`.
MeasurementFrame simulate(const ExperimentConfig& cfg, const ExtendedSensing& sensing,
                          const MSCube& truth);

// m_u, m_v, snapshots set for a subsampling rate m/n: MSVI grows the
// sensor (m_u = n_u sqrt(rate n_bands), rounded), MSRC keeps m = n spatially
// and takes rate * n_bands snapshots.
ExperimentConfig at_rate(ExperimentConfig cfg, double rate);

struct RunReport {
  ExperimentConfig config;
  std::string label;
  double rate = 0.0;
  double tau = 0.0;
  double psnr = 0.0;
  double init_psnr = 0.0;
  std::optional<double> baseline_psnr;
  std::vector<double> band_psnr;
  std::size_t iterations = 0;
  bool converged = false;
  double relative_change = 0.0;
  double feasibility_gap = 0.0;
  double l1_objective = 0.0;
  std::size_t init_cg_iterations = 0;
  double wall_seconds = 0.0;
  std::string operator_description;
  std::string simulation_fingerprint;
  std::string reconstruction_fingerprint;
  std::string output_cube;

  nlohmann::json to_json() const;
};

struct RunOptions {
  std::filesystem::path out_dir;  // empty: no files written
  std::ostream* log = nullptr;
  bool keep_telemetry = true;
};

struct RunArtifacts {
  MSCube truth;
  MSCube estimate;
  MSCube init;
  MeasurementFrame frame;
  std::vector<TelemetryRow> telemetry;
};

// simulate -> interpolate + Tikhonov -> ADMM -> PSNR, all from the config.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {},
                         RunArtifacts* artifacts = nullptr);

// Reconstruction of an existing frame; truth (if given) is used for PSNR only.
RunReport reconstruct_frame(const ExperimentConfig& cfg, const MeasurementFrame& frame,
                            const MSCube* truth, const RunOptions& options = {},
                            RunArtifacts* artifacts = nullptr);

std::string setup_label(const ExperimentConfig& cfg);

struct SweepRow {
  std::string label;
  double rate = 0.0;
  std::uint64_t scene_seed = 0;
  std::optional<RunReport> report;
  std::string error;
};

// CSV columns:
//   label,architecture,layout,psf,rate,m_u,m_v,snapshots,scene_seed,
//   psnr,init_psnr,baseline_psnr,iterations,converged,status
// Failed runs keep their row with empty numbers and the error in status.
std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs,
                            const RunOptions& options = {});
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
// Mean PSNR per label against log2(rate), as SVG.
void write_sweep_svg(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

// All bands side by side (ceil(sqrt(n)) per row) as one 8-bit PNG.
void write_band_montage(const std::filesystem::path& path, const MSCube& cube, double lo = 0.0,
                        double hi = 1.0);

}  // namespace mscs
