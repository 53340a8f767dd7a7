#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mscs/layout.hpp"

namespace mscs {

enum class Architecture { msvi, msrc };
enum class PsfMode { none, px5, px11, custom };

std::string_view to_string(Architecture a);
std::string_view to_string(PsfMode m);
Architecture parse_architecture(std::string_view name);
PsfMode parse_psf_mode(std::string_view name);

// Everything needed to simulate and reconstruct one acquisition.
//
// Serialized as "key = value" lines ('#' starts a comment). Keys are the
// member names below; see ExperimentConfig::keys() for the full list.
struct ExperimentConfig {
  Architecture architecture = Architecture::msvi;
  LayoutKind layout = LayoutKind::mosaic;
  std::size_t period = 4;

  std::size_t n_u = 128;
  std::size_t n_v = 128;
  std::size_t n_bands = 16;
  double wavelength_min = 470.0;  // nm
  double wavelength_max = 620.0;  // nm

  std::size_t m_u = 256;
  std::size_t m_v = 256;
  std::size_t snapshots = 1;

  double snr_db = 40.0;  // +inf means noiseless

  PsfMode psf = PsfMode::none;
  double aperture_pitch_um = 80.0;
  double sensor_pitch_um = 55.0;  // only read for psf = custom
  double focal_length_mm = 40.0;

  // Solver.
  double rho = 40.0;
  double mu1_scale = 50.0;  // mu_1 = mu1_scale * rho / ||Phi_bar||^2
  std::size_t max_iter = 2000;
  double tol = 5e-5;
  double x_min = 0.0;
  double x_max = 1.0;
  double init_cg_tol = 1e-3;
  std::size_t init_cg_max_iter = 10;

  // Prior.
  std::string wavelet = "db4";
  std::size_t wavelet_levels = 3;
  std::string prior_weights = "balanced";  // balanced | identity | atrous

  int lanczos_order = 3;

  std::string scene = "synthetic";  // "synthetic" or a cube file path
  std::uint64_t scene_seed = 1;
  std::uint64_t layout_seed = 7;
  std::uint64_t aperture_seed = 11;
  std::uint64_t noise_seed = 13;

  // Effective sensor pitch in micrometres for the PSF mode.
  double effective_sensor_pitch_um() const;
  // m / n = m_u m_v m_S / (n_u n_v n_bands); MSVI always has m_S = 1.
  double subsampling_rate() const;

  void validate() const;

  std::map<std::string, std::string> to_map() const;
  static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
  static const std::vector<std::string>& keys();

  // Applies a single "key=value" override.
  void set(std::string_view key, std::string_view value);
};

std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

}  // namespace mscs
