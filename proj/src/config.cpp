#include "mscs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mscs/errors.hpp"

namespace mscs {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + std::string(key) + "': not a number: " + s);
  }
  if (pos != s.size()) throw ConfigError("key '" + std::string(key) + "': not a number: " + s);
  return out;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + std::string(key) + "': not an integer: " + std::string(v));
  }
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Architecture a) { return a == Architecture::msvi ? "msvi" : "msrc"; }

std::string_view to_string(PsfMode m) {
  switch (m) {
    case PsfMode::none: return "none";
    case PsfMode::px5: return "5px";
    case PsfMode::px11: return "11px";
    case PsfMode::custom: return "custom";
  }
  return "?";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "msvi" || name == "MSVI") return Architecture::msvi;
  if (name == "msrc" || name == "MSRC") return Architecture::msrc;
  throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

PsfMode parse_psf_mode(std::string_view name) {
  if (name == "none") return PsfMode::none;
  if (name == "5px") return PsfMode::px5;
  if (name == "11px") return PsfMode::px11;
  if (name == "custom") return PsfMode::custom;
  throw ConfigError("unknown psf mode '" + std::string(name) + "'");
}

double ExperimentConfig::effective_sensor_pitch_um() const {
  switch (psf) {
    case PsfMode::px5: return 110.0;   // 20x magnified 5.5 um CMOS pitch
    case PsfMode::px11: return 55.0;   // 10x magnified
    default: return sensor_pitch_um;
  }
}

double ExperimentConfig::subsampling_rate() const {
  const double m = static_cast<double>(m_u * m_v) *
                   static_cast<double>(architecture == Architecture::msrc ? snapshots : 1);
  return m / static_cast<double>(n_u * n_v * n_bands);
}

void ExperimentConfig::validate() const {
  if (n_u == 0 || n_v == 0 || n_bands == 0 || m_u == 0 || m_v == 0 || snapshots == 0) {
    throw ConfigError("all dimensions must be positive");
  }
  if (!(wavelength_max > wavelength_min) && n_bands > 1) {
    throw ConfigError("wavelength_max must exceed wavelength_min");
  }
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("snr_db must be a number or +inf");
  }
  if ((layout == LayoutKind::mosaic || layout == LayoutKind::tiled) &&
      period * period != n_bands) {
    throw ConfigError("mosaic/tiled layouts need n_bands == period^2");
  }
  if (architecture == Architecture::msvi) {
    if (m_u < n_u || m_v < n_v) throw ConfigError("MSVI needs sensor dims >= target dims");
    if (snapshots != 1) throw ConfigError("MSVI is single-snapshot");
  }
  if (!(rho > 0) || !(mu1_scale > 0)) throw ConfigError("rho and mu1_scale must be positive");
  if (!(tol > 0) || max_iter == 0) throw ConfigError("tol and max_iter must be positive");
  if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");
  if (!(aperture_pitch_um > 0) || !(sensor_pitch_um > 0) || !(focal_length_mm > 0)) {
    throw ConfigError("optical parameters must be positive");
  }
  if (wavelet != "db4" && wavelet != "haar") throw ConfigError("wavelet must be db4 or haar");
  if (prior_weights != "balanced" && prior_weights != "identity" && prior_weights != "atrous") {
    throw ConfigError("prior_weights must be balanced, identity or atrous");
  }
  if (wavelet_levels == 0) throw ConfigError("wavelet_levels must be positive");
  if (lanczos_order < 1) throw ConfigError("lanczos_order must be >= 1");
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "architecture", "layout", "period", "n_u", "n_v", "n_bands", "wavelength_min",
      "wavelength_max", "m_u", "m_v", "snapshots", "snr_db", "psf", "aperture_pitch_um",
      "sensor_pitch_um", "focal_length_mm", "rho", "mu1_scale", "max_iter", "tol",
      "x_min", "x_max", "init_cg_tol", "init_cg_max_iter", "wavelet", "wavelet_levels",
      "prior_weights", "lanczos_order", "scene", "scene_seed", "layout_seed",
      "aperture_seed", "noise_seed"};
  return k;
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  return {
      {"architecture", std::string(to_string(architecture))},
      {"layout", std::string(to_string(layout))},
      {"period", std::to_string(period)},
      {"n_u", std::to_string(n_u)},
      {"n_v", std::to_string(n_v)},
      {"n_bands", std::to_string(n_bands)},
      {"wavelength_min", fmt(wavelength_min)},
      {"wavelength_max", fmt(wavelength_max)},
      {"m_u", std::to_string(m_u)},
      {"m_v", std::to_string(m_v)},
      {"snapshots", std::to_string(snapshots)},
      {"snr_db", fmt(snr_db)},
      {"psf", std::string(to_string(psf))},
      {"aperture_pitch_um", fmt(aperture_pitch_um)},
      {"sensor_pitch_um", fmt(sensor_pitch_um)},
      {"focal_length_mm", fmt(focal_length_mm)},
      {"rho", fmt(rho)},
      {"mu1_scale", fmt(mu1_scale)},
      {"max_iter", std::to_string(max_iter)},
      {"tol", fmt(tol)},
      {"x_min", fmt(x_min)},
      {"x_max", fmt(x_max)},
      {"init_cg_tol", fmt(init_cg_tol)},
      {"init_cg_max_iter", std::to_string(init_cg_max_iter)},
      {"wavelet", wavelet},
      {"wavelet_levels", std::to_string(wavelet_levels)},
      {"prior_weights", prior_weights},
      {"lanczos_order", std::to_string(lanczos_order)},
      {"scene", scene},
      {"scene_seed", std::to_string(scene_seed)},
      {"layout_seed", std::to_string(layout_seed)},
      {"aperture_seed", std::to_string(aperture_seed)},
      {"noise_seed", std::to_string(noise_seed)},
  };
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  if (key == "architecture") architecture = parse_architecture(v);
  else if (key == "layout") layout = parse_layout_kind(v);
  else if (key == "period") period = to_int<std::size_t>(key, v);
  else if (key == "n_u") n_u = to_int<std::size_t>(key, v);
  else if (key == "n_v") n_v = to_int<std::size_t>(key, v);
  else if (key == "n_bands") n_bands = to_int<std::size_t>(key, v);
  else if (key == "wavelength_min") wavelength_min = to_double(key, v);
  else if (key == "wavelength_max") wavelength_max = to_double(key, v);
  else if (key == "m_u") m_u = to_int<std::size_t>(key, v);
  else if (key == "m_v") m_v = to_int<std::size_t>(key, v);
  else if (key == "snapshots") snapshots = to_int<std::size_t>(key, v);
  else if (key == "snr_db") snr_db = to_double(key, v);
  else if (key == "psf") psf = parse_psf_mode(v);
  else if (key == "aperture_pitch_um") aperture_pitch_um = to_double(key, v);
  else if (key == "sensor_pitch_um") sensor_pitch_um = to_double(key, v);
  else if (key == "focal_length_mm") focal_length_mm = to_double(key, v);
  else if (key == "rho") rho = to_double(key, v);
  else if (key == "mu1_scale") mu1_scale = to_double(key, v);
  else if (key == "max_iter") max_iter = to_int<std::size_t>(key, v);
  else if (key == "tol") tol = to_double(key, v);
  else if (key == "x_min") x_min = to_double(key, v);
  else if (key == "x_max") x_max = to_double(key, v);
  else if (key == "init_cg_tol") init_cg_tol = to_double(key, v);
  else if (key == "init_cg_max_iter") init_cg_max_iter = to_int<std::size_t>(key, v);
  else if (key == "wavelet") wavelet = v;
  else if (key == "wavelet_levels") wavelet_levels = to_int<std::size_t>(key, v);
  else if (key == "prior_weights") prior_weights = v;
  else if (key == "lanczos_order") lanczos_order = to_int<int>(key, v);
  else if (key == "scene") scene = v;
  else if (key == "scene_seed") scene_seed = to_int<std::uint64_t>(key, v);
  else if (key == "layout_seed") layout_seed = to_int<std::uint64_t>(key, v);
  else if (key == "aperture_seed") aperture_seed = to_int<std::uint64_t>(key, v);
  else if (key == "noise_seed") noise_seed = to_int<std::uint64_t>(key, v);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : kv) cfg.set(k, v);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const auto kv = cfg.to_map();
  std::ostringstream os;
  for (const auto& key : ExperimentConfig::keys()) os << key << " = " << kv.at(key) << '\n';
  return os.str();
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os << serialize_config(cfg);
}

}  // namespace mscs
