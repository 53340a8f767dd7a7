#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mscs/fft.hpp"
#include "mscs/sensing.hpp"

namespace mscs {

// One real pattern per snapshot, each s_u x s_v row-major. Generated
// apertures hold i.i.d. +-1 symbols; other values are allowed so the
// complementary 0/1 acquisitions can be simulated too.
struct CodedAperture {
  std::size_t s_u = 0;
  std::size_t s_v = 0;
  std::uint64_t seed = 0;
  std::vector<Vec> patterns;

  std::size_t snapshots() const { return patterns.size(); }
};

// s = n + m - 1 per axis, m_S independent +-1 patterns.
CodedAperture generate_aperture(std::size_t n_u, std::size_t n_v, std::size_t m_u,
                                std::size_t m_v, std::size_t snapshots, std::uint64_t seed);

struct Optics {
  double aperture_pitch_m = 80e-6;  // Delta_s
  double sensor_pitch_m = 55e-6;    // Delta_m
  double focal_length_m = 40e-3;    // f

  // First zero of the far-field sinc^2, in sensor pixels: lambda f / (Delta_m Delta_s).
  double first_zero_px(double wavelength_m) const;
  // First-zero to first-zero width, 2 lambda f / (Delta_m Delta_s).
  double d_psf_px(double wavelength_m) const { return 2.0 * first_zero_px(wavelength_m); }
  // Aperture-to-scene distance implied by Delta_m = Delta_s f / d.
  double scene_distance_m() const { return aperture_pitch_m * focal_length_m / sensor_pitch_m; }
};

// Separable sinc^2 diffraction kernel on the sensor grid. Each 1-D tap is the
// integral of sinc^2 over one pixel cell (adaptive Gauss-Legendre), and the
// taps are normalized to sum to 1.
struct DiffractionKernel {
  double wavelength_m = 0.0;
  std::size_t mass_width = 0;  // smallest odd width holding 1 - 1e-4 of the 1-D mass
  std::size_t size = 0;        // odd width actually used (m_h)
  Vec profile;                 // 1-D taps, length size, centred
  Vec data;                    // size x size, outer(profile, profile)

  std::size_t half() const { return size / 2; }
  // Pixels inside the main lobe: 2 r - 1 where r is the offset of the first
  // local minimum of the profile.
  std::size_t main_lobe_width_px() const;
};

// max_size caps m_h (odd, 0 = no cap). Taps beyond s - 1 pixels from the
// centre cannot reach inside an s-wide pattern, so capping at 2 s - 1 leaves
// the cropped diffracted pattern unchanged up to normalization.
DiffractionKernel diffraction_kernel(const Optics& optics, double wavelength_m,
                                     std::size_t max_size = 0);

// Crop of the full 2-D convolution where kernel and image fully overlap:
// out (s_u - n_u + 1) x (s_v - n_v + 1), out[i][j] = sum S[i+n_u-1-a][j+n_v-1-b] X[a][b].
// Computed as an s_u x s_v circular convolution of the zero-padded X.
Vec valid_convolve_fft(std::span<const double> s, std::size_t s_u, std::size_t s_v,
                       std::span<const double> x, std::size_t n_u, std::size_t n_v);

// Centred s_u x s_v crop of kernel (*) pattern.
Vec diffract_pattern(std::span<const double> pattern, std::size_t s_u, std::size_t s_v,
                     const DiffractionKernel& kernel);

// Random-convolution sensor:
//   Y_p = sum_l M_l ((H_l * S_p) valid-conv X_l)
// Extended form: xbar holds each band zero-padded to a g_u x g_v grid
// (top-left), Phibar stacks per (p, l) circular convolutions F^* Sigma_{p,l} F
// on that grid, R_m picks each pixel's band inside the valid window. Any
// g >= s keeps the valid window free of wrap-around; by default g is the next
// FFT-friendly size (255 -> 256), fast_grid = false uses g = s.
class MsrcSensing final : public ExtendedSensing {
 public:
  MsrcSensing(std::size_t n_u, std::size_t n_v, std::vector<double> wavelengths_nm,
              SensorLayout layout, CodedAperture aperture,
              std::optional<Optics> optics = std::nullopt, bool fast_grid = true);
  ~MsrcSensing() override;

  std::size_t n_u() const override { return n_u_; }
  std::size_t n_v() const override { return n_v_; }
  std::size_t n_bands() const override { return wavelengths_.size(); }
  std::size_t m_u() const override { return layout_.m_u(); }
  std::size_t m_v() const override { return layout_.m_v(); }
  std::size_t snapshots() const override { return aperture_.snapshots(); }
  const SensorLayout& layout() const override { return layout_; }
  std::size_t s_u() const { return aperture_.s_u; }
  std::size_t s_v() const { return aperture_.s_v; }
  std::size_t grid_u() const { return g_u_; }
  std::size_t grid_v() const { return g_v_; }

  const CodedAperture& aperture() const { return aperture_; }
  const std::vector<DiffractionKernel>& kernels() const { return kernels_; }
  // S~_{p,l}, s_u x s_v (equal to S_p without optics).
  const Vec& diffracted(std::size_t p, std::size_t band) const;

  OperatorPtr phi_bar() const override { return phi_bar_; }
  std::shared_ptr<const RestrictionOp> r_m() const override { return r_m_; }
  std::shared_ptr<const RestrictionOp> r_n() const override { return r_n_; }

  // Diagonal in frequency: per band F^* (sum_p |Sigma_{p,l}|^2 + mu)^{-1} F.
  void normal_inverse(std::span<const double> v, double mu, std::span<double> out) const override;
  double phi_bar_norm() const override { return norm_; }
  Vec lift_sensor_cubes(std::span<const double> cubes) const override;

  // sum_p |Sigma_{p,l}|^2 on the half spectrum of band l.
  std::span<const double> sigma_bar_sq(std::size_t band) const;
  const Fft2& fft() const;

  std::uint64_t fingerprint() const override { return fingerprint_; }
  std::string describe() const override;

  struct Spectra;

 private:
  std::size_t n_u_, n_v_;
  std::size_t g_u_ = 0, g_v_ = 0;
  std::vector<double> wavelengths_;
  SensorLayout layout_;
  CodedAperture aperture_;
  std::optional<Optics> optics_;
  std::vector<DiffractionKernel> kernels_;
  std::vector<Vec> diffracted_;
  std::shared_ptr<const Spectra> spectra_;
  OperatorPtr phi_bar_;
  std::shared_ptr<const RestrictionOp> r_m_, r_n_;
  double norm_ = 0.0;
  std::uint64_t fingerprint_ = 0;
};

// Noiseless measurements of one scene under the three ways of obtaining a
// +-1 pattern from a 0/1 aperture S+: directly, as y+ - y- with the
// complement S- = 1 - S+, and as 2 y+ - y_on with an all-open aperture.
struct PatternEquivalence {
  Vec y_signed;
  Vec y_difference;
  Vec y_open;
  double max_relative_gap = 0.0;
};

PatternEquivalence pattern_equivalence_check(std::span<const double> scene, std::size_t n_u,
                                             std::size_t n_v,
                                             const std::vector<double>& wavelengths_nm,
                                             const SensorLayout& layout,
                                             const CodedAperture& s_plus,
                                             std::optional<Optics> optics = std::nullopt);

// Text report sizing an MSRC prototype for the given optics and aperture.
std::string sizing_report(const Optics& optics, std::size_t s_u, std::size_t s_v,
                          const std::vector<double>& wavelengths_nm);

}  // namespace mscs
