#include "mscs/msrc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "mscs/errors.hpp"
#include "mscs/random.hpp"
#include "mscs/simd.hpp"

namespace mscs {

CodedAperture generate_aperture(std::size_t n_u, std::size_t n_v, std::size_t m_u,
                                std::size_t m_v, std::size_t snapshots, std::uint64_t seed) {
  if (n_u == 0 || n_v == 0 || m_u == 0 || m_v == 0 || snapshots == 0) {
    throw ConfigError("generate_aperture: dimensions must be >= 1");
  }
  CodedAperture ca;
  ca.s_u = n_u + m_u - 1;
  ca.s_v = n_v + m_v - 1;
  ca.seed = seed;
  Rng rng(seed);
  ca.patterns.resize(snapshots);
  for (auto& p : ca.patterns) {
    p.resize(ca.s_u * ca.s_v);
    for (double& v : p) v = rng.sign();
  }
  return ca;
}

double Optics::first_zero_px(double wavelength_m) const {
  return wavelength_m * focal_length_m / (sensor_pitch_m * aperture_pitch_m);
}

// --- diffraction kernel ------------------------------------------------------

namespace {

constexpr double kGlX[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                            0.8650633666889845, 0.9739065285171717};
constexpr double kGlW[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                            0.1494513491505806, 0.0666713443086881};

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += kGlW[i] * (f(c - h * kGlX[i]) + f(c + h * kGlX[i]));
  return s * h;
}

double adaptive_gl(const std::function<double(double)>& f, double a, double b, double whole,
                   double rel_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, m);
  const double right = gauss_legendre(f, m, b);
  const double both = left + right;
  if (depth >= 40 || std::fabs(both - whole) <= rel_tol * std::fabs(both)) return both;
  return adaptive_gl(f, a, m, left, rel_tol, depth + 1) +
         adaptive_gl(f, m, b, right, rel_tol, depth + 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  return adaptive_gl(f, a, b, gauss_legendre(f, a, b), rel_tol, 0);
}

constexpr double kQuadTol = 1e-8;
constexpr double kMassLoss = 1e-4;

}  // namespace

std::size_t DiffractionKernel::main_lobe_width_px() const {
  const std::size_t k = half();
  for (std::size_t r = 1; r + 1 <= k; ++r) {
    const double here = profile[k + r];
    if (here <= profile[k + r - 1] && here < profile[k + r + 1]) return 2 * r - 1;
  }
  return size;
}

DiffractionKernel diffraction_kernel(const Optics& optics, double wavelength_m,
                                     std::size_t max_size) {
  if (!(optics.aperture_pitch_m > 0) || !(optics.sensor_pitch_m > 0) ||
      !(optics.focal_length_m > 0) || !(wavelength_m > 0)) {
    throw ConfigError("diffraction_kernel: optical parameters must be positive");
  }
  if (max_size != 0 && max_size % 2 == 0) throw ConfigError("kernel size cap must be odd");
  const double z = optics.first_zero_px(wavelength_m);
  auto f = [z](double p) {
    const double x = std::numbers::pi * p / z;
    if (x == 0.0) return 1.0;
    const double s = std::sin(x) / x;
    return s * s;
  };
  auto tap = [&](long i) { return integrate(f, i - 0.5, i + 0.5, kQuadTol); };

  // The taps tile the line, so the untruncated 1-D mass is the integral of
  // sinc^2(p/z), which is z.
  std::vector<double> taps{tap(0)};
  double mass = taps[0];
  const std::size_t hard_limit = 1'000'000;
  while (mass < (1.0 - kMassLoss) * z && taps.size() < hard_limit) {
    taps.push_back(tap(static_cast<long>(taps.size())));
    mass += 2.0 * taps.back();
  }

  DiffractionKernel k;
  k.wavelength_m = wavelength_m;
  k.mass_width = 2 * taps.size() - 1;
  k.size = max_size ? std::min(k.mass_width, max_size) : k.mass_width;
  // A few extra taps beyond the mass rule are harmless; make sure the
  // main lobe and first side lobe are represented for width detection.
  const std::size_t half = k.size / 2;
  while (taps.size() < half + 1) taps.push_back(tap(static_cast<long>(taps.size())));

  k.profile.resize(k.size);
  for (std::size_t i = 0; i <= half; ++i) {
    k.profile[half + i] = taps[i];
    k.profile[half - i] = taps[i];
  }
  double sum = 0.0;
  for (double v : k.profile) sum += v;
  for (double& v : k.profile) v /= sum;

  k.data.resize(k.size * k.size);
  for (std::size_t i = 0; i < k.size; ++i) {
    for (std::size_t j = 0; j < k.size; ++j) k.data[i * k.size + j] = k.profile[i] * k.profile[j];
  }
  double s2 = 0.0;
  for (double v : k.data) s2 += v;
  for (double& v : k.data) v /= s2;
  return k;
}

// --- convolutions -----------------------------------------------------------------

Vec valid_convolve_fft(std::span<const double> s, std::size_t s_u, std::size_t s_v,
                       std::span<const double> x, std::size_t n_u, std::size_t n_v) {
  if (s.size() != s_u * s_v || x.size() != n_u * n_v || n_u > s_u || n_v > s_v) {
    throw ConfigError("valid_convolve_fft: size mismatch");
  }
  const std::size_t m_u = s_u - n_u + 1, m_v = s_v - n_v + 1;
  Fft2 fft(s_u, s_v);
  Vec pad(s_u * s_v, 0.0);
  for (std::size_t u = 0; u < n_u; ++u) {
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(u * n_v), n_v,
                pad.begin() + static_cast<std::ptrdiff_t>(u * s_v));
  }
  std::vector<cplx> fs(fft.spectrum_size()), fx(fft.spectrum_size());
  fft.forward(s, fs);
  fft.forward(pad, fx);
  simd::cmul(fs, fx, fx);
  Vec full(s_u * s_v);
  fft.inverse(fx, full);
  const double inv_n = 1.0 / static_cast<double>(s_u * s_v);
  Vec out(m_u * m_v);
  for (std::size_t i = 0; i < m_u; ++i) {
    for (std::size_t j = 0; j < m_v; ++j) {
      out[i * m_v + j] = full[(i + n_u - 1) * s_v + (j + n_v - 1)] * inv_n;
    }
  }
  return out;
}

namespace {

// T(i, k) = profile[i + K - k]: centred crop of the 1-D convolution.
Eigen::MatrixXd crop_conv_matrix(const Vec& profile, std::size_t s) {
  const long k_half = static_cast<long>(profile.size() / 2);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(s, s);
  for (long i = 0; i < static_cast<long>(s); ++i) {
    for (long k = 0; k < static_cast<long>(s); ++k) {
      const long idx = i + k_half - k;
      if (idx >= 0 && idx < static_cast<long>(profile.size())) t(i, k) = profile[idx];
    }
  }
  return t;
}

}  // namespace

Vec diffract_pattern(std::span<const double> pattern, std::size_t s_u, std::size_t s_v,
                     const DiffractionKernel& kernel) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  if (pattern.size() != s_u * s_v) throw ConfigError("diffract_pattern: size mismatch");
  const Eigen::MatrixXd tu = crop_conv_matrix(kernel.profile, s_u);
  const Eigen::MatrixXd tv = crop_conv_matrix(kernel.profile, s_v);
  RowMat r = tu * Eigen::Map<const RowMat>(pattern.data(), s_u, s_v) * tv.transpose();
  return Vec(r.data(), r.data() + r.size());
}

// --- the operator --------------------------------------------------------------------

struct MsrcSensing::Spectra {
  std::size_t bands = 0, snaps = 0;
  std::unique_ptr<Fft2> fft;
  std::vector<cplx> sigma;  // [(p * bands + l) * spec], already divided by s_u s_v
  Vec sigma2;               // [l * spec], sum_p |Sigma_{p,l}|^2, unscaled

  std::size_t spec() const { return fft->spectrum_size(); }
  std::span<const cplx> sig(std::size_t p, std::size_t l) const {
    return std::span<const cplx>(sigma).subspan((p * bands + l) * spec(), spec());
  }
};

namespace {

class MsrcPhiBar final : public LinearOperator {
 public:
  explicit MsrcPhiBar(std::shared_ptr<const MsrcSensing::Spectra> sp)
      : LinearOperator(sp->snaps * sp->bands * sp->fft->size(), sp->bands * sp->fft->size()),
        sp_(std::move(sp)) {}

  void apply_into(std::span<const double> x, std::span<double> y) const override {
    check_apply(x, y);
    const Fft2& fft = *sp_->fft;
    const std::size_t n = fft.size(), bands = sp_->bands;
    std::vector<cplx> fx(sp_->spec()), prod(sp_->spec());
    for (std::size_t l = 0; l < bands; ++l) {
      fft.forward(x.subspan(l * n, n), fx);
      for (std::size_t p = 0; p < sp_->snaps; ++p) {
        simd::cmul(sp_->sig(p, l), fx, prod);
        fft.inverse(prod, y.subspan((p * bands + l) * n, n));
      }
    }
  }

  void adjoint_into(std::span<const double> z, std::span<double> x) const override {
    check_adjoint(z, x);
    const Fft2& fft = *sp_->fft;
    const std::size_t n = fft.size(), bands = sp_->bands;
    std::vector<cplx> fz(sp_->spec()), acc(sp_->spec());
    for (std::size_t l = 0; l < bands; ++l) {
      std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
      for (std::size_t p = 0; p < sp_->snaps; ++p) {
        fft.forward(z.subspan((p * bands + l) * n, n), fz);
        simd::cmul_conj_acc(sp_->sig(p, l), fz, acc);
      }
      fft.inverse(acc, x.subspan(l * n, n));
    }
  }

  OpKind kind() const override { return OpKind::dft_diagonalized; }
  std::string name() const override { return "msrc-phibar"; }

 private:
  std::shared_ptr<const MsrcSensing::Spectra> sp_;
};

}  // namespace

MsrcSensing::MsrcSensing(std::size_t n_u, std::size_t n_v, std::vector<double> wavelengths_nm,
                         SensorLayout layout, CodedAperture aperture, std::optional<Optics> optics,
                         bool fast_grid)
    : n_u_(n_u),
      n_v_(n_v),
      wavelengths_(std::move(wavelengths_nm)),
      layout_(std::move(layout)),
      aperture_(std::move(aperture)),
      optics_(optics) {
  const std::size_t bands = wavelengths_.size();
  if (bands == 0 || n_u_ == 0 || n_v_ == 0) throw ConfigError("MSRC: empty scene");
  if (layout_.n_bands() != bands) throw ConfigError("MSRC: layout band count differs from scene");
  if (aperture_.snapshots() == 0) throw ConfigError("MSRC: aperture has no patterns");
  if (aperture_.s_u != n_u_ + layout_.m_u() - 1 || aperture_.s_v != n_v_ + layout_.m_v() - 1) {
    throw ConfigError("MSRC: aperture must be (n + m - 1) per axis, got " +
                      std::to_string(aperture_.s_u) + "x" + std::to_string(aperture_.s_v));
  }
  for (const auto& p : aperture_.patterns) {
    if (p.size() != aperture_.s_u * aperture_.s_v) throw ConfigError("MSRC: bad pattern size");
  }
  const std::size_t su = aperture_.s_u, sv = aperture_.s_v, snaps = aperture_.snapshots();
  g_u_ = fast_grid ? good_fft_size(su) : su;
  g_v_ = fast_grid ? good_fft_size(sv) : sv;
  const std::size_t gu = g_u_, gv = g_v_;

  if (optics_) {
    const std::size_t cap = 2 * std::max(su, sv) - 1;
    for (double wl : wavelengths_) kernels_.push_back(diffraction_kernel(*optics_, wl * 1e-9, cap));
  }

  auto sp = std::make_shared<Spectra>();
  sp->bands = bands;
  sp->snaps = snaps;
  sp->fft = std::make_unique<Fft2>(gu, gv);
  const std::size_t spec = sp->spec();
  sp->sigma.resize(snaps * bands * spec);
  sp->sigma2.assign(bands * spec, 0.0);
  diffracted_.resize(snaps * bands);
  const double inv_n = 1.0 / static_cast<double>(gu * gv);
  Vec padded(gu * gv, 0.0);
  for (std::size_t p = 0; p < snaps; ++p) {
    for (std::size_t l = 0; l < bands; ++l) {
      Vec& d = diffracted_[p * bands + l];
      d = optics_ ? diffract_pattern(aperture_.patterns[p], su, sv, kernels_[l])
                  : aperture_.patterns[p];
      auto sig = std::span<cplx>(sp->sigma).subspan((p * bands + l) * spec, spec);
      for (std::size_t i = 0; i < su; ++i) {
        std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(i * sv), sv,
                    padded.begin() + static_cast<std::ptrdiff_t>(i * gv));
      }
      sp->fft->forward(padded, sig);
      simd::abs2_acc(sig, std::span<double>(sp->sigma2).subspan(l * spec, spec));
      for (cplx& c : sig) c *= inv_n;
    }
  }
  norm_ = std::sqrt(*std::max_element(sp->sigma2.begin(), sp->sigma2.end()));
  spectra_ = sp;
  phi_bar_ = std::make_shared<MsrcPhiBar>(sp);

  const std::size_t grid = gu * gv, px = layout_.pixels();
  std::vector<std::size_t> kept(snaps * px);
  for (std::size_t p = 0; p < snaps; ++p) {
    for (std::size_t i = 0; i < layout_.m_u(); ++i) {
      for (std::size_t j = 0; j < layout_.m_v(); ++j) {
        const std::size_t pix = i * layout_.m_v() + j;
        kept[p * px + pix] = (p * bands + layout_.band_of(pix)) * grid +
                             (i + n_u_ - 1) * gv + (j + n_v_ - 1);
      }
    }
  }
  r_m_ = restriction(snaps * bands * grid, std::move(kept));
  std::vector<std::size_t> scene(n());
  for (std::size_t l = 0; l < bands; ++l) {
    for (std::size_t u = 0; u < n_u_; ++u) {
      for (std::size_t v = 0; v < n_v_; ++v) {
        scene[(l * n_u_ + u) * n_v_ + v] = l * grid + u * gv + v;
      }
    }
  }
  r_n_ = restriction(bands * grid, std::move(scene));

  Fingerprint fp;
  fp.add("msrc", 4).add_value(n_u_).add_value(n_v_).add_values(wavelengths_);
  fp.add_value(layout_.m_u()).add_value(layout_.m_v());
  fp.add(layout_.band_of_pixel().data(), layout_.band_of_pixel().size() * sizeof(std::uint16_t));
  fp.add_value(aperture_.seed).add_value(g_u_).add_value(g_v_);
  for (const auto& p : aperture_.patterns) fp.add_values(p);
  if (optics_) {
    fp.add_value(optics_->aperture_pitch_m).add_value(optics_->sensor_pitch_m);
    fp.add_value(optics_->focal_length_m);
  }
  fingerprint_ = fp.value();
}

MsrcSensing::~MsrcSensing() = default;

const Vec& MsrcSensing::diffracted(std::size_t p, std::size_t band) const {
  return diffracted_.at(p * n_bands() + band);
}

std::span<const double> MsrcSensing::sigma_bar_sq(std::size_t band) const {
  const std::size_t spec = spectra_->spec();
  return std::span<const double>(spectra_->sigma2).subspan(band * spec, spec);
}

const Fft2& MsrcSensing::fft() const { return *spectra_->fft; }

void MsrcSensing::normal_inverse(std::span<const double> v, double mu,
                                 std::span<double> out) const {
  if (!(mu > 0.0)) throw ConfigError("normal_inverse needs mu > 0");
  if (v.size() != n_bar() || out.size() != n_bar()) {
    throw ConfigError("normal_inverse: size mismatch");
  }
  const Fft2& fft = *spectra_->fft;
  const std::size_t n = fft.size(), spec = fft.spectrum_size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<cplx> fv(spec);
  Vec d(spec);
  for (std::size_t l = 0; l < n_bands(); ++l) {
    const auto s2 = sigma_bar_sq(l);
    for (std::size_t k = 0; k < spec; ++k) d[k] = inv_n / (s2[k] + mu);
    fft.forward(v.subspan(l * n, n), fv);
    simd::cscale(fv, d, fv);
    fft.inverse(fv, out.subspan(l * n, n));
  }
}

Vec MsrcSensing::lift_sensor_cubes(std::span<const double> cubes) const {
  const std::size_t mu = m_u(), mv = m_v(), bands = n_bands(), gu = g_u_, gv = g_v_;
  if (cubes.size() != snapshots() * bands * mu * mv) {
    throw ConfigError("lift_sensor_cubes: size mismatch");
  }
  Vec out(m_bar(), 0.0);
  for (std::size_t pl = 0; pl < snapshots() * bands; ++pl) {
    for (std::size_t i = 0; i < mu; ++i) {
      std::copy_n(cubes.begin() + static_cast<std::ptrdiff_t>((pl * mu + i) * mv), mv,
                  out.begin() + static_cast<std::ptrdiff_t>(pl * gu * gv +
                                                            (i + n_u_ - 1) * gv + (n_v_ - 1)));
    }
  }
  return out;
}

std::string MsrcSensing::describe() const {
  std::ostringstream os;
  os << "msrc " << n_u_ << "x" << n_v_ << "x" << n_bands() << " -> " << m_u() << "x" << m_v()
     << "x" << snapshots() << " aperture " << s_u() << "x" << s_v() << " grid " << g_u_
     << "x" << g_v_ << " "
     << to_string(layout_.kind());
  if (optics_) {
    os << " psf(dm=" << optics_->sensor_pitch_m * 1e6 << "um, m_h=" << kernels_.front().size
       << ")";
  }
  return os.str();
}

// --- pattern schemes ------------------------------------------------------------------

PatternEquivalence pattern_equivalence_check(std::span<const double> scene, std::size_t n_u,
                                             std::size_t n_v,
                                             const std::vector<double>& wavelengths_nm,
                                             const SensorLayout& layout,
                                             const CodedAperture& s_plus,
                                             std::optional<Optics> optics) {
  auto with = [&](auto&& map) {
    CodedAperture ca = s_plus;
    for (auto& p : ca.patterns) {
      for (double& v : p) v = map(v);
    }
    MsrcSensing op(n_u, n_v, wavelengths_nm, layout, std::move(ca), optics);
    return op.phi()->apply(scene);
  };
  const Vec y_pm = with([](double s) { return 2.0 * s - 1.0; });
  const Vec y_plus = with([](double s) { return s; });
  const Vec y_minus = with([](double s) { return 1.0 - s; });
  const Vec y_on = with([](double) { return 1.0; });

  PatternEquivalence r;
  r.y_signed = y_pm;
  r.y_difference.resize(y_pm.size());
  r.y_open.resize(y_pm.size());
  for (std::size_t i = 0; i < y_pm.size(); ++i) {
    r.y_difference[i] = y_plus[i] - y_minus[i];
    r.y_open[i] = 2.0 * y_plus[i] - y_on[i];
  }
  const double ref = std::sqrt(simd::norm_sq(y_pm));
  const double gap = std::max(std::sqrt(simd::dist_sq(y_pm, r.y_difference)),
                              std::sqrt(simd::dist_sq(y_pm, r.y_open)));
  r.max_relative_gap = ref > 0.0 ? gap / ref : gap;
  return r;
}

std::string sizing_report(const Optics& optics, std::size_t s_u, std::size_t s_v,
                          const std::vector<double>& wavelengths_nm) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  const double d_lens = std::sqrt(2.0) * static_cast<double>(std::max(s_u, s_v)) *
                        optics.aperture_pitch_m;
  const double f_number = optics.focal_length_m / d_lens;
  os << "aperture cells        " << s_u << " x " << s_v << "\n";
  os << "aperture pitch        " << optics.aperture_pitch_m * 1e6 << " um\n";
  os << "sensor pitch          " << optics.sensor_pitch_m * 1e6 << " um\n";
  os << "focal length          " << optics.focal_length_m * 1e3 << " mm\n";
  os << "min lens diameter     " << d_lens * 1e3 << " mm\n";
  os << "f-number at min lens  " << f_number << (f_number >= 0.5 ? "  (ok, >= 0.5)\n"
                                                                 : "  (below 0.5, not realizable)\n");
  os << "aperture distance d   " << optics.scene_distance_m() * 1e3 << " mm\n";
  os << "band  lambda_nm  D_psf_px  main_lobe_px\n";
  for (std::size_t i = 0; i < wavelengths_nm.size(); ++i) {
    const double wl = wavelengths_nm[i] * 1e-9;
    const DiffractionKernel k = diffraction_kernel(optics, wl, 2 * std::max(s_u, s_v) - 1);
    os << std::setw(4) << i << "  " << std::setw(9) << wavelengths_nm[i] << "  " << std::setw(8)
       << optics.d_psf_px(wl) << "  " << std::setw(12) << k.main_lobe_width_px() << "\n";
  }
  return os.str();
}

}  // namespace mscs
