#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mscs/cube.hpp"
#include "mscs/errors.hpp"
#include "mscs/fft.hpp"
#include "mscs/msrc.hpp"
#include "mscs/random.hpp"
#include "oracles.hpp"

using namespace mscs;

namespace {

Eigen::VectorXd as_eigen(const Vec& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), long(v.size())); }

double max_rel(const Vec& a, const Vec& b) {
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return m / std::max(s, 1e-300);
}

const Optics kOptics55{80e-6, 55e-6, 40e-3};
const Optics kOptics110{80e-6, 110e-6, 40e-3};

CodedAperture delta_aperture(std::size_t s_u, std::size_t s_v, std::size_t at) {
  CodedAperture ca;
  ca.s_u = s_u;
  ca.s_v = s_v;
  ca.patterns.assign(1, Vec(s_u * s_v, 0.0));
  ca.patterns[0][at] = 1.0;
  return ca;
}

}  // namespace

TEST_SUITE("msrc") {

TEST_CASE("FFT-friendly sizes") {
  CHECK(good_fft_size(1) == 1);
  CHECK(good_fft_size(13) == 14);
  CHECK(good_fft_size(15) == 15);
  CHECK(good_fft_size(121) == 125);
  CHECK(good_fft_size(255) == 256);
  CHECK(good_fft_size(511) == 512);
}

TEST_CASE("aperture sizes, symbols, determinism") {
  const auto big = generate_aperture(256, 256, 256, 256, 1, 11);
  CHECK(big.s_u == 511);
  CHECK(big.s_v == 511);
  double mean = 0.0;
  for (double v : big.patterns[0]) {
    CHECK((v == 1.0 || v == -1.0));
    mean += v;
  }
  mean /= double(big.patterns[0].size());
  CHECK(std::abs(mean) <= 0.01);

  const auto tiny = generate_aperture(1, 1, 1, 1, 1, 3);
  CHECK(tiny.s_u == 1);
  CHECK(tiny.patterns[0].size() == 1);

  const auto a = generate_aperture(8, 8, 4, 4, 3, 5), b = generate_aperture(8, 8, 4, 4, 3, 5);
  CHECK(a.patterns == b.patterns);
  CHECK(a.patterns[0] != a.patterns[1]);
  CHECK(a.patterns != generate_aperture(8, 8, 4, 4, 3, 6).patterns);
}

TEST_CASE("valid convolution: direct oracle, delta shift, all ones") {
  SUBCASE("5x5 pattern, 3x3 image") {
    const auto s = gaussian_vector(25, 1), x = gaussian_vector(9, 2);
    CHECK(max_rel(valid_convolve_fft(s, 5, 5, x, 3, 3), oracle::valid_convolve(s, 5, 5, x, 3, 3)) < 1e-12);
  }
  SUBCASE("random sizes up to 32") {
    Rng rng(7);
    for (int t = 0; t < 60; ++t) {
      const std::size_t su = 1 + rng.below(32), sv = 1 + rng.below(32);
      const std::size_t nu = 1 + rng.below(su), nv = 1 + rng.below(sv);
      const auto s = gaussian_vector(su * sv, 10 + t), x = gaussian_vector(nu * nv, 100 + t);
      CHECK(max_rel(valid_convolve_fft(s, su, sv, x, nu, nv), oracle::valid_convolve(s, su, sv, x, nu, nv)) < 1e-12);
    }
  }
  SUBCASE("a delta pattern crops a shifted window of the image") {
    const std::size_t su = 9, sv = 10, nu = 5, nv = 6, du = 6, dv = 4;
    Vec s(su * sv, 0.0);
    s[du * sv + dv] = 1.0;
    const auto x = gaussian_vector(nu * nv, 3);
    const auto y = valid_convolve_fft(s, su, sv, x, nu, nv);
    const std::size_t mu = su - nu + 1, mv = sv - nv + 1;
    for (std::size_t i = 0; i < mu; ++i)
      for (std::size_t j = 0; j < mv; ++j) {
        const long a = long(i + nu - 1) - long(du), b = long(j + nv - 1) - long(dv);
        const double expect = (a >= 0 && a < long(nu) && b >= 0 && b < long(nv)) ? x[a * nv + b] : 0.0;
        CHECK(y[i * mv + j] == doctest::Approx(expect).scale(1.0).epsilon(1e-14));
      }
  }
  SUBCASE("all-ones pattern sums a constant image") {
    const auto y = valid_convolve_fft(Vec(12 * 12, 1.0), 12, 12, Vec(7 * 5, 0.4), 7, 5);
    for (double v : y) CHECK(v == doctest::Approx(0.4 * 35).epsilon(1e-13));
  }
  CHECK_THROWS_AS(valid_convolve_fft(Vec(9), 3, 3, Vec(16), 4, 4), ConfigError);
}

TEST_CASE("diffraction kernel: sizing at 620 nm") {
  const auto k11 = diffraction_kernel(kOptics55, 620e-9, 509);
  const auto k5 = diffraction_kernel(kOptics110, 620e-9, 509);
  CHECK(k11.main_lobe_width_px() == 11);
  CHECK(k5.main_lobe_width_px() == 5);
  // lambda f / (Delta_m Delta_s) = 620e-9 * 0.04 / (55e-6 * 80e-6)
  CHECK(kOptics55.first_zero_px(620e-9) == doctest::Approx(5.636363636363637).epsilon(1e-12));
  CHECK(kOptics55.d_psf_px(620e-9) == doctest::Approx(11.272727272727273).epsilon(1e-12));
  CHECK(kOptics55.scene_distance_m() == doctest::Approx(0.0581818181818).epsilon(1e-10));
}

TEST_CASE("diffraction kernel: normalization, symmetry, separability, quadrature") {
  for (double wl : {470e-9, 545e-9, 620e-9}) {
    const auto k = diffraction_kernel(kOptics55, wl, 101);
    REQUIRE(k.size == 101);
    REQUIRE(k.size % 2 == 1);
    double sum = 0.0;
    for (double v : k.data) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (std::size_t i = 0; i < k.size; ++i) {
      CHECK(k.profile[i] == k.profile[k.size - 1 - i]);
      for (std::size_t j = 0; j < k.size; ++j) {
        CHECK(k.data[i * k.size + j] == doctest::Approx(k.profile[i] * k.profile[j]).epsilon(1e-15));
        CHECK(k.data[i * k.size + j] == k.data[(k.size - 1 - i) * k.size + (k.size - 1 - j)]);
      }
    }
    // pixel integrals against composite Simpson, up to the common normalization
    const double z = kOptics55.first_zero_px(wl);
    const double c0 = oracle::sinc2_cell(0.0, z);
    for (long p = 0; p <= 50; p += 5) {
      const double ratio = k.profile[k.half() + p] / k.profile[k.half()];
      CHECK(ratio == doctest::Approx(oracle::sinc2_cell(double(p), z) / c0).epsilon(1e-8));
    }
  }
  CHECK(diffraction_kernel(kOptics55, 620e-9, 101).mass_width > 101);
}

TEST_CASE("diffraction kernel: near-zero wavelength is a delta") {
  const auto k = diffraction_kernel(kOptics55, 0.1e-9, 31);
  CHECK(k.data[k.half() * k.size + k.half()] > 0.999);
}

TEST_CASE("diffraction kernel: main lobe grows with lambda and f, shrinks with the pitches") {
  auto width = [](Optics o, double wl) { return diffraction_kernel(o, wl, 201).main_lobe_width_px(); };
  const Optics base = kOptics55;
  std::size_t prev = 0;
  for (double wl : {470e-9, 620e-9, 900e-9}) {
    const std::size_t w = width(base, wl);
    CHECK(w > prev);
    prev = w;
  }
  prev = 0;
  for (double f : {30e-3, 40e-3, 55e-3}) {
    const std::size_t w = width(Optics{80e-6, 55e-6, f}, 620e-9);
    CHECK(w > prev);
    prev = w;
  }
  prev = 1000;
  for (double dm : {40e-6, 55e-6, 80e-6}) {
    const std::size_t w = width(Optics{80e-6, dm, 40e-3}, 620e-9);
    CHECK(w < prev);
    prev = w;
  }
  prev = 1000;
  for (double ds : {60e-6, 80e-6, 110e-6}) {
    const std::size_t w = width(Optics{ds, 55e-6, 40e-3}, 620e-9);
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("diffracted patterns are the centred crop of the full convolution") {
  const auto layout = make_layout(LayoutKind::random, 6, 6, 2, 1, 1);
  auto ca = generate_aperture(8, 8, 6, 6, 2, 4);
  MsrcSensing s(8, 8, {500.0, 620.0}, layout, ca, kOptics55);
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t b = 0; b < 2; ++b) {
      const auto& k = s.kernels()[b];
      const auto ref = oracle::blur_pattern(ca.patterns[p], 13, 13, k.data, k.size);
      CHECK(max_rel(s.diffracted(p, b), ref) < 1e-12);
    }
}

TEST_CASE("dense oracle: 8x8x2 cube, 4x4 sensor, two snapshots") {
  const auto layout = make_layout(LayoutKind::random, 4, 4, 2, 1, 3);
  auto ca = generate_aperture(8, 8, 4, 4, 2, 9);
  for (bool optics : {false, true}) {
    CAPTURE(optics);
    MsrcSensing s(8, 8, {520.0, 600.0}, layout, ca,
                  optics ? std::optional<Optics>(kOptics110) : std::nullopt);
    const Eigen::MatrixXd ref = oracle::msrc_matrix(
        8, 8, 2, 2, layout, 11, 11, [&](std::size_t p, std::size_t b) -> const Vec& {
          return optics ? s.diffracted(p, b) : ca.patterns[p];
        });
    const Eigen::MatrixXd phi = materialize(*s.phi());
    CHECK((phi - ref).norm() / ref.norm() < 1e-12);
    CHECK(adjoint_dot_test(*s.phi()) < 1e-12);
    CHECK(adjoint_dot_test(*s.phi_bar()) < 1e-12);
    // linearity on random cubes
    const auto x1 = gaussian_vector(s.n(), 1), x2 = gaussian_vector(s.n(), 2);
    Vec sum(s.n());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = x1[i] + x2[i];
    const auto y1 = s.phi()->apply(x1), y2 = s.phi()->apply(x2), y12 = s.phi()->apply(sum);
    for (std::size_t i = 0; i < y12.size(); ++i) CHECK(y12[i] == doctest::Approx(y1[i] + y2[i]).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("extended operator: circulant blocks on the padded grid") {
  const std::size_t nu = 6, nv = 5, mu = 8, mv = 7;
  const auto layout = make_layout(LayoutKind::random, mu, mv, 3, 1, 2);
  auto ca = generate_aperture(nu, nv, mu, mv, 2, 3);
  MsrcSensing s(nu, nv, uniform_wavelengths(3), layout, ca);
  const std::size_t su = 13, sv = 11, gu = s.grid_u(), gv = s.grid_v(), g = gu * gv;
  CHECK(gu == 14);
  CHECK(gv == 12);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(2 * 3 * g, 3 * g);
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t l = 0; l < 3; ++l)
      for (std::size_t i = 0; i < gu; ++i)
        for (std::size_t j = 0; j < gv; ++j)
          for (std::size_t a = 0; a < gu; ++a)
            for (std::size_t b = 0; b < gv; ++b) {
              const std::size_t di = (i + gu - a) % gu, dj = (j + gv - b) % gv;
              if (di < su && dj < sv)
                ref((p * 3 + l) * g + i * gv + j, l * g + a * gv + b) = ca.patterns[p][di * sv + dj];
            }
  CHECK((materialize(*s.phi_bar()) - ref).norm() / ref.norm() < 1e-12);

  // R_m keeps each pixel's band inside the valid window, R_n the top-left block
  const auto& km = s.r_m()->kept();
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t i = 0; i < mu; ++i)
      for (std::size_t j = 0; j < mv; ++j)
        CHECK(km[p * mu * mv + i * mv + j] == (p * 3 + layout.band_at(i, j)) * g + (i + nu - 1) * gv + (j + nv - 1));
  const auto& kn = s.r_n()->kept();
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t a = 0; a < nu; ++a)
      for (std::size_t b = 0; b < nv; ++b) CHECK(kn[(l * nu + a) * nv + b] == l * g + a * gv + b);

  const Eigen::MatrixXd fact = materialize(*s.r_m()) * materialize(*s.phi_bar()) *
                               materialize(*s.r_n()).transpose();
  CHECK((fact - materialize(*s.phi())).norm() < 1e-12 * fact.norm());
}

TEST_CASE("exact grid and FFT-friendly grid give the same Phi") {
  const auto layout = make_layout(LayoutKind::random, 6, 6, 2, 1, 8);
  auto ca = generate_aperture(8, 8, 6, 6, 2, 1);
  MsrcSensing fast(8, 8, {500.0, 600.0}, layout, ca, kOptics55, true);
  MsrcSensing exact(8, 8, {500.0, 600.0}, layout, ca, kOptics55, false);
  CHECK(fast.grid_u() == 14);
  CHECK(exact.grid_u() == 13);
  CHECK((materialize(*fast.phi()) - materialize(*exact.phi())).norm() < 1e-12);
  CHECK(fast.fingerprint() != exact.fingerprint());
}

TEST_CASE("spectral diagonal equals the naive DFT power summed over snapshots") {
  const std::size_t nu = 4, nv = 4, mu = 5, mv = 5;
  const auto layout = make_layout(LayoutKind::random, mu, mv, 2, 1, 1);
  auto ca = generate_aperture(nu, nv, mu, mv, 3, 2);
  MsrcSensing s(nu, nv, {500.0, 600.0}, layout, ca, kOptics55);
  const std::size_t gu = s.grid_u(), gv = s.grid_v(), half = gv / 2 + 1;
  for (std::size_t l = 0; l < 2; ++l) {
    const auto s2 = s.sigma_bar_sq(l);
    double scale = 0.0;
    for (double v : s2) scale = std::max(scale, v);
    for (std::size_t k1 = 0; k1 < gu; ++k1)
      for (std::size_t k2 = 0; k2 < half; ++k2) {
        double acc = 0.0;
        for (std::size_t p = 0; p < 3; ++p) {
          std::complex<double> X = 0.0;
          const auto& d = s.diffracted(p, l);
          for (std::size_t a = 0; a < s.s_u(); ++a)
            for (std::size_t b = 0; b < s.s_v(); ++b)
              X += d[a * s.s_v() + b] *
                   std::polar(1.0, -2.0 * std::numbers::pi * (double(k1 * a) / gu + double(k2 * b) / gv));
          acc += std::norm(X);
        }
        CHECK(std::abs(s2[k1 * half + k2] - acc) < 1e-10 * scale);
      }
  }
}

TEST_CASE("normal inverse: residual, dense solve, diagonalization") {
  const auto layout = make_layout(LayoutKind::random, 5, 5, 2, 1, 3);
  auto ca = generate_aperture(4, 4, 5, 5, 2, 6);
  MsrcSensing s(4, 4, {480.0, 610.0}, layout, ca, kOptics55);
  const Eigen::MatrixXd pb = materialize(*s.phi_bar());
  const auto v = gaussian_vector(s.n_bar(), 3);
  for (double mu : {1e-2, 1.0, 50.0}) {
    Vec z(v.size());
    s.normal_inverse(v, mu, z);
    const Eigen::MatrixXd nm = pb.transpose() * pb + mu * Eigen::MatrixXd::Identity(pb.cols(), pb.cols());
    CHECK((nm * as_eigen(z) - as_eigen(v)).norm() / as_eigen(v).norm() < 1e-10);
    CHECK((as_eigen(z) - nm.ldlt().solve(as_eigen(v))).norm() / as_eigen(z).norm() < 1e-10);
  }
  Vec z(v.size());
  s.normal_inverse(v, 1e8, z);
  CHECK((as_eigen(z) - as_eigen(v) / 1e8).norm() / (as_eigen(v).norm() / 1e8) < 1e-4);

  // Phibar^* Phibar = F^-1 diag(sum_p |Sigma_p|^2) F, band by band
  const Fft2& fft = s.fft();
  const Vec lhs = s.phi_bar()->apply_adjoint(s.phi_bar()->apply(v));
  std::vector<cplx> spec(fft.spectrum_size());
  Vec rhs(v.size());
  for (std::size_t l = 0; l < 2; ++l) {
    fft.forward(std::span<const double>(v).subspan(l * fft.size(), fft.size()), spec);
    const auto s2 = s.sigma_bar_sq(l);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= s2[k] / double(fft.size());
    fft.inverse(spec, std::span<double>(rhs).subspan(l * fft.size(), fft.size()));
  }
  CHECK(max_rel(rhs, lhs) < 1e-10);
}

TEST_CASE("normal inverse with a delta aperture is a scalar division") {
  const auto layout = make_layout(LayoutKind::random, 5, 5, 1, 1, 3);
  MsrcSensing s(4, 4, {550.0}, layout, delta_aperture(8, 8, 19));
  const auto v = gaussian_vector(s.n_bar(), 8);
  Vec z(v.size());
  s.normal_inverse(v, 0.3, z);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(z[i] == doctest::Approx(v[i] / 1.3).scale(1.0).epsilon(1e-13));
}

TEST_CASE("single band, delta aperture: readings are a crop of the scene") {
  const std::size_t nu = 6, nv = 6, mu = 3, mv = 3, su = 8, sv = 8;
  const auto layout = make_layout(LayoutKind::random, mu, mv, 1, 1, 1);
  MsrcSensing s(nu, nv, {550.0}, layout, delta_aperture(su, sv, 5 * sv + 5));
  const auto x = gaussian_vector(nu * nv, 4);
  const auto y = s.phi()->apply(x);
  // out[i][j] = X[i + nu - 1 - 5][j + nv - 1 - 5] = X[i][j]
  for (std::size_t i = 0; i < mu; ++i)
    for (std::size_t j = 0; j < mv; ++j) CHECK(y[i * mv + j] == doctest::Approx(x[i * nv + j]).scale(1.0).epsilon(1e-13));
}

TEST_CASE("operator norm and per-band measurement budget") {
  const auto layout = make_layout(LayoutKind::mosaic, 8, 8, 4, 2);
  auto ca = generate_aperture(6, 6, 8, 8, 2, 3);
  MsrcSensing s(6, 6, uniform_wavelengths(4), layout, ca);
  CHECK(s.phi_bar_norm() == doctest::Approx(oracle::spectral_norm(materialize(*s.phi_bar()))).epsilon(1e-10));
  std::vector<std::size_t> per(2 * 4, 0);
  const std::size_t g = s.grid_u() * s.grid_v();
  for (std::size_t k : s.r_m()->kept()) ++per[k / g];
  for (auto c : per) CHECK(c == 64 / 4);
}

TEST_CASE("pattern schemes agree") {
  const auto layout = make_layout(LayoutKind::random, 8, 8, 2, 1, 2);
  const auto pm = generate_aperture(8, 8, 8, 8, 2, 5);
  CodedAperture plus = pm;
  for (auto& p : plus.patterns)
    for (double& v : p) v = (v + 1.0) / 2.0;
  const auto scene = uniform_vector(8 * 8 * 2, 3, 0.0, 1.0);
  for (bool optics : {false, true}) {
    const auto eq = pattern_equivalence_check(scene, 8, 8, {500.0, 600.0}, layout, plus,
                                              optics ? std::optional<Optics>(kOptics55) : std::nullopt);
    CHECK(eq.max_relative_gap < 1e-10);
    CHECK(max_rel(eq.y_difference, eq.y_signed) < 1e-10);
    CHECK(max_rel(eq.y_open, eq.y_signed) < 1e-10);
    // the signed pattern really is 2 S+ - 1
    MsrcSensing direct(8, 8, {500.0, 600.0}, layout, pm,
                       optics ? std::optional<Optics>(kOptics55) : std::nullopt);
    CHECK(max_rel(direct.phi()->apply(scene), eq.y_signed) < 1e-10);
  }
  const auto zero = pattern_equivalence_check(Vec(128, 0.0), 8, 8, {500.0, 600.0}, layout, plus);
  for (double v : zero.y_signed) CHECK(v == 0.0);
  for (double v : zero.y_difference) CHECK(v == 0.0);
  CodedAperture open = plus;
  for (auto& p : open.patterns) std::fill(p.begin(), p.end(), 1.0);
  const auto flat = pattern_equivalence_check(Vec(128, 0.5), 8, 8, {500.0, 600.0}, layout, open);
  CHECK(max_rel(flat.y_difference, flat.y_open) < 1e-12);
}

TEST_CASE("sizing report mirrors the optics") {
  const auto r = sizing_report(kOptics55, 383, 383, uniform_wavelengths(16));
  CHECK(r.find("43.332 mm") != std::string::npos);  // sqrt(2) * 383 * 80 um
  CHECK(r.find("58.182 mm") != std::string::npos);  // 80 um * 40 mm / 55 um
  CHECK(r.find("620.000") != std::string::npos);
}

TEST_CASE("dimension errors") {
  const auto layout = make_layout(LayoutKind::random, 4, 4, 2, 1, 1);
  CHECK_THROWS_AS(MsrcSensing(8, 8, {500.0, 600.0}, layout, generate_aperture(8, 8, 5, 5, 1, 1)),
                  ConfigError);
  CHECK_THROWS_AS(MsrcSensing(8, 8, {500.0}, layout, generate_aperture(8, 8, 4, 4, 1, 1)), ConfigError);
}

}  // TEST_SUITE
