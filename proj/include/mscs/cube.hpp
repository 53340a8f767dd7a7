#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace mscs {

// 16 centre wavelengths uniformly spaced on [first_nm, last_nm].
std::vector<double> uniform_wavelengths(std::size_t count, double first_nm = 470.0,
                                        double last_nm = 620.0);

// Multispectral cube of n_u x n_v pixels and n_bands spectral bands.
//
// Storage is band-major: band outer, then row u, then column v. The
// vectorized form of the cube is exactly this storage, which is also the
// stacking order of the per-band blocks in every sensing operator.
class MSCube {
 public:
  MSCube() = default;
  MSCube(std::size_t n_u, std::size_t n_v, std::size_t n_bands);
  MSCube(std::size_t n_u, std::size_t n_v, std::vector<double> wavelengths_nm);
  MSCube(std::size_t n_u, std::size_t n_v, std::vector<double> wavelengths_nm,
         std::vector<double> data);

  std::size_t n_u() const { return n_u_; }
  std::size_t n_v() const { return n_v_; }
  std::size_t n_bands() const { return wavelengths_.size(); }
  std::size_t band_size() const { return n_u_ * n_v_; }
  std::size_t size() const { return data_.size(); }

  const std::vector<double>& wavelengths() const { return wavelengths_; }

  double& at(std::size_t u, std::size_t v, std::size_t band) {
    return data_[(band * n_u_ + u) * n_v_ + v];
  }
  double at(std::size_t u, std::size_t v, std::size_t band) const {
    return data_[(band * n_u_ + u) * n_v_ + v];
  }

  std::span<double> band(std::size_t b) {
    return std::span<double>(data_).subspan(b * band_size(), band_size());
  }
  std::span<const double> band(std::size_t b) const {
    return std::span<const double>(data_).subspan(b * band_size(), band_size());
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const MSCube& other) const {
    return n_u_ == other.n_u_ && n_v_ == other.n_v_ &&
           n_bands() == other.n_bands();
  }

 private:
  std::size_t n_u_ = 0;
  std::size_t n_v_ = 0;
  std::vector<double> wavelengths_;
  std::vector<double> data_;
};

std::vector<double> vectorize(const MSCube& cube);
MSCube devectorize(std::span<const double> x, std::size_t n_u, std::size_t n_v,
                   std::vector<double> wavelengths_nm);

// Sensor readout: m_S snapshots of m_u x m_v pixels, stored snapshot-major.
struct MeasurementFrame {
  std::size_t m_u = 0;
  std::size_t m_v = 0;
  std::size_t snapshots = 1;
  double noise_bound = 0.0;  // tau, an l2 bound on the additive noise
  std::vector<double> data;

  std::size_t size() const { return m_u * m_v * snapshots; }
  std::span<const double> snapshot(std::size_t p) const {
    return std::span<const double>(data).subspan(p * m_u * m_v, m_u * m_v);
  }
};

// Raw cube files: one text header line
//   "mscube <n_u> <n_v> <n_bands> <wl_1> ... <wl_n>\n"
// followed by n_u*n_v*n_bands little-endian float32 values, band-major.
// When `path` has a ".hdr" sidecar, the header is read from it and the
// payload from the sibling ".raw" file instead.
void write_cube(const std::filesystem::path& path, const MSCube& cube);
MSCube read_cube(const std::filesystem::path& path);

// Measurement files: "msframe <m_u> <m_v> <m_S> <tau>\n" then float64 LE.
void write_frame(const std::filesystem::path& path, const MeasurementFrame& frame);
MeasurementFrame read_frame(const std::filesystem::path& path);

}  // namespace mscs
