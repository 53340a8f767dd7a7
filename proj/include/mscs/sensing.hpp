#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "mscs/layout.hpp"
#include "mscs/linop.hpp"

namespace mscs {

// A sensing model written as Phi = R_m Phibar R_n^*, where Phibar^* Phibar + mu Id
// has a fast exact inverse.
//
//   x    (n)     scene, band-major
//   xbar (nbar)  extended scene; R_n keeps the n scene entries
//   Phibar xbar (mbar), R_m keeps the m sensor readings
class ExtendedSensing {
 public:
  virtual ~ExtendedSensing() = default;

  virtual std::size_t n_u() const = 0;
  virtual std::size_t n_v() const = 0;
  virtual std::size_t n_bands() const = 0;
  virtual std::size_t m_u() const = 0;
  virtual std::size_t m_v() const = 0;
  virtual std::size_t snapshots() const = 0;
  virtual const SensorLayout& layout() const = 0;

  std::size_t n() const { return n_u() * n_v() * n_bands(); }
  std::size_t m() const { return m_u() * m_v() * snapshots(); }
  std::size_t n_bar() const { return phi_bar()->cols(); }
  std::size_t m_bar() const { return phi_bar()->rows(); }

  virtual OperatorPtr phi_bar() const = 0;
  virtual std::shared_ptr<const RestrictionOp> r_m() const = 0;
  virtual std::shared_ptr<const RestrictionOp> r_n() const = 0;

  // out = (Phibar^* Phibar + mu Id)^{-1} v, mu > 0.
  virtual void normal_inverse(std::span<const double> v, double mu,
                              std::span<double> out) const = 0;
  // ||Phibar||_2
  virtual double phi_bar_norm() const = 0;

  // Places per-snapshot, per-band sensor-sized cubes (ordered snapshot,
  // band, u, v) into Phibar's output space so that R_m picks each pixel's
  // own band. Entries outside the sensor window are zero.
  virtual Vec lift_sensor_cubes(std::span<const double> cubes) const = 0;

  // Content hash of everything that determines the operator.
  virtual std::uint64_t fingerprint() const = 0;
  virtual std::string describe() const = 0;

  // Phi = R_m Phibar R_n^* as one operator.
  OperatorPtr phi() const;
  // Phibar R_n^*
  OperatorPtr phi_bar_embedded() const;
};

// FNV-1a, used for operator fingerprints.
class Fingerprint {
 public:
  Fingerprint& add(const void* data, std::size_t bytes);
  template <class T>
  Fingerprint& add_value(const T& v) {
    return add(&v, sizeof(T));
  }
  Fingerprint& add_values(std::span<const double> v) { return add(v.data(), v.size_bytes()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

std::string hex64(std::uint64_t v);

}  // namespace mscs
