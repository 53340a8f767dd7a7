#include "mscs/sensing.hpp"

#include <cstdio>

namespace mscs {

OperatorPtr ExtendedSensing::phi() const {
  return compose({r_m(), phi_bar(), adjoint(r_n())});
}

OperatorPtr ExtendedSensing::phi_bar_embedded() const {
  return compose(phi_bar(), adjoint(r_n()));
}

Fingerprint& Fingerprint::add(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ULL;
  }
  return *this;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace mscs
