#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mscs {

// Seeded generator with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the standard; the
// value mappings below are implemented here because the std distributions
// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound), bound > 0 (rejection sampling, unbiased).
  std::uint64_t below(std::uint64_t bound);

  // Standard normal (Marsaglia polar method).
  double gaussian();

  // +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed);
std::vector<double> uniform_vector(std::size_t n, std::uint64_t seed,
                                   double lo = -1.0, double hi = 1.0);

}  // namespace mscs
