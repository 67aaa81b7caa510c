#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pameq {

// splitmix64 finalizer; used to derive independent per-point seeds from a
// single user seed without correlated low bits.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives the seed for stream index `stream` from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 1));
}

// Deterministic random source. Gaussian variates use an explicit
// Box-Muller transform rather than std::normal_distribution, whose
// algorithm is implementation-defined and would tie output bytes to a
// particular standard library.
template <typename Scalar>
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Single bit (top engine bit).
  int bit() { return static_cast<int>(engine_() >> 63); }

  // Uniform in [0, 1) with 53 random bits.
  Scalar uniform() {
    return static_cast<Scalar>(engine_() >> 11) *
           static_cast<Scalar>(1.0 / 9007199254740992.0);
  }

  // Standard normal variate.
  Scalar gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] keeps the log finite.
    Scalar u1 = Scalar(1) - uniform();
    Scalar u2 = uniform();
    Scalar radius = std::sqrt(Scalar(-2) * std::log(u1));
    Scalar angle = Scalar(2) * static_cast<Scalar>(M_PI) * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  Scalar spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace pameq
