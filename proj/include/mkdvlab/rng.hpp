#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mkdv {

inline std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Deterministic complex-Gaussian stream with E g = 0, E|g|^2 = 1
/// (real and imaginary parts independent N(0, 1/2)).
/// The variates are generated by an explicit Box-Muller map from 53-bit
/// uniforms so that identical (seed, stream) reproduce bit-identical values
/// on any conforming platform; std::normal_distribution is not pinned down
/// by the standard.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream)
      : eng_(derive_key(seed, stream)) {}

  double uniform() {  // (0,1]
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  std::complex<double> next_complex() {
    const double r = std::sqrt(-std::log(uniform()));
    const double th = 6.28318530717958647692528676655900577 * uniform();
    return {r * std::cos(th), r * std::sin(th)};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mkdv
