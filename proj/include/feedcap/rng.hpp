#pragma once

#include <cmath>
#include <cstdint>

namespace feedcap {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so trials are order-independent under parallel
// execution and runs are reproducible regardless of scheduling.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x719e3e58deadbeefULL));
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  const std::uint64_t x = mix64(stream_key(seed, stream) + counter);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Standard normal via the Box-Muller transform of two hashed uniforms.
inline double normal_at(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  const double u1 = 1.0 - uniform01(seed, stream, 2 * counter);      // (0, 1]
  const double u2 = uniform01(seed, stream, 2 * counter + 1);        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Sequential view over one substream.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  double next() { return normal_at(seed_, stream_, counter_++); }
  double uniform() {
    const double u = uniform01(seed_, stream_, 2 * counter_);
    ++counter_;
    return u;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace feedcap
