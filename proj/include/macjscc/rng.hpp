#pragma once

#include <cmath>
#include <cstdint>

namespace macjscc {

// 64-bit finalizer with full avalanche (splitmix64 style).
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based generator: output i of a stream is a pure function of
// (seed, stream, i), so independent streams can be handed to worker threads
// and every draw is reproducible no matter how work is scheduled.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream)
      : key_(mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(counter_ ^ key_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), u1 < 1
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace macjscc
