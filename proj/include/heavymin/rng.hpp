#pragma once

#include <cstdint>
#include <random>

namespace heavymin {

// Reproducibility contract: one root seed per run; stream i derives its
// engine seed as splitmix64(root + (i+1) * golden_gamma) and draws from a
// std::mt19937_64 (whose output sequence the standard pins down exactly).
// Uniform variates take the top 53 bits, rejecting exact zero, so u lies
// in the open interval (0, 1) on every platform.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t i) {
  return splitmix64(root + (i + 1) * 0x9E3779B97F4A7C15ull);
}

class UniformOpen01 {
 public:
  explicit UniformOpen01(std::uint64_t seed) : eng_(seed) {}

  double next() {
    for (;;) {
      double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;  // u < 1 always: (2^53-1)/2^53
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace heavymin
