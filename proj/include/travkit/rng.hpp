#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace travkit {

// splitmix64 mix step. Used to derive independent per-item seeds from a
// master seed so that item i never depends on how many items came before it.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// mt19937_64 engine with hand-rolled samplers. The standard library engines
// are bit-exact across platforms but the distributions are not; rolling the
// few samplers we need keeps every seeded output byte-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); half-offset lattice never hits 0 or 1.
  double uniform01_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be >= 1.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo bias is ~n/2^64; negligible for the small n
    // (mask counts, cell counts) this is used with.
    return engine_() % n;
  }

  // Standard normal via Box-Muller (no cached spare, so every draw consumes
  // exactly two engine outputs and streams stay easy to reason about).
  double normal() {
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace travkit
