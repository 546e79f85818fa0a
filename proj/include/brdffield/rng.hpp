#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace brdffield {

// Deterministic, platform-independent PRNG (splitmix64). std:: distributions
// are not bit-stable across library versions, so all sampling goes through
// this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; one value per call, cached pair discarded
  // deliberately so the stream stays a pure function of call count.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Derives an independent stream; used to decouple e.g. data sampling from
  // optimizer-side draws under one user-facing seed.
  Rng fork(std::uint64_t tag) const {
    Rng r(state_ ^ (0x6a09e667f3bcc909ull + tag * 0x3c6ef372fe94f82bull));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace brdffield
