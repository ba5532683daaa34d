#pragma once

#include <cstdint>
#include <cmath>

namespace da {

// splitmix64: the one fixed PRNG used everywhere. Chosen because its output
// sequence is defined by the algorithm alone, so datasets and runs reproduce
// bit-identically across compilers and machines.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit mantissa
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Box-Muller; one draw per call, second branch discarded so the stream
  // position is a pure function of the call count
  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

 private:
  std::uint64_t state_;
};

// Deterministic seed derivation for independent sub-streams of one run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
  return r.next_u64();
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
  return mix_seed(mix_seed(seed, stream), step + 0x100);
}

}  // namespace da
