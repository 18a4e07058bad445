#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace ndsort {

// splitmix64 finalizer. Used to derive substream seeds, not as a generator.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed plus a path of
// integers (purpose tag, cell coordinates, ...). Order sensitive.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t v : path) {
    h = mix64(h ^ mix64(v));
  }
  return h;
}

// Deterministic draw source. The distributions are implemented by hand on
// top of std::mt19937_64 so that sequences are bit-identical across
// standard library implementations, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t residue = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t v = gen_();
    while (v < residue) {
      v = gen_();
    }
    return v % bound;
  }

  // True with probability exactly num/den.
  bool chance(std::uint32_t num, std::uint32_t den) {
    return next_below(den) < num;
  }

  // Standard normal deviate. Box-Muller; consumes two uniforms per pair
  // and hands out the cached second deviate on the next call.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    while (u1 <= 0.0) {
      u1 = next_unit();
    }
    const double u2 = next_unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return mag * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ndsort
