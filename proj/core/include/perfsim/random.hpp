#pragma once

#include <cmath>
#include <cstdint>

namespace perfsim {

// Deterministic splittable RNG.
//
// Counter construction: the output sequence is fin(key + i*PHI) for
// i = 1, 2, ... where `key` mixes (seed, stream_id) and `fin` is the
// SplitMix64 finalizer. Identical (seed, stream_id) always yields the
// identical draw sequence; distinct stream_ids yield independent streams.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id) {
    std::uint64_t a = fin(seed + kPhi);
    std::uint64_t b = fin(stream_id ^ 0xa3ec647659359acdULL);
    state_ = fin(a ^ (b << 1 | b >> 63));
  }

  std::uint64_t next_u64() {
    state_ += kPhi;
    return fin(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so log(u1) is finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  // Independent child stream; the parent is not advanced.
  RandomSource split(std::uint64_t child) const {
    return RandomSource(seed_, fin(stream_ ^ fin(child + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t fin(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace perfsim
