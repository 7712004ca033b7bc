#pragma once

#include <cmath>
#include <cstdint>

namespace rmean {

// SplitMix64 (Steele, Lea & Flood). Used for seeding and for O(1) derivation
// of child stream seeds: the i-th output for seed s is mix(s + (i+1)*kGolden).
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix(state_);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Child seed for stream `index` under `parent`; equals the index-th SplitMix64
// output of `parent`, computed without advancing any state.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return SplitMix64::mix(parent + (index + 1) * SplitMix64::kGolden);
}

// xoshiro256++ (Blackman & Vigna), state seeded from SplitMix64 as the
// authors recommend.
class Xoshiro256PlusPlus {
 public:
  explicit Xoshiro256PlusPlus(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Marsaglia polar method; the rejection loop yields two variates, the second
// one is cached.
class GaussianSampler {
 public:
  double sample(Xoshiro256PlusPlus& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng.uniform01() - 1.0;
      v = 2.0 * rng.uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  void reset() { has_spare_ = false; }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// A generator plus its Gaussian cache; one per logical stream so that draws
// from different streams never interleave.
struct RngStream {
  explicit RngStream(std::uint64_t seed) : gen(seed) {}

  double uniform01() { return gen.uniform01(); }
  double normal() { return gauss.sample(gen); }

  Xoshiro256PlusPlus gen;
  GaussianSampler gauss;
};

}  // namespace rmean
