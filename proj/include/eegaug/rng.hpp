#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace eegaug {

// splitmix64 finalizer; used both as a mixer for deriving independent
// substream seeds and as the core generator state update.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Small deterministic RNG. Distribution code is written out explicitly so
// identical seeds give identical streams on every platform and toolchain,
// which the augmentation and synthesis contracts rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so nearby seeds decorrelate.
    splitmix64(state_);
    splitmix64(state_);
  }

  // Derive a seed for an independent substream from a key tuple, e.g.
  // (base_seed, trial_index, stage). Order-sensitive.
  static std::uint64_t derive(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = 0x6a09e667f3bcc908ULL;
    for (std::uint64_t k : keys) {
      s ^= k + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
      splitmix64(s);
    }
    return s;
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(T& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_{0.0};
  bool have_spare_{false};
};

}  // namespace eegaug
