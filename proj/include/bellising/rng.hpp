#pragma once

#include <cstdint>

namespace bellising {

/// Counter-based SplitMix64. Draw i of a stream is mix64(seed + (i + 1) * gamma),
/// so a stream is fully determined by (seed, counter) and is identical on every
/// platform. Independent streams come from `split`, which mixes the stream
/// index into a fresh seed.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  explicit CounterRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() noexcept { return mix64(seed_ + (++counter_) * kGamma); }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  CounterRng split(std::uint64_t stream) const noexcept {
    return CounterRng(mix64(seed_ ^ mix64(stream + kGamma)));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace bellising
