#ifndef SPLITWISE_RNG_HPP
#define SPLITWISE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace splitwise {

// Counter-based generator: splitmix64's finalizer applied to
// key + (index+1) * golden-ratio increment. Every draw is a pure function of
// (seed, stream, index), so datasets regenerate identically regardless of
// call order or threading.
class CounterRng {
 public:
  static constexpr const char* kName = "splitmix64-counter";

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed) ^ mix(kGolden * (stream + 1)))) {}

  std::uint64_t bits(std::uint64_t index) const {
    return mix(key_ + (index + 1) * kGolden);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draw i consumes uniform indices 2i, 2i+1.
  double normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    // 1-u1 lies in (0,1], keeping the log finite.
    return std::sqrt(-2.0 * std::log(1.0 - u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Value in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t index, std::uint64_t bound) const {
    return bits(index) % bound;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

// Fisher-Yates permutation of 0..n-1 driven by one rng draw per step.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, const CounterRng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i, i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

// Stream ids used across the toolkit; fixed so outputs stay reproducible.
namespace rng_stream {
inline constexpr std::uint64_t kBlockFactor = 0;
inline constexpr std::uint64_t kIdiosyncratic = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kFolds = 3;
inline constexpr std::uint64_t kHoldout = 4;
inline constexpr std::uint64_t kTest = 100;
}  // namespace rng_stream

}  // namespace splitwise

#endif  // SPLITWISE_RNG_HPP
