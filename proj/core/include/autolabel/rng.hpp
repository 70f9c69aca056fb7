#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace autolabel {

/// SplitMix64 generator. Every random draw in the library goes through this
/// type so that a seed fully determines every output.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Derived draws:
///   uniform()      (next() >> 11) * 2^-53, in [0, 1)
///   below(n)       rejection sampling: r = next(), redraw while
///                  r >= 2^64 - (2^64 mod n), return r mod n
///   gaussian()     Box-Muller, cosine branch only: u1 = 1 - uniform(),
///                  u2 = uniform(), sqrt(-2 ln u1) * cos(2 pi u2)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept;
  std::size_t below(std::size_t n) noexcept;
  double gaussian() noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Mixes a base seed with a stream id so sub-stages get independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace autolabel
