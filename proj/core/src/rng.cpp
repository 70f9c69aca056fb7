#include "autolabel/rng.hpp"

#include <cmath>
#include <numbers>

namespace autolabel {

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t SplitMix64::below(std::size_t n) noexcept {
  if (n <= 1) return 0;
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // 2^64 mod n, computed without overflow
  const std::uint64_t rem = (0 - bound) % bound;
  std::uint64_t r = next();
  while (rem != 0 && r >= 0 - rem) r = next();
  return static_cast<std::size_t>(r % bound);
}

double SplitMix64::gaussian() noexcept {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 mix(seed ^ (stream * 0xD1B54A32D192ED03ULL));
  return mix.next();
}

}  // namespace autolabel
