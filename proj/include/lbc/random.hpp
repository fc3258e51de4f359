#pragma once

#include <cstdint>
#include <limits>

namespace lbc
{
/// splitmix64. Satisfies UniformRandomBitGenerator, and its output sequence
/// is fixed by the seed on every platform.
class SplitMix64
{
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max()
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double NextUnit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound) by rejection; bound must be positive.
  std::uint64_t NextBelow(std::uint64_t bound)
  {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t v = (*this)();
    while (v >= limit)
    {
      v = (*this)();
    }
    return v % bound;
  }

private:
  std::uint64_t state_;
};

}  // namespace lbc
