#ifndef CARNOT_RNG_HPP
#define CARNOT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace carnot {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Counter-based random stream: value i of stream `seed` is a pure function
/// of (seed, i), so samples can be partitioned across workers in any order
/// without changing the result.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(splitmix64(seed ^ 0xc2b2ae3d27d4eb4full)) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(seed_ ^ splitmix64(counter));
  }

  /// Uniform in [0, 1), 53 mantissa bits.
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(counter);
  }

  /// Integer in [lo, hi] inclusive.
  long uniform_int(std::uint64_t counter, long lo, long hi) const {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(bits(counter) % span);
  }

  /// Standard normal via Box-Muller; consumes counters c and c+1.
  double normal(std::uint64_t counter) const {
    double u1 = uniform01(counter);
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    const double u2 = uniform01(counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

private:
  std::uint64_t seed_;
};

}  // namespace carnot

#endif
