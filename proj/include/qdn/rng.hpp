#pragma once

#include <cmath>
#include <cstdint>

namespace qdn {

// Counter-based random numbers: every draw is a pure function of
// (key, counter), so a trajectory can be replayed from its seed alone and
// independent streams never share state.

namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_(detail::mix64(seed + detail::kGolden)) {}

  // Fixed splitting rule: substream i of a master seed is itself a seed.
  static CounterRng substream(std::uint64_t master_seed, std::uint64_t index) {
    return CounterRng(detail::mix64(master_seed + detail::kGolden) ^
                      detail::mix64((index + 1) * detail::kGolden));
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return detail::mix64(key_ + counter * detail::kGolden);
  }

  // uniform on the open interval (0,1)
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; one draw consumes counters 2c and 2c+1
  double normal(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace qdn
