#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace manifold_langevin {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a list of integers into one stream key. Order matters.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts);

/// Stream tags so that different consumers at the same iteration never share
/// random numbers.
enum class Stream : std::uint64_t {
  data = 1,
  init = 2,
  noise = 3,
  accept = 4,
  expectation = 5,
  oracle = 6,
};

/// Counter-based generator: output n is mix64(key + n * golden). Any
/// (key, counter) can be reproduced without replaying earlier draws, which is
/// what makes chains independent of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the spare value is cached.
  double normal();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace manifold_langevin
