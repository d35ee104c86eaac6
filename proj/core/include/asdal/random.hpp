#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace asdal {

/// Seeded random stream with portable derived distributions.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// standard distributions are not, so uniform/normal/index draws are
/// implemented here to keep seeded replays identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;

  /// Standard normal via Box-Muller (one pair per call, second value dropped).
  double normal() noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Stable 64-bit hash for seed derivation: FNV-1a over the tagged bytes of
/// each part followed by a splitmix64 finaliser. Independent of execution
/// order, platform and std::hash.
class SeedHasher {
 public:
  explicit SeedHasher(std::uint64_t base);
  SeedHasher& add(std::string_view text);
  SeedHasher& add(std::uint64_t value);
  SeedHasher& add(double value);
  [[nodiscard]] std::uint64_t finish() const noexcept;

 private:
  void mix_byte(unsigned char byte) noexcept;
  std::uint64_t state_;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace asdal
