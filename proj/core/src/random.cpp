#include "asdal/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace asdal {

std::size_t Rng::uniform_index(std::size_t n) noexcept {
  const auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  return std::min(i, n - 1);
}

double Rng::normal() noexcept {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}  // namespace

SeedHasher::SeedHasher(std::uint64_t base) : state_(kFnvOffset) { add(base); }

void SeedHasher::mix_byte(unsigned char byte) noexcept {
  state_ ^= byte;
  state_ *= kFnvPrime;
}

SeedHasher& SeedHasher::add(std::string_view text) {
  mix_byte('s');
  add(static_cast<std::uint64_t>(text.size()));
  for (char c : text) mix_byte(static_cast<unsigned char>(c));
  return *this;
}

SeedHasher& SeedHasher::add(std::uint64_t value) {
  mix_byte('u');
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(value >> (8 * i)));
  return *this;
}

SeedHasher& SeedHasher::add(double value) {
  mix_byte('d');
  if (value == 0.0) value = 0.0;  // fold -0 onto +0
  return add(std::bit_cast<std::uint64_t>(value));
}

std::uint64_t SeedHasher::finish() const noexcept { return splitmix64(state_); }

}  // namespace asdal
