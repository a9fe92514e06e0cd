#include "torusfpras/rng.hpp"

#include <cmath>
#include <numbers>

namespace torusfpras {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 output scrambler.
std::uint64_t scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index) {
  std::uint64_t s = master_seed ^ fnv1a64(purpose);
  s = scramble(s + kGolden);
  s += kGolden * (index + 1);
  state_ = scramble(s);
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return scramble(state_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(phi);
  have_cached_ = true;
  return r * std::cos(phi);
}

std::complex<double> RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
}

}  // namespace torusfpras
