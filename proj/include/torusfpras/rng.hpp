#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace torusfpras {

// FNV-1a 64-bit hash of a byte string. Used both for deriving named random
// streams and for content-addressing serialized artifacts.
std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic counter-based random stream.
//
// Streams are derived from (master_seed, purpose, index) so that every
// consumer owns an independent substream addressed by name: the acquisition
// stage uses one stream per grid point, the extraction stage one per random
// Hermitian combination, and so on. Draws from one stream never perturb
// another, which is what makes reruns byte-identical regardless of evaluation
// order.
//
// The generator is a splitmix64 counter (Steele, Lea & Flood's finalizer over
// a Weyl sequence). It is implemented here rather than via <random> because
// the standard distributions are implementation-defined: two standard
// libraries may produce different doubles from the same engine, which would
// silently break the reproducibility contract.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index = 0);

  // Next raw 64-bit word.
  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal via Box-Muller; generates pairs and caches the second.
  double normal();

  // Standard complex normal: (normal + i*normal) / sqrt(2), so E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace torusfpras
