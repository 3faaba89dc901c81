#pragma once

#include <cstdint>

#include "psoed/core_types.hpp"

namespace psoed {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, counter), so parallel loops produce the same numbers in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal via Box-Muller on counters 2k and 2k+1.
  double normal(std::uint64_t k) const noexcept;
  /// Uniform direction on the unit sphere (three normals, normalized).
  Vec3 unit_vector(std::uint64_t k) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent seed for a (stream, index) pair.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) noexcept;

}  // namespace psoed
