#include "psoed/rng.hpp"

#include <cmath>
#include <numbers>

namespace psoed {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)) + index);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  // Two rounds so that neighbouring seeds and counters decorrelate.
  return splitmix64(splitmix64(seed_) ^ splitmix64(counter + 0xD1B54A32D192ED03ULL));
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  // 53 random bits, shifted by half an ulp so 0 is never returned.
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t k) const noexcept {
  const double u1 = uniform(2 * k);
  const double u2 = uniform(2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 CounterRng::unit_vector(std::uint64_t k) const noexcept {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t base = 3 * (k + attempt * 0x100000000ULL);
    Vec3 v(normal(base), normal(base + 1), normal(base + 2));
    const double n = v.norm();
    if (n > 1e-9) return v / n;
  }
}

}  // namespace psoed
