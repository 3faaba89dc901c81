#pragma once

#include <cstdint>
#include <vector>

#include "psoed/core_types.hpp"

namespace psoed {

/// Additive Gaussian noise: image i gets N(0, sigmas[i]^2) per pixel.
struct NoiseSpec {
  std::vector<double> sigmas;
  std::uint64_t seed = 0;

  static NoiseSpec uniform(std::size_t m, double sigma, std::uint64_t seed);
  void validate() const;
};

/// Lambertian intensity with attached shadow: max(0, rho * n.s).
inline double render_pixel(const Vec3& n, double rho, const Vec3& s) noexcept {
  const double v = rho * n.dot(s);
  return v > 0.0 ? v : 0.0;
}

inline double render_pixel(const UnitVector3& n, double rho, const Vec3& s) noexcept {
  return render_pixel(n.vec(), rho, s);
}

/// Renders one image per light; invalid pixels are 0 and sigmas are 0.
/// Rows are processed in parallel.
IntensityStack render_stack(const NormalMap& nmap, const AlbedoMap& amap, const LightConfig& lights);

/// Adds seeded Gaussian noise. Pixel p of image i draws from the substream
/// seed + i at counter p, so the result does not depend on scheduling.
/// Negative values are kept.
IntensityStack add_noise(const IntensityStack& stack, const NoiseSpec& noise);

}  // namespace psoed
