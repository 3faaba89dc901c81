#include "psoed/forward_model.hpp"

#include <cmath>
#include <string>

#include "psoed/rng.hpp"

namespace psoed {

NoiseSpec NoiseSpec::uniform(std::size_t m, double sigma, std::uint64_t seed) {
  return NoiseSpec{std::vector<double>(m, sigma), seed};
}

void NoiseSpec::validate() const {
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] >= 0.0) || !std::isfinite(sigmas[i])) {
      throw Error(ErrorCode::NonPositiveSigma, "sigma " + std::to_string(i) + " must be >= 0");
    }
  }
}

IntensityStack render_stack(const NormalMap& nmap, const AlbedoMap& amap, const LightConfig& lights) {
  if (!amap.values.same_shape(nmap.width(), nmap.height())) {
    throw Error(ErrorCode::DimensionMismatch, "normal map and albedo map differ in size");
  }
  const auto m = static_cast<std::size_t>(lights.m());
  const int w = nmap.width();
  const int h = nmap.height();
  IntensityStack out;
  out.images.assign(m, Grid<double>(w, h, 0.0));
  out.sigmas.assign(m, 0.0);

  std::vector<Vec3> dirs;
  for (std::size_t i = 0; i < m; ++i) dirs.push_back(lights.row(static_cast<Eigen::Index>(i)));

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!nmap.valid(x, y)) continue;
      const Vec3& n = nmap.normal(x, y);
      const double rho = amap.values(x, y);
      for (std::size_t i = 0; i < m; ++i) out.images[i](x, y) = render_pixel(n, rho, dirs[i]);
    }
  }
  return out;
}

IntensityStack add_noise(const IntensityStack& stack, const NoiseSpec& noise) {
  if (noise.sigmas.size() != stack.m()) {
    throw Error(ErrorCode::DimensionMismatch, "noise has " + std::to_string(noise.sigmas.size()) +
                                                  " sigmas for " + std::to_string(stack.m()) + " images");
  }
  noise.validate();
  IntensityStack out = stack;
  out.sigmas = noise.sigmas;
  for (std::size_t i = 0; i < stack.m(); ++i) {
    const double sigma = noise.sigmas[i];
    if (sigma == 0.0) continue;
    const CounterRng rng(noise.seed + i);
    auto& img = out.images[i];
    const auto n = static_cast<std::int64_t>(img.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) {
      img[static_cast<std::size_t>(p)] += sigma * rng.normal(static_cast<std::uint64_t>(p));
    }
  }
  return out;
}

}  // namespace psoed
