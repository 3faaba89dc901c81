#include "psoed/serial_reference.hpp"

#include "psoed/rng.hpp"

namespace psoed::serial {

IntensityStack render_stack(const NormalMap& nmap, const AlbedoMap& amap, const LightConfig& lights) {
  if (!amap.values.same_shape(nmap.width(), nmap.height())) {
    throw Error(ErrorCode::DimensionMismatch, "normal map and albedo map differ in size");
  }
  IntensityStack out;
  for (Eigen::Index i = 0; i < lights.m(); ++i) {
    const Vec3 s = lights.row(i);
    Grid<double> img(nmap.width(), nmap.height(), 0.0);
    for (std::size_t p = 0; p < nmap.size(); ++p) {
      if (nmap.valid(p)) img[p] = render_pixel(nmap.normal(p), amap.values[p], s);
    }
    out.images.push_back(std::move(img));
    out.sigmas.push_back(0.0);
  }
  return out;
}

IntensityStack add_noise(const IntensityStack& stack, const NoiseSpec& noise) {
  if (noise.sigmas.size() != stack.m()) throw Error(ErrorCode::DimensionMismatch, "sigma count differs from image count");
  noise.validate();
  IntensityStack out = stack;
  out.sigmas = noise.sigmas;
  for (std::size_t i = 0; i < stack.m(); ++i) {
    if (noise.sigmas[i] == 0.0) continue;
    const CounterRng rng(noise.seed + i);
    for (std::size_t p = 0; p < out.images[i].size(); ++p) out.images[i][p] += noise.sigmas[i] * rng.normal(p);
  }
  return out;
}

SolvedMaps solve_map(const IntensityStack& stack, const LightConfig& lights) {
  const std::size_t m = stack.m();
  if (m != static_cast<std::size_t>(lights.m()) || stack.sigmas.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "image, sigma and light counts differ");
  }
  const int w = stack.width();
  const int h = stack.height();
  const PixelSolver solver(lights, stack.sigmas);
  Grid<Vec3> normals(w, h, Vec3::Zero());
  Grid<std::uint8_t> mask(w, h, 0);
  Grid<double> albedo(w, h, 0.0);
  Grid<Vec3> n_tilde(w, h, Vec3::Zero());
  std::vector<double> px(m);
  for (std::size_t p = 0; p < normals.size(); ++p) {
    for (std::size_t i = 0; i < m; ++i) px[i] = stack.images[i][p];
    const PixelEstimate est = solver.solve(px);
    n_tilde[p] = est.n_tilde;
    if (est.valid && est.normal.z() > 0.0) {
      normals[p] = est.normal;
      albedo[p] = est.albedo;
      mask[p] = 1;
    }
  }
  return SolvedMaps{NormalMap(std::move(normals), std::move(mask)), AlbedoMap{std::move(albedo)}, std::move(n_tilde)};
}

ShapePrior build_shape_prior(const NormalMap& nmap) {
  Matrix3 acc = Matrix3::Zero();
  std::size_t count = 0;
  for (std::size_t p = 0; p < nmap.size(); ++p) {
    if (!nmap.valid(p)) continue;
    const Vec3& n = nmap.normal(p);
    acc += Matrix3::Identity() - n * n.transpose();
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyMask, "normal map has no valid pixel");
  Matrix3 m = acc / static_cast<double>(count);
  return ShapePrior(0.5 * (m + m.transpose()), count);
}

std::vector<RandomSample> baseline_random(int count, int m, const ShapePrior& prior, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  std::vector<RandomSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    LightConfig lc = random_unit_config(m, derive_seed(seed, static_cast<std::uint64_t>(c)));
    const double phi = phi_shape_aware(lc, prior);
    out.push_back(RandomSample{std::move(lc), phi});
  }
  return out;
}

}  // namespace psoed::serial
