#include "psoed/ps_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

namespace psoed {

double shadow_threshold(std::span<const double> sigmas) {
  double max_sigma = 0.0;
  for (double s : sigmas) max_sigma = std::max(max_sigma, s);
  return std::max(3.0 * max_sigma, 1e-6);
}

PixelSolver::PixelSolver(const LightConfig& lights, std::span<const double> sigmas)
    : lights_(lights.rows()) {
  const Eigen::Index m = lights.m();
  if (static_cast<Eigen::Index>(sigmas.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(sigmas.size()) + " sigmas for " + std::to_string(m) + " lights");
  }
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw Error(ErrorCode::NonPositiveSigma, "negative sigma");
  }
  threshold_ = shadow_threshold(sigmas);

  const bool all_positive = std::all_of(sigmas.begin(), sigmas.end(), [](double s) { return s > 0.0; });
  const bool all_equal = std::all_of(sigmas.begin(), sigmas.end(), [&](double s) { return s == sigmas[0]; });
  weighted_ = all_positive && !all_equal;

  Eigen::VectorXd w = Eigen::VectorXd::Ones(m);
  if (weighted_) {
    for (Eigen::Index i = 0; i < m; ++i) w(i) = 1.0 / sigmas[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd whitened = w.asDiagonal() * Eigen::MatrixXd(lights_);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(whitened);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < 3) throw Error(ErrorCode::SingularLightMatrix, "light matrix has rank < 3");
  const Eigen::MatrixXd weights = w.asDiagonal();
  estimator_ = qr.solve(weights);
}

PixelEstimate PixelSolver::solve(std::span<const double> intensities) const {
  const auto m = static_cast<std::size_t>(lights_.rows());
  if (intensities.size() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(intensities.size()) + " intensities for " + std::to_string(m) + " lights");
  }
  const Eigen::Map<const Eigen::VectorXd> I(intensities.data(), static_cast<Eigen::Index>(m));
  PixelEstimate est;
  est.n_tilde = estimator_ * I;
  est.residual_norm = (I - lights_ * est.n_tilde).norm();
  est.shadowed = std::any_of(intensities.begin(), intensities.end(), [&](double v) { return v < threshold_; });
  const double norm = est.n_tilde.norm();
  if (norm > 1e-9) {
    est.albedo = norm;
    est.normal = est.n_tilde / norm;
    est.valid = !est.shadowed;
  }
  return est;
}

PixelEstimate solve_exact(const Vec3& intensities, const LightConfig& lights) {
  if (lights.m() != 3) throw Error(ErrorCode::DimensionMismatch, "exact solve needs exactly 3 lights");
  const double zeros[3] = {0.0, 0.0, 0.0};
  return PixelSolver(lights, zeros).solve(std::span<const double>(intensities.data(), 3));
}

PixelEstimate solve_lsq(std::span<const double> intensities, const LightConfig& lights,
                        std::span<const double> sigmas) {
  return PixelSolver(lights, sigmas).solve(intensities);
}

SolvedMaps solve_map(const IntensityStack& stack, const LightConfig& lights) {
  const std::size_t m = stack.m();
  if (m != static_cast<std::size_t>(lights.m())) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(m) + " images for " + std::to_string(lights.m()) + " lights");
  }
  if (stack.sigmas.size() != m) throw Error(ErrorCode::DimensionMismatch, "stack sigma count differs from image count");
  const int w = stack.width();
  const int h = stack.height();
  for (const auto& img : stack.images) {
    if (!img.same_shape(w, h)) throw Error(ErrorCode::DimensionMismatch, "images differ in size");
  }

  const PixelSolver solver(lights, stack.sigmas);
  Grid<Vec3> normals(w, h, Vec3::Zero());
  Grid<std::uint8_t> mask(w, h, 0);
  Grid<double> albedo(w, h, 0.0);
  Grid<Vec3> n_tilde(w, h, Vec3::Zero());

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::vector<double> px(m);
    for (int x = 0; x < w; ++x) {
      for (std::size_t i = 0; i < m; ++i) px[i] = stack.images[i](x, y);
      const PixelEstimate est = solver.solve(px);
      n_tilde(x, y) = est.n_tilde;
      if (!est.valid || !(est.normal.z() > 0.0)) continue;
      normals(x, y) = est.normal;
      albedo(x, y) = est.albedo;
      mask(x, y) = 1;
    }
  }
  return SolvedMaps{NormalMap(std::move(normals), std::move(mask)), AlbedoMap{std::move(albedo)}, std::move(n_tilde)};
}

}  // namespace psoed
