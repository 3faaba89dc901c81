#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "psoed/core_types.hpp"

namespace psoed {

/// Per-pixel solution. n_tilde, albedo and normal are filled whenever
/// |n_tilde| > 1e-9, even if the pixel is rejected as shadowed.
struct PixelEstimate {
  Vec3 n_tilde = Vec3::Zero();
  double albedo = 0.0;
  Vec3 normal = Vec3::Zero();
  double residual_norm = 0.0;
  bool shadowed = false;
  bool valid = false;
};

/// Intensities below this are treated as shadowed: 3 * max(sigma), but never
/// below 1e-6.
double shadow_threshold(std::span<const double> sigmas);

/// Least-squares inverse of the Lambertian model for a fixed light set.
/// Factorizes the (optionally whitened) light matrix once with a
/// column-pivoted QR and reuses it for every pixel.
class PixelSolver {
 public:
  PixelSolver(const LightConfig& lights, std::span<const double> sigmas);

  PixelEstimate solve(std::span<const double> intensities) const;

  /// True when rows are weighted by 1/sigma_i (all sigmas positive and not all equal).
  bool weighted() const noexcept { return weighted_; }
  double threshold() const noexcept { return threshold_; }
  /// The 3 x m linear map from intensities to n_tilde.
  const Eigen::Matrix<double, 3, Eigen::Dynamic>& estimator() const noexcept { return estimator_; }

 private:
  RowsX3 lights_;
  Eigen::Matrix<double, 3, Eigen::Dynamic> estimator_;
  double threshold_ = 1e-6;
  bool weighted_ = false;
};

/// Three-light inversion n_tilde = S^-1 I. DimensionMismatch unless m = 3.
PixelEstimate solve_exact(const Vec3& intensities, const LightConfig& lights);

/// Weighted least squares for m >= 3 lights; reduces to (S^T S)^-1 S^T I when
/// the sigmas are equal. All-zero sigmas fall back to the unweighted solve.
PixelEstimate solve_lsq(std::span<const double> intensities, const LightConfig& lights,
                        std::span<const double> sigmas);

struct SolvedMaps {
  NormalMap normals;
  AlbedoMap albedo;
  /// Unnormalized estimate per pixel (zero where not solved).
  Grid<Vec3> n_tilde;
};

/// Solves every pixel. A pixel is masked when shadowed, degenerate, or when
/// its estimated normal faces away from the camera.
SolvedMaps solve_map(const IntensityStack& stack, const LightConfig& lights);

}  // namespace psoed
