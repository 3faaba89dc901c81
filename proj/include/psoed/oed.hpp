#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "psoed/core_types.hpp"
#include "psoed/ps_solver.hpp"

namespace psoed {

/// Covariance of the unnormalized normal estimate (symmetric positive definite).
class EstimateCovariance {
 public:
  explicit EstimateCovariance(const Matrix3& c);
  const Matrix3& matrix() const noexcept { return c_; }

 private:
  Matrix3 c_;
};

/// Ellipsoid {p : (p - center)^T shape (p - center) <= radius_sq}.
struct ConfidenceRegion {
  Vec3 center;
  Matrix3 shape;
  double radius_sq;
  double alpha;
  /// sqrt(radius_sq * lambda_i(C)), descending.
  std::array<double, 3> semiaxes;

  bool contains(const Vec3& p) const;
};

/// Pixel-averaged B^T B used by the shape-aware objective.
class ShapePrior {
 public:
  ShapePrior(const Matrix3& m_agg, std::size_t pixel_count);
  /// M = I: the shape-aware objective collapses to trace((S^T S)^-1).
  static ShapePrior identity();

  const Matrix3& m_agg() const noexcept { return m_; }
  std::size_t pixel_count() const noexcept { return count_; }

 private:
  Matrix3 m_;
  std::size_t count_;
};

/// (S^T W S)^-1 with W = diag(1 / sigma_i^2).
EstimateCovariance covariance(const LightConfig& lights, std::span<const double> sigmas);

/// Confidence region around est.n_tilde at level 1 - alpha; the radius is the
/// chi-square(3) quantile.
ConfidenceRegion confidence_region(const PixelEstimate& est, const EstimateCovariance& cov, double alpha);

/// A-criterion: trace(C) / 3.
double a_criterion(const EstimateCovariance& cov);

/// Jacobian of v -> v / |v|: (I - n n^T) / |v|.
Matrix3 b_matrix(const Vec3& n_tilde);

/// trace((S^T S)^-1).
double phi_shape_agnostic(const LightConfig& lights);

/// trace(M_agg (S^T S)^-1).
double phi_shape_aware(const LightConfig& lights, const ShapePrior& prior);

/// Average of B(n)^T B(n) = I - n n^T over the valid pixels, reduced in a
/// fixed row-block order so results do not depend on the thread count.
ShapePrior build_shape_prior(const NormalMap& nmap);

/// (S^T S)^-1 for a full-rank light matrix. Throws SingularLightMatrix.
Matrix3 inverse_gram(const RowsX3& rows);

}  // namespace psoed
