#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psoed/core_types.hpp"
#include "psoed/oed.hpp"

namespace psoed {

struct OptimizerConfig {
  int max_iters = 5000;
  double step_size = 0.5;
  double armijo_shrink = 0.5;
  double armijo_c = 1e-4;
  double grad_tol = 1e-9;
  int restarts = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct OptimizationReport {
  LightConfig initial_s;
  LightConfig final_s;
  std::vector<double> phi_trajectory;
  int iterations_used = 0;
  bool converged = false;
  double gradient_norm_final = 0.0;
  /// Index of the winning run; 0 is the supplied initial configuration.
  int best_restart = 0;
  /// Final objective of every run, in restart order.
  std::vector<double> restart_phis;
};

/// d/dS trace(M (S^T S)^-1) = -2 S A M A with A = (S^T S)^-1.
RowsX3 phi_gradient(const LightConfig& lights, const ShapePrior& prior);
RowsX3 phi_gradient(const RowsX3& rows, const Matrix3& m_agg);

/// Removes the radial part of each row of g with respect to the unit rows of s.
RowsX3 tangent_project(const RowsX3& g, const RowsX3& s);

/// Flips the sign of rows pointing away from the camera (z < 0). Gram matrix,
/// and therefore every objective here, is unchanged.
LightConfig face_camera(const LightConfig& lights);

/// m rows i.i.d. uniform on the unit sphere, redrawn until full rank.
LightConfig random_unit_config(int m, std::uint64_t seed);

/// Projected gradient descent of phi_shape_aware over unit-row light
/// matrices with Armijo backtracking. Additional restarts start from seeded
/// random configurations; the lowest final objective wins (ties go to the
/// lower restart index). The returned final_s faces the camera.
OptimizationReport optimize_lights(const LightConfig& initial, const ShapePrior& prior, const OptimizerConfig& cfg);

struct RandomSample {
  LightConfig lights;
  double phi;
};

/// `count` random unit-row configurations scored with phi_shape_aware.
/// Sample c depends only on (seed, c); evaluated in parallel.
std::vector<RandomSample> baseline_random(int count, int m, const ShapePrior& prior, std::uint64_t seed);

/// m directions spreading out on the sphere as far as possible (maximal
/// minimum pairwise angle), found by repulsion descent from several random
/// starts. For m = 3 the answer is coplanar, so the rows are returned as a
/// plain matrix; wrap with LightConfig to check rank.
RowsX3 baseline_heuristic_spread(int m, std::uint64_t seed = 0, int starts = 8);

/// Three mutually orthogonal unit rows with tilts 120 degrees apart and a
/// common slant arccos(1/sqrt(3)) from `reference`.
LightConfig baseline_orthogonal_triad(const Vec3& reference = Vec3::UnitZ());

/// Smallest angle in degrees between any two rows.
double min_pairwise_angle_deg(const RowsX3& rows);

/// phi_shape_aware for a raw matrix; +inf when rank deficient.
double phi_or_infinity(const RowsX3& rows, const ShapePrior& prior);

}  // namespace psoed
