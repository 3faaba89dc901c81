#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psoed/core_types.hpp"
#include "psoed/oed.hpp"
#include "psoed/scenes.hpp"

namespace psoed {

struct HistogramSpec {
  double bin_width = 0.5;
  double range_max = 30.0;
};

/// Fixed-width bins over [0, range_max) plus one overflow bin at the end.
struct Histogram {
  HistogramSpec spec;
  std::vector<std::uint64_t> counts;

  std::size_t regular_bins() const noexcept { return counts.empty() ? 0 : counts.size() - 1; }
  double lower_edge(std::size_t bin) const noexcept { return spec.bin_width * static_cast<double>(bin); }
};

struct AngularErrorStats {
  double mean_deg = 0.0;
  double median_deg = 0.0;
  double p90_deg = 0.0;
  double max_deg = 0.0;
  std::size_t count = 0;
  Histogram histogram;
  /// Per-pixel error in degrees; NaN where either map is invalid.
  Grid<double> error_map;
};

/// Angle between two unit vectors in degrees.
double angular_error(const UnitVector3& a, const UnitVector3& b);
double angular_error(const Vec3& a, const Vec3& b);

/// Linear-interpolated quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

/// Summary statistics and histogram of a set of errors (degrees).
AngularErrorStats summarize_errors(std::vector<double> errors, const HistogramSpec& hist = {});

/// Errors over the pixels valid in both maps.
AngularErrorStats compare_maps(const NormalMap& est, const NormalMap& gt, const HistogramSpec& hist = {});

struct NamedConfig {
  std::string name;
  LightConfig lights;
};

struct ConfigEvaluation {
  std::string name;
  LightConfig lights;
  /// phi_shape_aware under the ground-truth shape prior.
  double phi = 0.0;
  /// Pooled over every valid pixel of every trial.
  AngularErrorStats stats;
  /// Mean over pooled samples of |n_tilde_est - rho n|^2.
  double n_tilde_mse = 0.0;
  /// trace(covariance(S, sigma)); 0 at zero noise.
  double predicted_mse = 0.0;
  /// Average fraction of ground-truth pixels that survived the solve.
  double valid_fraction = 0.0;
};

struct EvaluationSetup {
  double sigma = 0.0;
  int trials = 1;
  std::uint64_t seed = 0;
  HistogramSpec histogram;
};

/// Renders, perturbs, solves and scores every configuration. Trial t uses the
/// same noise substream for every configuration and runs in parallel with the
/// other trials; pooling happens in trial order.
std::vector<ConfigEvaluation> compare_configs(const Scene& scene, std::span<const NamedConfig> configs,
                                              const EvaluationSetup& setup);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace psoed
