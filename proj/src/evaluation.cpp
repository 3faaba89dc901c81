#include "psoed/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Geometry>

#include "psoed/forward_model.hpp"
#include "psoed/ps_solver.hpp"
#include "psoed/rng.hpp"

namespace psoed {

double angular_error(const Vec3& a, const Vec3& b) {
  // Same angle as acos(a.b) but without the ~1e-6 degree floor near zero.
  return std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
}

double angular_error(const UnitVector3& a, const UnitVector3& b) { return angular_error(a.vec(), b.vec()); }

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

AngularErrorStats summarize_errors(std::vector<double> errors, const HistogramSpec& hist) {
  if (!(hist.bin_width > 0.0) || !(hist.range_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad histogram spec");
  AngularErrorStats s;
  s.count = errors.size();
  const auto bins = static_cast<std::size_t>(std::ceil(hist.range_max / hist.bin_width - 1e-9));
  s.histogram.spec = hist;
  s.histogram.counts.assign(bins + 1, 0);
  if (errors.empty()) {
    s.mean_deg = s.median_deg = s.p90_deg = s.max_deg = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double e : errors) {
    sum += e;
    const auto b = e >= hist.range_max ? bins : std::min(bins, static_cast<std::size_t>(e / hist.bin_width));
    ++s.histogram.counts[b];
  }
  s.mean_deg = sum / static_cast<double>(errors.size());
  std::sort(errors.begin(), errors.end());
  s.median_deg = quantile_sorted(errors, 0.5);
  s.p90_deg = quantile_sorted(errors, 0.9);
  s.max_deg = errors.back();
  return s;
}

AngularErrorStats compare_maps(const NormalMap& est, const NormalMap& gt, const HistogramSpec& hist) {
  if (est.width() != gt.width() || est.height() != gt.height()) {
    throw Error(ErrorCode::DimensionMismatch, "estimate and ground truth differ in size");
  }
  Grid<double> emap(gt.width(), gt.height(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> errors;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!est.valid(i) || !gt.valid(i)) continue;
    const double e = angular_error(est.normal(i), gt.normal(i));
    emap[i] = e;
    errors.push_back(e);
  }
  if (errors.empty()) throw Error(ErrorCode::EmptyMask, "no pixel is valid in both maps");
  AngularErrorStats s = summarize_errors(std::move(errors), hist);
  s.error_map = std::move(emap);
  return s;
}

namespace {

struct TrialOutcome {
  std::vector<double> errors;
  double sq_sum = 0.0;
  std::size_t solved = 0;
  Grid<double> error_map;
};

}  // namespace

std::vector<ConfigEvaluation> compare_configs(const Scene& scene, std::span<const NamedConfig> configs,
                                              const EvaluationSetup& setup) {
  if (setup.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(setup.sigma >= 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be >= 0");
  const NormalMap& gt = scene.normals;
  const ShapePrior prior = build_shape_prior(gt);
  const std::size_t gt_valid = gt.valid_count();

  std::vector<ConfigEvaluation> out;
  for (const NamedConfig& cfg : configs) {
    const IntensityStack clean = render_stack(gt, scene.albedo, cfg.lights);
    const auto m = static_cast<std::size_t>(cfg.lights.m());
    std::vector<TrialOutcome> trials(static_cast<std::size_t>(setup.trials));

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < setup.trials; ++t) {
      const NoiseSpec noise = NoiseSpec::uniform(m, setup.sigma, derive_seed(setup.seed, static_cast<std::uint64_t>(t)));
      const SolvedMaps sol = solve_map(add_noise(clean, noise), cfg.lights);
      TrialOutcome& o = trials[static_cast<std::size_t>(t)];
      o.error_map = Grid<double>(gt.width(), gt.height(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t i = 0; i < gt.size(); ++i) {
        if (!gt.valid(i) || !sol.normals.valid(i)) continue;
        const double e = angular_error(sol.normals.normal(i), gt.normal(i));
        o.errors.push_back(e);
        o.error_map[i] = e;
        o.sq_sum += (sol.n_tilde[i] - scene.albedo.values[i] * gt.normal(i)).squaredNorm();
        ++o.solved;
      }
    }

    std::vector<double> pooled;
    double sq_sum = 0.0;
    std::size_t solved = 0;
    for (const auto& o : trials) {
      pooled.insert(pooled.end(), o.errors.begin(), o.errors.end());
      sq_sum += o.sq_sum;
      solved += o.solved;
    }
    if (pooled.empty()) throw Error(ErrorCode::EmptyMask, "configuration '" + cfg.name + "' left no valid pixel");

    ConfigEvaluation ev{cfg.name, cfg.lights, phi_shape_aware(cfg.lights, prior), {}, 0.0, 0.0, 0.0};
    ev.stats = summarize_errors(std::move(pooled), setup.histogram);
    ev.stats.error_map = std::move(trials.front().error_map);
    ev.n_tilde_mse = sq_sum / static_cast<double>(solved);
    if (setup.sigma > 0.0) {
      const std::vector<double> sig(m, setup.sigma);
      ev.predicted_mse = covariance(cfg.lights, sig).matrix().trace();
    }
    ev.valid_fraction = static_cast<double>(solved) / (static_cast<double>(gt_valid) * setup.trials);
    out.push_back(std::move(ev));
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::DimensionMismatch, "spearman needs two equal-length samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace psoed
