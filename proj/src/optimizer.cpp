#include "psoed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "psoed/rng.hpp"

namespace psoed {

namespace {

struct RunResult {
  RowsX3 rows;
  std::vector<double> trajectory;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

RowsX3 normalize_rows(RowsX3 rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) /= rows.row(i).norm();
  return rows;
}

std::optional<double> try_phi(const RowsX3& rows, const Matrix3& m_agg) {
  if (!rows.allFinite() || !(inverse_condition(rows) > kRankTolerance)) return std::nullopt;
  return (m_agg * inverse_gram(rows)).trace();
}

RunResult descend(const RowsX3& start, const Matrix3& m_agg, const OptimizerConfig& cfg) {
  RunResult r;
  r.rows = start;
  auto phi0 = try_phi(r.rows, m_agg);
  if (!phi0) throw Error(ErrorCode::SingularLightMatrix, "initial light matrix has rank < 3");
  double phi = *phi0;
  r.trajectory.push_back(phi);

  for (int it = 0; it < cfg.max_iters; ++it) {
    const RowsX3 g = tangent_project(phi_gradient(r.rows, m_agg), r.rows);
    const double gn = g.norm();
    r.grad_norm = gn;
    if (gn < cfg.grad_tol) {
      r.converged = true;
      return r;
    }
    double t = cfg.step_size;
    bool accepted = false;
    bool rank_failure = false;
    while (t >= 1e-15) {
      const RowsX3 cand = normalize_rows(r.rows - t * g);
      const auto phi_c = try_phi(cand, m_agg);
      if (!phi_c) {
        rank_failure = true;
        t *= 0.5;
        continue;
      }
      rank_failure = false;
      if (*phi_c < phi && *phi_c <= phi - cfg.armijo_c * t * gn * gn) {
        r.rows = cand;
        phi = *phi_c;
        accepted = true;
        break;
      }
      t *= cfg.armijo_shrink;
    }
    if (!accepted) {
      if (rank_failure) throw Error(ErrorCode::RankCollapse, "every trial step collapsed the light matrix");
      // No representable decrease left along the gradient.
      return r;
    }
    r.iterations = it + 1;
    r.trajectory.push_back(phi);
  }
  const RowsX3 g = tangent_project(phi_gradient(r.rows, m_agg), r.rows);
  r.grad_norm = g.norm();
  r.converged = r.grad_norm < cfg.grad_tol;
  return r;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(step_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_size must be > 0");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo_shrink must be in (0, 1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo_c must be in (0, 1)");
  if (!(grad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tol must be > 0");
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
}

RowsX3 phi_gradient(const RowsX3& rows, const Matrix3& m_agg) {
  const Matrix3 a = inverse_gram(rows);
  return -2.0 * rows * (a * m_agg * a);
}

RowsX3 phi_gradient(const LightConfig& lights, const ShapePrior& prior) {
  return phi_gradient(lights.rows(), prior.m_agg());
}

RowsX3 tangent_project(const RowsX3& g, const RowsX3& s) {
  RowsX3 out = g;
  for (Eigen::Index i = 0; i < g.rows(); ++i) out.row(i) -= g.row(i).dot(s.row(i)) * s.row(i);
  return out;
}

LightConfig face_camera(const LightConfig& lights) {
  RowsX3 rows = lights.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (rows(i, 2) < 0.0) rows.row(i) *= -1.0;
  }
  return LightConfig(std::move(rows), lights.mode());
}

LightConfig random_unit_config(int m, std::uint64_t seed) {
  if (m < 3) throw Error(ErrorCode::InvalidLightConfig, "need at least 3 lights");
  const CounterRng rng(seed);
  for (std::uint64_t attempt = 0;; ++attempt) {
    RowsX3 rows(m, 3);
    for (int i = 0; i < m; ++i) {
      rows.row(i) = rng.unit_vector(attempt * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(i)).transpose();
    }
    if (inverse_condition(rows) > kRankTolerance) return LightConfig(std::move(rows));
  }
}

OptimizationReport optimize_lights(const LightConfig& initial, const ShapePrior& prior, const OptimizerConfig& cfg) {
  cfg.validate();
  if (initial.mode() != NormMode::Unit) {
    throw Error(ErrorCode::NonUnitRows, "the optimizer works on unit-row light configurations only");
  }
  for (Eigen::Index i = 0; i < initial.m(); ++i) {
    if (std::abs(initial.rows().row(i).norm() - 1.0) > kUnitTolerance) {
      throw Error(ErrorCode::NonUnitRows, "initial light " + std::to_string(i) + " is not unit length");
    }
  }
  const auto runs = static_cast<std::size_t>(cfg.restarts);
  std::vector<std::optional<RunResult>> results(runs);
  std::vector<std::exception_ptr> errors(runs);
  const int m = static_cast<int>(initial.m());

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.restarts; ++r) {
    try {
      const RowsX3 start = r == 0 ? initial.rows() : random_unit_config(m, derive_seed(cfg.seed, static_cast<std::uint64_t>(r))).rows();
      results[static_cast<std::size_t>(r)] = descend(start, prior.m_agg(), cfg);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  if (errors[0]) std::rethrow_exception(errors[0]);

  std::size_t best = 0;
  std::vector<double> finals(runs, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < runs; ++r) {
    if (!results[r]) continue;
    finals[r] = results[r]->trajectory.back();
    if (finals[r] < finals[best] - 1e-12) best = r;
  }
  RunResult& win = *results[best];
  OptimizationReport rep{initial, face_camera(LightConfig(normalize_rows(win.rows))), std::move(win.trajectory),
                         win.iterations, win.converged, win.grad_norm, static_cast<int>(best), std::move(finals)};
  return rep;
}

std::vector<RandomSample> baseline_random(int count, int m, const ShapePrior& prior, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  std::vector<std::optional<RandomSample>> tmp(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < count; ++c) {
    LightConfig lc = random_unit_config(m, derive_seed(seed, static_cast<std::uint64_t>(c)));
    const double phi = phi_shape_aware(lc, prior);
    tmp[static_cast<std::size_t>(c)].emplace(RandomSample{std::move(lc), phi});
  }
  std::vector<RandomSample> out;
  out.reserve(tmp.size());
  for (auto& s : tmp) out.push_back(std::move(*s));
  return out;
}

double min_pairwise_angle_deg(const RowsX3& rows) {
  double best = 180.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      const double c = std::clamp(rows.row(i).dot(rows.row(j)) / (rows.row(i).norm() * rows.row(j).norm()), -1.0, 1.0);
      best = std::min(best, std::acos(c) * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

RowsX3 baseline_heuristic_spread(int m, std::uint64_t seed, int starts) {
  if (m < 3) throw Error(ErrorCode::InvalidLightConfig, "need at least 3 lights");
  if (starts < 1) throw Error(ErrorCode::InvalidArgument, "starts must be >= 1");
  RowsX3 best;
  double best_angle = -1.0;
  for (int st = 0; st < starts; ++st) {
    const CounterRng rng(derive_seed(seed, 0x5EED, static_cast<std::uint64_t>(st)));
    RowsX3 x(m, 3);
    for (int i = 0; i < m; ++i) x.row(i) = rng.unit_vector(static_cast<std::uint64_t>(i)).transpose();

    // Riesz s-energy with growing exponent; large s approaches max-min spacing.
    for (double s : {1.0, 4.0, 16.0, 64.0}) {
      double eta = 0.1;
      for (int it = 0; it < 3000; ++it) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) dmin = std::min(dmin, (x.row(i) - x.row(j)).norm());
        RowsX3 force = RowsX3::Zero(m, 3);
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const Eigen::RowVector3d d = x.row(i) - x.row(j);
            const double dist = d.norm();
            force.row(i) += std::pow(dmin / dist, s + 2.0) * d;
          }
        }
        force = tangent_project(force, x);
        const double fmax = force.rowwise().norm().maxCoeff();
        if (fmax < 1e-14) break;
        x = normalize_rows(x + (eta / fmax) * force);
        eta = std::max(eta * 0.998, 1e-5);
      }
    }
    const double angle = min_pairwise_angle_deg(x);
    if (angle > best_angle + 1e-12) {
      best_angle = angle;
      best = x;
    }
  }
  return best;
}

LightConfig baseline_orthogonal_triad(const Vec3& reference) {
  const Vec3 r = normalize(reference).vector.vec();
  const Vec3 helper = std::abs(r.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = (helper - helper.dot(r) * r).normalized();
  const Vec3 v = r.cross(u);
  const double cos_slant = 1.0 / std::sqrt(3.0);
  const double sin_slant = std::sqrt(2.0 / 3.0);
  RowsX3 rows(3, 3);
  for (int k = 0; k < 3; ++k) {
    const double tilt = 2.0 * std::numbers::pi * k / 3.0;
    const Vec3 s = cos_slant * r + sin_slant * (std::cos(tilt) * u + std::sin(tilt) * v);
    rows.row(k) = s.normalized().transpose();
  }
  return LightConfig(std::move(rows));
}

double phi_or_infinity(const RowsX3& rows, const ShapePrior& prior) {
  if (rows.rows() < 3 || !(inverse_condition(rows) > kRankTolerance)) return std::numeric_limits<double>::infinity();
  return (prior.m_agg() * inverse_gram(rows)).trace();
}

}  // namespace psoed
