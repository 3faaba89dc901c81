#include "psoed/oed.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "psoed/chi_square.hpp"

namespace psoed {

namespace {

bool symmetric(const Matrix3& a, double tol) { return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol; }

}  // namespace

EstimateCovariance::EstimateCovariance(const Matrix3& c) : c_(c) {
  if (!c.allFinite() || !symmetric(c, 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))) {
    throw Error(ErrorCode::InvalidArgument, "covariance is not symmetric");
  }
  Eigen::LLT<Matrix3> llt(c);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "covariance is not positive definite");
}

bool ConfidenceRegion::contains(const Vec3& p) const {
  const Vec3 d = p - center;
  return d.dot(shape * d) <= radius_sq;
}

ShapePrior::ShapePrior(const Matrix3& m_agg, std::size_t pixel_count) : m_(m_agg), count_(pixel_count) {
  if (!m_.allFinite() || !symmetric(m_, 1e-12)) throw Error(ErrorCode::InvalidArgument, "shape prior is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(m_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw Error(ErrorCode::InvalidArgument, "shape prior is not positive semidefinite");
  }
}

ShapePrior ShapePrior::identity() { return ShapePrior(Matrix3::Identity(), 0); }

Matrix3 inverse_gram(const RowsX3& rows) {
  if (rows.rows() < 3 || !(inverse_condition(rows) > kRankTolerance)) {
    throw Error(ErrorCode::SingularLightMatrix, "light matrix has rank < 3");
  }
  const Matrix3 gram = rows.transpose() * rows;
  Eigen::LLT<Matrix3> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularLightMatrix, "Gram matrix is not invertible");
  Matrix3 inv = llt.solve(Matrix3::Identity());
  return 0.5 * (inv + inv.transpose());
}

EstimateCovariance covariance(const LightConfig& lights, std::span<const double> sigmas) {
  if (static_cast<Eigen::Index>(sigmas.size()) != lights.m()) {
    throw Error(ErrorCode::DimensionMismatch, "sigma count differs from light count");
  }
  RowsX3 whitened = lights.rows();
  for (Eigen::Index i = 0; i < whitened.rows(); ++i) {
    const double s = sigmas[static_cast<std::size_t>(i)];
    if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma " + std::to_string(i) + " must be > 0");
    whitened.row(i) /= s;
  }
  return EstimateCovariance(inverse_gram(whitened));
}

ConfidenceRegion confidence_region(const PixelEstimate& est, const EstimateCovariance& cov, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1)");
  const Matrix3& c = cov.matrix();
  ConfidenceRegion cr;
  cr.center = est.n_tilde;
  cr.alpha = alpha;
  cr.radius_sq = chi_square_quantile(1.0 - alpha, 3.0);
  Matrix3 shape = c.llt().solve(Matrix3::Identity());
  cr.shape = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(c, Eigen::EigenvaluesOnly);
  for (int i = 0; i < 3; ++i) cr.semiaxes[static_cast<std::size_t>(i)] = std::sqrt(cr.radius_sq * std::max(0.0, eig.eigenvalues()(2 - i)));
  return cr;
}

double a_criterion(const EstimateCovariance& cov) { return cov.matrix().trace() / 3.0; }

Matrix3 b_matrix(const Vec3& n_tilde) {
  const double norm = n_tilde.norm();
  if (!(norm > 1e-9)) throw Error(ErrorCode::DegenerateVector, "b_matrix needs |n_tilde| > 1e-9");
  const Vec3 n = n_tilde / norm;
  return (Matrix3::Identity() - n * n.transpose()) / norm;
}

double phi_shape_agnostic(const LightConfig& lights) { return inverse_gram(lights.rows()).trace(); }

double phi_shape_aware(const LightConfig& lights, const ShapePrior& prior) {
  return (prior.m_agg() * inverse_gram(lights.rows())).trace();
}

ShapePrior build_shape_prior(const NormalMap& nmap) {
  const int h = nmap.height();
  const int w = nmap.width();
  // One partial sum per row, combined pairwise in row order.
  std::vector<Matrix3> row_sums(static_cast<std::size_t>(h), Matrix3::Zero());
  std::vector<std::size_t> row_counts(static_cast<std::size_t>(h), 0);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    Matrix3 acc = Matrix3::Zero();
    std::size_t count = 0;
    for (int x = 0; x < w; ++x) {
      if (!nmap.valid(x, y)) continue;
      const Vec3& n = nmap.normal(x, y);
      acc += Matrix3::Identity() - n * n.transpose();
      ++count;
    }
    row_sums[static_cast<std::size_t>(y)] = acc;
    row_counts[static_cast<std::size_t>(y)] = count;
  }

  std::size_t total = 0;
  for (auto c : row_counts) total += c;
  if (total == 0) throw Error(ErrorCode::EmptyMask, "normal map has no valid pixel");

  for (std::size_t stride = 1; stride < row_sums.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < row_sums.size(); i += 2 * stride) row_sums[i] += row_sums[i + stride];
  }
  Matrix3 m = row_sums.front() / static_cast<double>(total);
  m = 0.5 * (m + m.transpose());
  return ShapePrior(m, total);
}

}  // namespace psoed
