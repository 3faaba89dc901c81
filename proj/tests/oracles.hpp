#pragma once

// Test-only reference computations. None of these call into the code paths
// they are used to check.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "psoed/core_types.hpp"

namespace oracle {

using psoed::Matrix3;
using psoed::RowsX3;
using psoed::Vec3;

inline Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  for (;;) {
    Vec3 v(nd(gen), nd(gen), nd(gen));
    if (v.norm() > 1e-6) return v.normalized();
  }
}

inline RowsX3 random_unit_rows(std::mt19937_64& gen, int m) {
  RowsX3 s(m, 3);
  for (int i = 0; i < m; ++i) s.row(i) = random_unit(gen).transpose();
  return s;
}

/// Random unit rows with smallest/largest singular value above `min_ratio`.
inline RowsX3 well_conditioned_rows(std::mt19937_64& gen, int m, double min_ratio = 0.2) {
  for (;;) {
    RowsX3 s = random_unit_rows(gen, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(s.cast<double>()));
    if (svd.singularValues()(2) / svd.singularValues()(0) > min_ratio) return s;
  }
}

/// Random symmetric PSD matrix.
inline Matrix3 random_psd(std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix3 a;
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = nd(gen);
  return a * a.transpose() / 3.0;
}

/// trace(M (S^T S)^-1) via an explicit inverse (LU), the long way.
inline double phi_long(const RowsX3& s, const Matrix3& m) {
  const Matrix3 g = s.transpose() * s;
  return (m * g.inverse()).trace();
}

/// Central difference of f along every entry of s.
inline RowsX3 central_difference(const std::function<double(const RowsX3&)>& f, const RowsX3& s, double h) {
  RowsX3 g(s.rows(), 3);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (int c = 0; c < 3; ++c) {
      RowsX3 p = s, q = s;
      p(i, c) += h;
      q(i, c) -= h;
      g(i, c) = (f(p) - f(q)) / (2.0 * h);
    }
  }
  return g;
}

/// Chi-square CDF with 3 degrees of freedom in closed form:
/// erf(sqrt(x/2)) - sqrt(2x/pi) exp(-x/2).
inline double chi2_cdf_dof3(double x) {
  return std::erf(std::sqrt(x / 2.0)) - std::sqrt(2.0 * x / M_PI) * std::exp(-x / 2.0);
}

inline double chi2_quantile_dof3(double p) {
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf_dof3(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
