#pragma once

namespace psoed {

/// P(X <= x) for X ~ chi-square with `dof` degrees of freedom, i.e. the
/// regularized lower incomplete gamma P(dof/2, x/2).
double chi_square_cdf(double x, double dof);

/// Inverse of chi_square_cdf by bisection; p in [0, 1).
double chi_square_quantile(double p, double dof);

}  // namespace psoed
