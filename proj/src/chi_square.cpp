#include "psoed/chi_square.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "psoed/error.hpp"

namespace psoed {

double chi_square_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorCode::InvalidArgument, "chi-square dof must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, double dof) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability must be in [0, 1)");
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = dof + 1.0;
  while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace psoed
