#pragma once

// Standard normal helpers shared by the closed-form evaluations.

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace riskroute::normal {

inline double pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Inverse of cdf on (0,1).
inline double quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace riskroute::normal
