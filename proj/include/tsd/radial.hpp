#pragma once

// One-dimensional radial integrals against s^{-1-alpha} q(s) ds.
// Every Levy-measure functional of a spectral-radial model reduces to these.

#include <limits>

#include "tsd/profile.hpp"
#include "tsd/quadrature.hpp"

namespace tsd::radial {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances used throughout the radial machinery.
QuadOptions default_options();

/// \int_r^\infty s^{-1-alpha} q(s) ds
double tail(const RadialProfile& q, double alpha, double r);

/// \int_a^b s^{-1-alpha} q(s) ds, 0 < a < b <= inf
double segment(const RadialProfile& q, double alpha, double a, double b);

/// \int_0^r s^{1-alpha} q(s) ds
double inner_second_moment(const RadialProfile& q, double alpha, double r);

/// \int_0^r s^{3-alpha} q(s) ds
double inner_fourth_moment(const RadialProfile& q, double alpha, double r);

/// \int_lo^hi (1 - cos(u s)) s^{-1-alpha} q(s) ds for u >= 0, 0 <= lo < hi <= inf.
QuadResult one_minus_cos(const RadialProfile& q, double alpha, double u, double lo = 0.0, double hi = kInf);

/// \int_lo^\infty cos(u s) s^{-1-alpha} q(s) ds, lo > 0.
double cos_transform(const RadialProfile& q, double alpha, double u, double lo);

}  // namespace tsd::radial
