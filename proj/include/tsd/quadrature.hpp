#pragma once

// Adaptive Gauss-Kronrod quadrature and an accelerated cosine-tail integrator.
//
// integrate() is a global-error adaptive scheme in the style of QUADPACK's QAG:
// the panel with the largest error estimate is bisected until the summed error
// drops below max(abs_tol, rel_tol * |I|).
//
// integrate_cos_tail() handles  \int_a^\infty cos(v) f(v) dv  for f that is
// eventually positive and decreasing: the integral is cut at the zeros of cos,
// and the resulting alternating series is summed with the Cohen-Rodriguez
// Villegas-Zagier (Euler-type) acceleration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tsd/errors.hpp"

namespace tsd {

struct QuadOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 1 << 15;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067815765, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

// 21-point Kronrod rule with embedded 10-point Gauss rule; QUADPACK error heuristic.
template <class F>
Panel gk21(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  double fv1[10];
  double fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
  return {a, b, value, err};
}

inline bool panel_less(const Panel& x, const Panel& y) { return x.error < y.error; }

}  // namespace detail

/// Adaptive integration over consecutive intervals [p0,p1], [p1,p2], ...
/// The breakpoints are where the integrand has kinks or jumps.
template <class F>
QuadResult integrate(F&& f, std::span<const double> points, const QuadOptions& opt = {}) {
  QuadResult out;
  if (points.size() < 2) return out;
  std::vector<detail::Panel> heap;
  heap.reserve(64);
  double frozen_value = 0.0;
  double frozen_error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] == points[i]) continue;
    heap.push_back(detail::gk21(f, points[i], points[i + 1]));
    out.evaluations += 21;
  }
  std::make_heap(heap.begin(), heap.end(), detail::panel_less);

  auto totals = [&](double& value, double& error) {
    value = frozen_value;
    error = frozen_error;
    for (const auto& p : heap) {
      value += p.value;
      error += p.error;
    }
  };

  double value = 0.0;
  double error = 0.0;
  totals(value, error);
  int splits = 0;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (heap.empty()) break;
    if (splits >= opt.max_subdivisions || !std::isfinite(value)) {
      throw NumericError("adaptive quadrature did not converge", value, error);
    }
    std::pop_heap(heap.begin(), heap.end(), detail::panel_less);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        std::abs(worst.b - worst.a) < 1e3 * std::numeric_limits<double>::epsilon() *
                                          std::max(std::abs(worst.a), std::abs(worst.b))) {
      // cannot be resolved further in double precision
      frozen_value += worst.value;
      frozen_error += worst.error;
    } else {
      const auto left = detail::gk21(f, worst.a, mid);
      const auto right = detail::gk21(f, mid, worst.b);
      value += left.value + right.value - worst.value;
      error += left.error + right.error - worst.error;
      heap.push_back(left);
      std::push_heap(heap.begin(), heap.end(), detail::panel_less);
      heap.push_back(right);
      std::push_heap(heap.begin(), heap.end(), detail::panel_less);
      out.evaluations += 42;
      ++splits;
    }
    if (splits % 128 == 0 || error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value)))
      totals(value, error);
    if (heap.empty() && error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
      throw NumericError("adaptive quadrature hit the resolution floor", value, error);
    }
  }
  out.value = value;
  out.error = error;
  return out;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const double pts[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts, 2), opt);
}

/// Cohen-Rodriguez Villegas-Zagier acceleration of sum_{k>=0} (-1)^k a_k using n terms.
inline double accelerate_alternating(std::span<const double> a, int n) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a[k];
    b = (static_cast<double>(k) + n) * (static_cast<double>(k) - n) * b /
        ((static_cast<double>(k) + 0.5) * (static_cast<double>(k) + 1.0));
  }
  return s / d;
}

/// \int_a^\infty cos(v) f(v) dv for f eventually positive, decreasing and integrable.
/// `scale` is a magnitude the absolute error is measured against (pass the size of the
/// enclosing integral so that tiny tails are not over-resolved).
template <class F>
QuadResult integrate_cos_tail(F&& f, double a, double scale, const QuadOptions& opt = {}) {
  constexpr double pi = std::numbers::pi;
  auto g = [&](double v) { return std::cos(v) * f(v); };
  QuadOptions piece = opt;
  piece.rel_tol = opt.rel_tol * 1e-2;
  piece.abs_tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(scale)) * 1e-3;

  QuadResult out;
  const double k0 = std::ceil((a - 0.5 * pi) / pi);
  const double z0 = 0.5 * pi + k0 * pi;
  double direct = 0.0;
  double err = 0.0;
  if (z0 > a) {
    auto r = integrate(g, a, z0, piece);
    direct += r.value;
    err += r.error;
    out.evaluations += r.evaluations;
  }
  std::vector<double> terms;  // terms[j] = integral over [z_j, z_{j+1}]
  auto ensure = [&](std::size_t count) {
    while (terms.size() < count) {
      const double lo = z0 + static_cast<double>(terms.size()) * pi;
      auto r = integrate(g, lo, lo + pi, piece);
      terms.push_back(r.value);
      err += r.error;
      out.evaluations += r.evaluations;
    }
  };

  constexpr int kShort = 24;
  constexpr int kLong = 36;
  constexpr std::size_t kMaxTerms = 200000;
  std::size_t m = 0;
  std::vector<double> alt(kLong);
  while (true) {
    ensure(m + kLong);
    double tail_mag = 0.0;
    for (int k = 0; k < kLong; ++k) tail_mag = std::max(tail_mag, std::abs(terms[m + k]));
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::max(std::abs(scale), std::abs(direct)));
    if (tail_mag == 0.0 || tail_mag * kLong < 1e-3 * tol) {
      for (int k = 0; k < kLong; ++k) direct += terms[m + k];
      out.value = direct;
      out.error = err;
      return out;
    }
    const double sign0 = terms[m] >= 0.0 ? 1.0 : -1.0;
    for (int k = 0; k < kLong; ++k) alt[k] = sign0 * ((k % 2 == 0) ? terms[m + k] : -terms[m + k]);
    const double s_short = sign0 * accelerate_alternating(alt, kShort);
    const double s_long = sign0 * accelerate_alternating(alt, kLong);
    if (std::abs(s_short - s_long) <= tol) {
      out.value = direct + s_long;
      out.error = err + std::abs(s_short - s_long);
      return out;
    }
    for (int k = 0; k < 32; ++k) direct += terms[m + k];
    m += 32;
    if (m > kMaxTerms) throw NumericError("oscillatory tail did not converge", direct + s_long, std::abs(s_short - s_long));
  }
}

/// \int_a^b cos(v) f(v) dv over a finite range that may span many periods.
template <class F>
QuadResult integrate_cos_range(F&& f, double a, double b, double scale, const QuadOptions& opt = {}) {
  constexpr double pi = std::numbers::pi;
  QuadResult out;
  if (b <= a) return out;
  auto g = [&](double v) { return std::cos(v) * f(v); };
  const double periods = (b - a) / pi;
  if (periods <= 4000.0) {
    std::vector<double> pts;
    pts.push_back(a);
    double z = 0.5 * pi + std::ceil((a - 0.5 * pi) / pi) * pi;
    for (; z < b; z += pi)
      if (z > a) pts.push_back(z);
    pts.push_back(b);
    QuadOptions o = opt;
    o.abs_tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(scale)) * 1e-2;
    o.max_subdivisions = std::max(opt.max_subdivisions, static_cast<int>(4 * pts.size()));
    return integrate(g, std::span<const double>(pts), o);
  }
  auto lo = integrate_cos_tail(f, a, scale, opt);
  auto hi = integrate_cos_tail(f, b, scale, opt);
  out.value = lo.value - hi.value;
  out.error = lo.error + hi.error;
  out.evaluations = lo.evaluations + hi.evaluations;
  return out;
}

}  // namespace tsd
