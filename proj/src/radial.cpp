#include "tsd/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsd/errors.hpp"

namespace tsd::radial {

namespace {

constexpr double kPi = std::numbers::pi;

// Breakpoints in a substituted variable: sorts, drops duplicates and anything outside [lo, hi].
std::vector<double> make_points(double lo, double hi, std::vector<double> inner) {
  std::vector<double> pts{lo};
  std::sort(inner.begin(), inner.end());
  for (double p : inner)
    if (p > lo && p < hi && p - pts.back() > 1e-14 * std::max(1.0, std::abs(p))) pts.push_back(p);
  pts.push_back(hi);
  return pts;
}

}  // namespace

QuadOptions default_options() {
  QuadOptions o;
  o.rel_tol = 1e-9;
  o.abs_tol = 1e-12;
  o.max_subdivisions = 1 << 15;
  return o;
}

double tail(const RadialProfile& q, double alpha, double r) {
  if (!(r > 0.0)) throw DomainError("radial tail: r must be positive");
  const double end = q.support_end();
  if (r >= end) return 0.0;
  if (q.kind() == ProfileKind::Constant) return q.value() * std::pow(r, -alpha) / alpha;
  // s = r w^{-1/alpha}:  \int_r^\infty s^{-1-alpha} q ds = r^{-alpha}/alpha \int_0^1 q(r w^{-1/alpha}) dw
  const double w0 = std::isfinite(end) ? std::pow(r / end, alpha) : 0.0;
  std::vector<double> inner;
  for (double s : q.knots())
    if (s > r) inner.push_back(std::pow(r / s, alpha));
  const auto pts = make_points(w0, 1.0, inner);
  auto f = [&](double w) { return q(r * std::pow(w, -1.0 / alpha)); };
  auto opt = default_options();
  opt.abs_tol = 1e-300;
  const auto res = integrate(f, std::span<const double>(pts), opt);
  return std::pow(r, -alpha) / alpha * res.value;
}

double segment(const RadialProfile& q, double alpha, double a, double b) {
  if (!(a > 0.0)) throw DomainError("radial segment: lower limit must be positive");
  if (!std::isfinite(b)) return tail(q, alpha, a);
  b = std::min(b, q.support_end());
  if (a >= b) return 0.0;
  if (q.kind() == ProfileKind::Constant) return q.value() * (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
  // s = e^x
  std::vector<double> inner;
  for (double s : q.knots()) inner.push_back(std::log(s));
  const auto pts = make_points(std::log(a), std::log(b), inner);
  auto f = [&](double x) {
    const double s = std::exp(x);
    return std::exp(-alpha * x) * q(s);
  };
  auto opt = default_options();
  opt.abs_tol = 1e-300;
  return integrate(f, std::span<const double>(pts), opt).value;
}

namespace {

double inner_moment(const RadialProfile& q, double alpha, double r, double power) {
  // \int_0^r s^{power-1-alpha} q ds with s = r w^{1/(power-alpha)}
  if (!(r > 0.0)) throw DomainError("radial moment: r must be positive");
  const double e = power - alpha;
  const double end = std::min(r, q.support_end());
  if (q.kind() == ProfileKind::Constant) return q.value() * std::pow(r, e) / e;
  double far = 1.0;
  for (double s : q.knots()) far = std::max(far, s);
  far *= 100.0;
  if (end > far) {
    // outer piece in s = far / w
    auto g = [&](double w) { return std::pow(far / w, power - 1.0 - alpha) * q(far / w) * far / (w * w); };
    auto opt = default_options();
    opt.abs_tol = 1e-300;
    const double w_lo = std::isfinite(end) ? far / end : 0.0;
    return inner_moment(q, alpha, far, power) + integrate(g, w_lo, 1.0, opt).value;
  }
  const double w_end = std::pow(end / r, e);
  std::vector<double> inner;
  for (double s : q.knots())
    if (s < r) inner.push_back(std::pow(s / r, e));
  const auto pts = make_points(0.0, w_end, inner);
  auto f = [&](double w) { return q(r * std::pow(w, 1.0 / e)); };
  auto opt = default_options();
  opt.abs_tol = 1e-300;
  return std::pow(r, e) / e * integrate(f, std::span<const double>(pts), opt).value;
}

}  // namespace

double inner_second_moment(const RadialProfile& q, double alpha, double r) { return inner_moment(q, alpha, r, 2.0); }

double inner_fourth_moment(const RadialProfile& q, double alpha, double r) { return inner_moment(q, alpha, r, 4.0); }

QuadResult one_minus_cos(const RadialProfile& q, double alpha, double u, double lo, double hi) {
  u = std::abs(u);
  hi = std::min(hi, q.support_end());
  QuadResult out;
  if (u == 0.0 || !(lo < hi)) return out;
  const auto opt = default_options();

  // In v = u s the integral is u^alpha \int (1 - cos v) v^{-1-alpha} q(v/u) dv.
  // [0, 5 pi/2]: (1-cos v)/v^2 is smooth; v = A w^{1/(2-alpha)} absorbs v^{1-alpha}.
  // beyond: non-oscillatory part minus a cosine tail summed over half periods.
  const double v_split = 2.5 * kPi;
  const double a_lo = u * lo;
  const double a_hi = std::min(u * hi, v_split);
  double part_a = 0.0;
  if (a_lo < a_hi) {
    const double e = 2.0 - alpha;
    const double k = 1.0 / e;
    std::vector<double> inner;
    for (double s : q.knots()) inner.push_back(std::pow(u * s / a_hi, e));
    const auto pts = make_points(std::pow(a_lo / a_hi, e), 1.0, inner);
    auto f = [&](double w) {
      const double v = a_hi * std::pow(w, k);
      if (v == 0.0) return 0.5 * q(1e-300);
      const double sh = std::sin(0.5 * v);
      return 2.0 * sh * sh / (v * v) * q(v / u);
    };
    auto o = opt;
    o.abs_tol = 1e-300;
    const auto r = integrate(f, std::span<const double>(pts), o);
    part_a = std::pow(a_hi, e) / e * r.value;
    out.error += std::pow(a_hi, e) / e * r.error;
    out.evaluations += r.evaluations;
  }

  double part_b = 0.0;
  if (u * hi > v_split) {
    const double b0 = std::max(v_split, a_lo);
    const double b1 = u * hi;
    const double nonosc = std::pow(u, -alpha) * segment(q, alpha, b0 / u, hi);
    auto f = [&](double v) { return std::pow(v, -1.0 - alpha) * q(v / u); };
    const double scale = std::abs(part_a) + nonosc;
    const QuadResult osc = std::isfinite(b1) ? integrate_cos_range(f, b0, b1, scale, opt)
                                             : integrate_cos_tail(f, b0, scale, opt);
    part_b = nonosc - osc.value;
    out.error += osc.error;
    out.evaluations += osc.evaluations;
  }
  const double ua = std::pow(u, alpha);
  out.value = ua * (part_a + part_b);
  out.error *= ua;
  return out;
}

double cos_transform(const RadialProfile& q, double alpha, double u, double lo) {
  if (!(lo > 0.0)) throw DomainError("cos_transform: lower limit must be positive");
  return tail(q, alpha, lo) - one_minus_cos(q, alpha, u, lo).value;
}

}  // namespace tsd::radial
