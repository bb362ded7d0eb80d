#include "tsd/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsd/errors.hpp"

namespace tsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

RadialProfile RadialProfile::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("constant profile needs a positive finite value");
  RadialProfile p;
  p.kind_ = ProfileKind::Constant;
  p.name_ = "constant";
  p.p0_ = value;
  p.finish();
  return p;
}

RadialProfile RadialProfile::poly_tempered(double m) {
  if (!(m >= 0.0)) throw DomainError("polynomial tempering exponent must be >= 0");
  RadialProfile p;
  p.kind_ = ProfileKind::PolyTempered;
  p.name_ = "poly";
  p.p0_ = m;
  p.finish();
  return p;
}

RadialProfile RadialProfile::exp_tempered(double a, double c1, double c2) {
  if (!(a >= 0.0) || !(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("exponential tempering needs a >= 0, c1 > 0, c2 > 0");
  if (c1 < c2) throw DomainError("exponential tempering needs c1 >= c2 (c1 is the lower-bound rate)");
  RadialProfile p;
  p.kind_ = ProfileKind::ExpTempered;
  p.name_ = "exp";
  p.p0_ = a;
  p.p1_ = c1;
  p.p2_ = c2;
  p.finish();
  return p;
}

RadialProfile RadialProfile::truncated(double s0) {
  if (!(s0 > 0.0)) throw DomainError("truncation radius must be positive");
  RadialProfile p;
  p.kind_ = ProfileKind::Truncated;
  p.name_ = "truncated";
  p.p0_ = s0;
  p.finish();
  return p;
}

RadialProfile RadialProfile::relativistic(int d, double alpha, double mass) {
  if (d < 1 || !(alpha > 0.0 && alpha < 2.0)) throw DomainError("relativistic profile needs d >= 1, alpha in (0,2)");
  if (!(mass > 0.0)) throw DomainError("relativistic mass must be positive");
  RadialProfile p;
  p.kind_ = ProfileKind::Relativistic;
  p.name_ = "relativistic";
  p.p0_ = alpha;
  p.p1_ = mass;
  p.p2_ = std::pow(mass, 1.0 / alpha);
  p.rel_d_ = d;
  p.finish();
  return p;
}

RadialProfile RadialProfile::custom(std::function<double(double)> q, std::string name, bool doubling, double beta_hint,
                                    double scale) {
  if (!q) throw DomainError("custom profile needs a callable");
  RadialProfile p;
  p.kind_ = ProfileKind::Custom;
  p.name_ = std::move(name);
  p.fn_ = std::make_shared<const std::function<double(double)>>(std::move(q));
  p.custom_doubling_ = doubling;
  p.beta_hint_ = beta_hint;
  p.scale_ = scale > 0.0 ? scale : 1.0;
  p.finish();
  return p;
}

void RadialProfile::finish() {
  if (declares_doubling()) doubling_ = doubling_constant(*this, 1e-3, 1e3);
}

double RadialProfile::operator()(double s) const {
  if (!std::isfinite(s)) return kind_ == ProfileKind::Constant ? p0_ : 0.0;
  switch (kind_) {
    case ProfileKind::Constant:
      return p0_;
    case ProfileKind::PolyTempered:
      return std::pow(1.0 + s, -p0_);
    case ProfileKind::ExpTempered:
      return std::exp(p0_ * std::log1p(s) - p2_ * s);
    case ProfileKind::Truncated:
      return s <= p0_ ? 1.0 : 0.0;
    case ProfileKind::Relativistic:
      return relativistic_kernel(rel_d_, p0_, p2_ * s);
    case ProfileKind::Custom:
      return (*fn_)(s);
  }
  return 0.0;
}

TailClass RadialProfile::tail_class() const noexcept {
  switch (kind_) {
    case ProfileKind::Constant:
      return TailClass::Heavy;
    case ProfileKind::PolyTempered:
      return p0_ > 0.0 ? TailClass::Polynomial : TailClass::Heavy;
    case ProfileKind::ExpTempered:
    case ProfileKind::Relativistic:
      return TailClass::Exponential;
    case ProfileKind::Truncated:
      return TailClass::Compact;
    case ProfileKind::Custom:
      return beta_hint_ >= 2.0 ? TailClass::Exponential : TailClass::Polynomial;
  }
  return TailClass::Heavy;
}

bool RadialProfile::declares_doubling() const noexcept {
  switch (kind_) {
    case ProfileKind::Constant:
    case ProfileKind::PolyTempered:
      return true;
    case ProfileKind::Custom:
      return custom_doubling_;
    default:
      return false;
  }
}

double RadialProfile::support_end() const noexcept { return kind_ == ProfileKind::Truncated ? p0_ : kInf; }

double RadialProfile::value_at_zero() const {
  switch (kind_) {
    case ProfileKind::Constant:
      return p0_;
    case ProfileKind::Relativistic: {
      const double nu = 0.5 * (rel_d_ + p0_);
      return std::pow(4.0, nu) * std::tgamma(nu);
    }
    case ProfileKind::Custom:
      return (*fn_)(1e-12);
    default:
      return 1.0;
  }
}

std::vector<double> RadialProfile::knots() const {
  switch (kind_) {
    case ProfileKind::Constant:
      return {};
    case ProfileKind::PolyTempered:
      return {1.0};
    case ProfileKind::Relativistic:
      return {1.0 / p2_, 10.0 / p2_, 40.0 / p2_};
    case ProfileKind::ExpTempered: {
      std::vector<double> k{1.0, 1.0 / p2_, 10.0 / p2_, 40.0 / p2_};
      std::sort(k.begin(), k.end());
      k.erase(std::unique(k.begin(), k.end()), k.end());
      return k;
    }
    case ProfileKind::Truncated:
      return {p0_};
    case ProfileKind::Custom:
      return {scale_};
  }
  return {};
}

bool RadialProfile::finite_second_moment(double alpha) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return false;
    case ProfileKind::PolyTempered:
      return p0_ > 2.0 - alpha;
    case ProfileKind::Custom:
      return beta_hint_ >= 2.0;
    default:
      return true;
  }
}

double profile_eval(const RadialProfile& q, double s) {
  if (!(s > 0.0)) throw DomainError("profile_eval: s must be positive");
  return q(s);
}

DoublingInfo doubling_constant(const RadialProfile& q, double s_min, double s_max) {
  if (!(s_min > 0.0) || !(s_max > s_min)) throw DomainError("doubling_constant: need 0 < s_min < s_max");
  if (q.support_end() < 2.0 * s_max) throw UnsupportedError("doubling_constant: profile vanishes in range");
  const int per_decade = 64;
  const int n = std::max(2, static_cast<int>(std::ceil(per_decade * std::log10(s_max / s_min)))) + 1;
  double K = 1.0;
  for (int i = 0; i < n; ++i) {
    const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) / (n - 1));
    const double hi = q(s);
    const double lo = q(2.0 * s);
    if (!(lo > 0.0)) throw UnsupportedError("doubling_constant: profile vanishes in range");
    K = std::max(K, hi / lo);
  }
  return {K, std::log2(K)};
}

double profile_beta(const RadialProfile& q, double alpha) {
  switch (q.kind()) {
    case ProfileKind::ExpTempered:
    case ProfileKind::Truncated:
    case ProfileKind::Relativistic:
      return 2.0;
    case ProfileKind::PolyTempered:
      return std::clamp(alpha + q.m() - 1e-9, alpha, 2.0);
    case ProfileKind::Constant:
      return alpha;
    case ProfileKind::Custom:
      break;
  }
  return q.tail_class() == TailClass::Exponential ? 2.0 : alpha;
}

double relativistic_kernel(int d, double alpha, double s) {
  if (!(s > 0.0)) throw DomainError("relativistic_kernel: s must be positive");
  // Substituting u = (s/2) e^w turns the integral into
  //   K = 2^nu s^nu e^{-s} \int exp(-s (cosh w - 1) - nu w) dw,   nu = (d+alpha)/2,
  // whose integrand is smooth, log-concave and decays doubly exponentially, so the
  // trapezoidal rule converges geometrically.
  const double nu = 0.5 * (d + alpha);
  auto g = [&](double w) {
    const double sh = std::sinh(0.5 * w);
    return -2.0 * s * sh * sh - nu * w;
  };
  const double w_star = -std::asinh(nu / s);
  const double g_star = g(w_star);
  constexpr double drop = 46.0;
  double step = 0.5;
  double lo = w_star - step;
  while (g(lo) - g_star > -drop) {
    step *= 2.0;
    lo = w_star - step;
  }
  step = 0.5;
  double hi = w_star + step;
  while (g(hi) - g_star > -drop) {
    step *= 2.0;
    hi = w_star + step;
  }
  auto f = [&](double w) { return std::exp(g(w) - g_star); };
  int n = 32;
  double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) sum += f(lo + i * h);
  double T = h * sum;
  for (int level = 0; level < 14; ++level) {
    double mid = 0.0;
    for (int i = 0; i < n; ++i) mid += f(lo + (i + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double T_new = h * sum;
    const bool done = std::abs(T_new - T) <= 1e-14 * T_new && level >= 1;
    T = T_new;
    if (done) {
      return std::exp(nu * std::log(2.0 * s) - s + g_star) * T;
    }
  }
  throw NumericError("relativistic_kernel: trapezoidal rule did not converge",
                     std::exp(nu * std::log(2.0 * s) - s + g_star) * T);
}

}  // namespace tsd
