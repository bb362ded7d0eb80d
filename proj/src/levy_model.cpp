#include "tsd/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tsd/errors.hpp"
#include "tsd/quadrature.hpp"
#include "tsd/radial.hpp"

namespace tsd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_profile_monotone(const RadialProfile& q) {
  double prev = q(1e-4);
  if (!(prev > 0.0) || !std::isfinite(prev)) throw DomainError("profile must be positive and finite near 0");
  for (int i = 1; i <= 96; ++i) {
    const double s = 1e-4 * std::pow(10.0, i / 12.0);
    const double cur = q(s);
    if (cur > prev * (1.0 + 1e-12)) throw DomainError("profile '" + q.name() + "' is not nonincreasing");
    prev = cur;
  }
}

// Radial interval {s > 0 : |s theta - x| < r} as (s1, s2); empty when s2 <= s1.
std::pair<double, double> chord(const Point& x, const Point& theta, double r) {
  const double b = x.dot(theta);
  const double c = x.squaredNorm() - r * r;
  const double disc = b * b - c;
  if (disc <= 0.0) return {0.0, 0.0};
  const double root = std::sqrt(disc);
  const double s2 = b + root;
  if (s2 <= 0.0) return {0.0, 0.0};
  const double s1 = c / s2;  // = b - root without cancellation
  return {s1, s2};
}

}  // namespace

LevyModel::LevyModel(double alpha, SpectralMeasure spectral, std::vector<RadialProfile> profiles, std::string id)
    : alpha_(alpha), spectral_(std::move(spectral)), profiles_(std::move(profiles)), id_(std::move(id)) {
  if (!(alpha_ > 0.0 && alpha_ < 2.0)) throw DomainError("alpha must lie in (0,2)");
  if (!spectral_.symmetric()) throw DomainError("spectral measure must be symmetric");
  if (profiles_.empty()) throw DomainError("model needs at least one profile");
  if (profiles_.size() != 1) {
    if (spectral_.kind() != SpectralKind::Atomic)
      throw DomainError("per-direction profiles are supported for atomic spectral measures only");
    if (profiles_.size() != spectral_.size()) throw DomainError("one profile per atom required");
  }
  beta_ = 2.0;
  for (const auto& q : profiles_) {
    check_profile_monotone(q);
    beta_ = std::min(beta_, profile_beta(q, alpha_));
  }
  // Levy-measure integrability: both must be finite
  const double m2 = truncated_second_moment(*this, 1.0);
  const double tl = nu_tail(*this, 1.0);
  if (!std::isfinite(m2) || !std::isfinite(tl)) throw NumericError("Levy measure is not integrable", m2 + tl);
}

LevyModel::LevyModel(double alpha, SpectralMeasure spectral, RadialProfile profile, std::string id)
    : LevyModel(alpha, std::move(spectral), std::vector<RadialProfile>{std::move(profile)}, std::move(id)) {}

double relativistic_constant(int d, double alpha) {
  return 0.5 * alpha / (std::tgamma(1.0 - 0.5 * alpha) * std::pow(4.0 * kPi, 0.5 * d));
}

LevyModel LevyModel::relativistic(int d, double alpha, double mass) {
  const double c = relativistic_constant(d, alpha);
  auto q = RadialProfile::relativistic(d, alpha, mass);
  if (d == 1) {
    Point e(1);
    e << 1.0;
    LevyModel m(alpha, SpectralMeasure::symmetric_atoms({e}, {c}), q, "relativistic");
    m.relativistic_ = true;
    return m;
  }
  if (d == 2) {
    LevyModel m(alpha, SpectralMeasure::uniform_circle(2.0 * kPi * c), q, "relativistic");
    m.relativistic_ = true;
    return m;
  }
  throw UnsupportedError("relativistic model: only d = 1, 2 are representable");
}

LevyModel LevyModel::one_dimensional(double alpha, RadialProfile profile, double w, std::string id) {
  Point e(1);
  e << 1.0;
  return LevyModel(alpha, SpectralMeasure::symmetric_atoms({e}, {w}), std::move(profile), std::move(id));
}

bool LevyModel::is_pure_stable() const noexcept {
  return std::all_of(profiles_.begin(), profiles_.end(),
                     [](const RadialProfile& q) { return q.kind() == ProfileKind::Constant; });
}

bool LevyModel::finite_second_moment() const noexcept {
  return std::all_of(profiles_.begin(), profiles_.end(),
                     [&](const RadialProfile& q) { return q.finite_second_moment(alpha_); });
}

namespace {

template <class RadialFn>
double sum_over_spectral(const LevyModel& model, RadialFn&& radial_fn) {
  const auto& mu = model.spectral();
  if (mu.kind() == SpectralKind::Density || model.shared_profile()) return mu.total_mass() * radial_fn(model.profile(0));
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) total += mu.weights()[i] * radial_fn(model.profile(i));
  return total;
}

}  // namespace

double nu_tail(const LevyModel& model, double r) {
  if (!(r > 0.0)) throw DomainError("nu_tail: r must be positive");
  return sum_over_spectral(model, [&](const RadialProfile& q) { return radial::tail(q, model.alpha(), r); });
}

double truncated_second_moment(const LevyModel& model, double r) {
  if (!(r > 0.0)) throw DomainError("truncated_second_moment: r must be positive");
  return sum_over_spectral(model,
                           [&](const RadialProfile& q) { return radial::inner_second_moment(q, model.alpha(), r); });
}

double truncated_fourth_moment(const LevyModel& model, double r) {
  if (!(r > 0.0)) throw DomainError("truncated_fourth_moment: r must be positive");
  return sum_over_spectral(model,
                           [&](const RadialProfile& q) { return radial::inner_fourth_moment(q, model.alpha(), r); });
}

double nu_ball(const LevyModel& model, const Point& x, double r, double min_radius) {
  if (!(r > 0.0)) throw DomainError("nu_ball: r must be positive");
  if (x.size() != model.dimension()) throw DomainError("nu_ball: dimension mismatch");
  const double norm_x = x.norm();
  if (norm_x <= r && min_radius <= 0.0) return kInf;
  const double alpha = model.alpha();
  const auto& mu = model.spectral();

  if (mu.kind() == SpectralKind::Atomic) {
    std::vector<double> parts;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      auto [s1, s2] = chord(x, mu.directions()[i], r);
      s1 = std::max(s1, min_radius);
      if (s2 <= s1) continue;
      parts.push_back(mu.weights()[i] * radial::segment(model.profile(i), alpha, s1, s2));
    }
    // summation order independent of atom ordering: nu_ball(x) == nu_ball(-x) bit for bit
    std::sort(parts.begin(), parts.end());
    double total = 0.0;
    for (double p : parts) total += p;
    return total;
  }

  if (norm_x <= r) throw UnsupportedError("nu_ball: ball around the origin with a spectral density");
  // Density (d = 2): angular integral of the radial chord integral. g is pi-periodic, so
  // the angle of x is reduced mod pi.
  double phi_x = std::atan2(x(1), x(0));
  if (phi_x < 0.0) phi_x += kPi;
  const Point xr = norm_x * unit2(phi_x);
  const double half = std::asin(r / norm_x);
  const auto& q = model.profile(0);
  auto integrand = [&](double tau) {
    const double phi = phi_x + half * std::sin(tau);
    auto [s1, s2] = chord(xr, unit2(phi), r);
    s1 = std::max(s1, min_radius);
    if (s2 <= s1) return 0.0;
    return mu.density(phi) * radial::segment(q, alpha, s1, s2) * half * std::cos(tau);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-8;
  opt.abs_tol = 1e-300;
  return integrate(integrand, -0.5 * kPi, 0.5 * kPi, opt).value;
}

}  // namespace tsd
