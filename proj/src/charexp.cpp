#include "tsd/charexp.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "tsd/errors.hpp"
#include "tsd/quadrature.hpp"
#include "tsd/radial.hpp"

namespace tsd {

namespace {

constexpr double kPi = std::numbers::pi;

QuadOptions angular_options() {
  QuadOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-300;
  o.max_subdivisions = 1 << 12;
  return o;
}

// 2 \int_{-pi/2}^{pi/2} g(phi_xi + tau) f(cos tau) dtau, the angular integral over a pi-periodic g.
template <class F>
double angular(const SpectralMeasure& mu, double phi_xi, F&& f) {
  const double pts[] = {-0.5 * kPi, 0.0, 0.5 * kPi};
  auto integrand = [&](double tau) { return mu.density(phi_xi + tau) * f(std::cos(tau)); };
  return 2.0 * integrate(integrand, std::span<const double>(pts), angular_options()).value;
}

double relativistic_closed(const LevyModel& model, double norm_xi) {
  const auto& q = model.profile(0);
  const double m = q.rel_mass();
  const double a = model.alpha();
  // (|xi|^2 + m^{2/a})^{a/2} - m without cancellation at small |xi|
  const double r = norm_xi * norm_xi / std::pow(m, 2.0 / a);
  return m * std::expm1(0.5 * a * std::log1p(r));
}

bool has_closed_form(const LevyModel& model) { return model.is_relativistic() || model.is_pure_stable(); }

double closed_form(const LevyModel& model, const Point& xi) {
  const double nx = xi.norm();
  if (nx == 0.0) return 0.0;
  if (model.is_relativistic()) return relativistic_closed(model, nx);
  const double a = model.alpha();
  const double ca = stable_constant(a);
  const auto& mu = model.spectral();
  if (mu.kind() == SpectralKind::Atomic) {
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      total += mu.weights()[i] * model.profile(i).value() * std::pow(std::abs(xi.dot(mu.directions()[i])), a);
    return ca * total;
  }
  const double phi_xi = std::atan2(xi(1), xi(0));
  return ca * model.profile(0).value() * std::pow(nx, a) *
         angular(mu, phi_xi, [a](double c) { return std::pow(std::abs(c), a); });
}

double density_quadrature(const LevyModel& model, const Point& xi) {
  const double nx = xi.norm();
  if (nx == 0.0) return 0.0;
  const auto& q = model.profile(0);
  const double a = model.alpha();
  const double phi_xi = std::atan2(xi(1), xi(0));
  return angular(model.spectral(), phi_xi, [&](double c) { return psi(q, a, nx * std::abs(c)); });
}

}  // namespace

double stable_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable_constant: alpha must lie in (0,2)");
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  const double c = radial::one_minus_cos(RadialProfile::constant(1.0), alpha, 1.0).value;
  cache.emplace(alpha, c);
  return c;
}

double psi(const RadialProfile& q, double alpha, double u) {
  u = std::abs(u);
  if (u == 0.0) return 0.0;
  return radial::one_minus_cos(q, alpha, u).value;
}

ExponentEvaluation phi(const LevyModel& model, const Point& xi, PhiMethod method) {
  if (xi.size() != model.dimension()) throw DomainError("phi: dimension mismatch");
  ExponentEvaluation out;
  out.xi = xi;
  if (xi.norm() == 0.0) return out;
  if (method == PhiMethod::Auto && has_closed_form(model)) {
    out.value = closed_form(model, xi);
    out.closed_form = true;
    return out;
  }
  const auto& mu = model.spectral();
  const double a = model.alpha();
  if (mu.kind() == SpectralKind::Density) {
    out.value = density_quadrature(model, xi);
    out.error = 1e-9 * out.value;
    return out;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto r = radial::one_minus_cos(model.profile(i), a, xi.dot(mu.directions()[i]));
    out.value += mu.weights()[i] * r.value;
    out.error += mu.weights()[i] * r.error;
  }
  return out;
}

struct PhiEvaluator::RadialTable {
  double log_lo = 0.0;
  double log_hi = 0.0;
  double slope_lo = 2.0;
  double slope_hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;

  double operator()(double rho) const {
    const double x = std::log(rho);
    if (x < log_lo) return std::exp(f_lo + slope_lo * (x - log_lo));
    if (x > log_hi) return std::exp(f_hi + slope_hi * (x - log_hi));
    return std::exp(spline(x));
  }
};

PhiEvaluator::PhiEvaluator(const LevyModel& model, PhiMethod method) : model_(&model), method_(method) {
  const auto& mu = model.spectral();
  if (mu.kind() == SpectralKind::Atomic) {
    mirror_of_.assign(mu.size(), -1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mirror_of_[i] != -1) continue;
      for (std::size_t j = i + 1; j < mu.size(); ++j) {
        if (mirror_of_[j] != -1) continue;
        if ((mu.directions()[i] + mu.directions()[j]).norm() < 1e-14 && mu.weights()[i] == mu.weights()[j] &&
            &model.profile(i) == &model.profile(j)) {
          mirror_of_[j] = static_cast<int>(i);
          break;
        }
      }
    }
  }
  const bool closed = method != PhiMethod::Quadrature && has_closed_form(model);
  if (closed) return;
  if (mu.kind() == SpectralKind::Atomic && !(method == PhiMethod::Tabulated && model.dimension() == 1)) return;
  if (mu.kind() == SpectralKind::Density && !mu.is_uniform()) return;
  // Phi depends on |xi| only; tabulate log Phi against log |xi|
  const bool planar = model.dimension() == 2;
  const double lo = (planar ? -3.0 : -5.0) * std::numbers::ln10;
  const double hi = (planar ? 4.0 : 7.0) * std::numbers::ln10;
  constexpr int per_decade = 32;
  const int n = static_cast<int>(std::lround((hi - lo) / std::numbers::ln10)) * per_decade + 1;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> y(n);
  Point xi = Point::Zero(model.dimension());
  for (int i = 0; i < n; ++i) {
    xi(0) = std::exp(lo + i * h);
    y[i] = std::log(planar ? density_quadrature(model, xi) : phi(model, xi, PhiMethod::Quadrature).value);
  }
  table_ = std::make_unique<RadialTable>(RadialTable{
      lo, hi, (y[1] - y[0]) / h, (y[n - 1] - y[n - 2]) / h, y[0], y[n - 1],
      boost::math::interpolators::cardinal_cubic_b_spline<double>(y.begin(), y.end(), lo, h)});
}

PhiEvaluator::~PhiEvaluator() = default;
PhiEvaluator::PhiEvaluator(PhiEvaluator&&) noexcept = default;

double PhiEvaluator::operator()(const Point& xi) const {
  const auto& model = *model_;
  const double nx = xi.norm();
  if (nx == 0.0) return 0.0;
  if (method_ != PhiMethod::Quadrature && has_closed_form(model)) return closed_form(model, xi);
  if (table_) return (*table_)(nx);
  const auto& mu = model.spectral();
  if (mu.kind() == SpectralKind::Density) return density_quadrature(model, xi);
  std::vector<double> psis(mu.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const int j = mirror_of_[i];
    psis[i] = j >= 0 ? psis[j] : psi(model.profile(i), model.alpha(), xi.dot(mu.directions()[i]));
    total += mu.weights()[i] * psis[i];
  }
  return total;
}

double PhiEvaluator::operator()(double xi) const {
  Point p(1);
  p << xi;
  return (*this)(p);
}

std::vector<Point> xi_grid(int d, double r_lo, double r_hi, int n_radii, int n_directions) {
  if (!(r_lo > 0.0) || !(r_hi >= r_lo) || n_radii < 1) throw DomainError("xi_grid: bad radius range");
  std::vector<Point> out;
  std::vector<Point> dirs;
  if (d == 1) {
    Point e(1);
    e << 1.0;
    dirs.push_back(e);
  } else if (d == 2) {
    for (int k = 0; k < n_directions; ++k) dirs.push_back(unit2(kPi * k / n_directions));
  } else {
    throw UnsupportedError("xi_grid: d must be 1 or 2");
  }
  for (int i = 0; i < n_radii; ++i) {
    const double r = n_radii == 1 ? r_lo : r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n_radii - 1));
    for (const auto& e : dirs) out.push_back(r * e);
  }
  return out;
}

double check_lower_growth(const LevyModel& model, double exponent, std::span<const Point> xis) {
  if (model.degenerate()) throw DegeneracyError("check_lower_growth: spectral measure is degenerate");
  PhiEvaluator phi_eval(model);
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& xi : xis) {
    const double n = xi.norm();
    if (n == 0.0) continue;
    inf = std::min(inf, phi_eval(xi) / std::pow(n, exponent));
  }
  return inf;
}

TwoSidedRatio check_two_sided(const LevyModel& model, std::span<const Point> xis) {
  if (!model.finite_second_moment()) throw PreconditionError("check_two_sided: nu has infinite second moment");
  if (model.degenerate()) throw DegeneracyError("check_two_sided: spectral measure is degenerate");
  // directional second moment inf_{eta, s < 1} \int <eta,theta>^2 Q(theta, s) mu(dtheta) > 0
  const auto& mu = model.spectral();
  const int d = model.dimension();
  const int n_eta = d == 1 ? 1 : 180;
  for (int k = 0; k < n_eta; ++k) {
    Point eta = d == 1 ? Point::Ones(1) : unit2(kPi * k / n_eta);
    for (int j = 0; j <= 8; ++j) {
      const double s = std::pow(10.0, -4.0 + 0.5 * j);
      double v = 0.0;
      if (mu.kind() == SpectralKind::Atomic) {
        for (std::size_t i = 0; i < mu.size(); ++i) {
          const double c = eta.dot(mu.directions()[i]);
          v += mu.weights()[i] * c * c * model.profile(i)(s);
        }
      } else {
        const double phi_eta = std::atan2(eta(1), eta(0));
        v = model.profile(0)(s) * angular(mu, phi_eta, [](double c) { return c * c; });
      }
      if (!(v > 0.0)) throw DegeneracyError("check_two_sided: directional second moment vanishes");
    }
  }
  PhiEvaluator phi_eval(model);
  TwoSidedRatio out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& xi : xis) {
    const double n = xi.norm();
    if (n == 0.0) continue;
    const double ratio = phi_eval(xi) / std::min(n * n, std::pow(n, model.alpha()));
    out.inf_ratio = std::min(out.inf_ratio, ratio);
    out.sup_ratio = std::max(out.sup_ratio, ratio);
  }
  return out;
}

}  // namespace tsd
