#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tsd/charexp.hpp"
#include "tsd/errors.hpp"

using namespace tsd;

namespace {

constexpr double kPi = std::numbers::pi;

Point p1(double x) {
  Point p(1);
  p << x;
  return p;
}

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

// \int_0^\infty (1 - cos(u s)) s^{-1-alpha} q(s) ds for fast-decaying q, period by period
template <class Q>
double psi_oracle(Q q, double alpha, double u, double s_max) {
  const double period = 2.0 * kPi / u;
  double total = 0.0;
  auto f = [&](double s) { return (1.0 - std::cos(u * s)) * std::pow(s, -1.0 - alpha) * q(s); };
  for (double lo = 0.0; lo < s_max; lo += period)
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, lo + period, 8, 1e-14);
  return total;
}

}  // namespace

TEST_CASE("stable constant against the Gamma identity") {
  for (double a : {0.3, 0.5, 1.0, 1.5, 1.9}) {
    const double oracle = a == 1.0 ? 0.5 * kPi : std::tgamma(1.0 - a) * std::cos(0.5 * kPi * a) / a;
    CHECK(stable_constant(a) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("Cauchy exponent") {
  auto m = LevyModel::one_dimensional(1.0, RadialProfile::constant());
  CHECK(phi(m, p1(0.0)).value == 0.0);
  CHECK(phi(m, p1(3.0), PhiMethod::Quadrature).value == doctest::Approx(3.0 * kPi).epsilon(1e-10));
  for (double xi = 0.01; xi <= 50.0; xi *= 1.37) {
    const double q = phi(m, p1(xi), PhiMethod::Quadrature).value;
    CHECK(std::abs(q - kPi * xi) <= 1e-8 * kPi * xi);
    CHECK(phi(m, p1(-xi)).value == phi(m, p1(xi)).value);
  }
}

TEST_CASE("relativistic exponent, closed form against quadrature") {
  auto m = LevyModel::relativistic(1, 1.0);
  const auto e = phi(m, p1(2.0));
  CHECK(e.closed_form);
  CHECK(e.value == doctest::Approx(std::sqrt(5.0) - 1.0).epsilon(1e-14));
  for (double a : {0.5, 1.0, 1.5}) {
    auto r = LevyModel::relativistic(1, a);
    for (double xi : {1e-3, 0.1, 1.0, 7.0, 50.0}) {
      const double closed = std::pow(xi * xi + 1.0, 0.5 * a) - 1.0;
      const double quad = phi(r, p1(xi), PhiMethod::Quadrature).value;
      CHECK(std::abs(quad - closed) <= 1e-6 * (1.0 + closed));
    }
  }
  auto r2 = LevyModel::relativistic(2, 1.5);
  for (const Point& xi : {p2(0.3, 0.1), p2(-2.0, 5.0), p2(30.0, 0.0)}) {
    const double closed = std::pow(xi.squaredNorm() + 1.0, 0.75) - 1.0;
    const double quad = phi(r2, xi, PhiMethod::Quadrature).value;
    CHECK(std::abs(quad - closed) <= 1e-6 * (1.0 + closed));
  }
}

TEST_CASE("relativistic mass") {
  auto m = LevyModel::relativistic(1, 1.0, 4.0);
  // (xi^2 + m^2)^{1/2} - m
  CHECK(phi(m, p1(3.0)).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(phi(m, p1(3.0), PhiMethod::Quadrature).value - 1.0) < 1e-7);
}

TEST_CASE("tempered exponent against a period-by-period oracle") {
  auto m = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0), 0.5);
  for (double u : {0.05, 1.0, 5.0, 40.0}) {
    const double oracle = psi_oracle([](double s) { return std::pow(1.0 + s, -3.0); }, 1.0, u, 300.0);
    CHECK(phi(m, p1(u)).value == doctest::Approx(oracle).epsilon(1e-8));
  }
  auto e = LevyModel::one_dimensional(0.7, RadialProfile::exp_tempered(1.0, 2.0, 2.0));
  for (double u : {0.1, 3.0, 200.0}) {
    const double oracle =
        2.0 * psi_oracle([](double s) { return (1.0 + s) * std::exp(-2.0 * s); }, 0.7, u, 40.0);
    CHECK(phi(e, p1(u)).value == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("scaling, symmetry and the doubling inequality") {
  auto stable = LevyModel(1.3, SpectralMeasure::symmetric_atoms({p2(1.0, 0.0), p2(0.6, 0.8)}, {1.0, 0.5}),
                          RadialProfile::constant());
  const Point xi = p2(0.7, -1.1);
  const double base = phi(stable, xi, PhiMethod::Quadrature).value;
  for (double lam : {2.0, 4.0, 8.0}) {
    const double scaled = phi(stable, lam * xi, PhiMethod::Quadrature).value;
    CHECK(scaled == doctest::Approx(std::pow(lam, 1.3) * base).epsilon(1e-8));
  }
  auto poly = LevyModel(0.9, SpectralMeasure::symmetric_atoms({p2(1.0, 0.0), p2(0.0, 1.0)}, {1.0, 2.0}),
                        RadialProfile::poly_tempered(2.0));
  PhiEvaluator ev(poly);
  for (const auto& x : xi_grid(2, 0.01, 100.0, 9, 12)) {
    const double v = ev(x);
    CHECK(v > 0.0);
    CHECK(ev(Point(2.0 * x)) <= 4.0 * v * (1.0 + 1e-9));
    CHECK(ev(Point(-x)) == v);
  }
}

TEST_CASE("isotropic table agrees with direct angular quadrature") {
  auto m = LevyModel(1.1, SpectralMeasure::uniform_circle(2.0), RadialProfile::exp_tempered(0.0, 1.0, 1.0));
  PhiEvaluator ev(m);
  for (double r : {2e-4, 0.013, 0.9, 17.0, 3e3}) {
    const Point xi = r * unit2(0.4);
    CHECK(ev(xi) == doctest::Approx(phi(m, xi).value).epsilon(1e-7));
  }
}

TEST_CASE("one-dimensional table agrees with quadrature") {
  for (auto q : {RadialProfile::poly_tempered(3.0), RadialProfile::exp_tempered(0.5, 2.0, 2.0)}) {
    auto m = LevyModel::one_dimensional(0.7, q, 0.8);
    PhiEvaluator ev(m, PhiMethod::Tabulated);
    for (double r : {3e-5, 1.7e-3, 0.21, 1.0, 5.5, 333.0, 2.2e4, 4e6}) {
      CHECK(ev(r) == doctest::Approx(phi(m, Point::Constant(1, r)).value).epsilon(1e-7));
      CHECK(ev(-r) == ev(r));
    }
  }
  // closed forms stay exact
  auto cauchy = LevyModel::one_dimensional(1.0, RadialProfile::constant());
  CHECK(PhiEvaluator(cauchy, PhiMethod::Tabulated)(2.5) == doctest::Approx(2.5 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("lower growth") {
  auto rel = LevyModel::relativistic(1, 1.0);
  auto grid = xi_grid(1, 1.0, 100.0, 60);
  const double inf = check_lower_growth(rel, 1.0, grid);
  CHECK(inf >= 0.41);
  CHECK(inf == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));

  auto stable = LevyModel::one_dimensional(0.8, RadialProfile::constant());
  auto g = xi_grid(1, 0.1, 10.0, 5);
  CHECK(check_lower_growth(stable, 0.8, g) == doctest::Approx(2.0 * stable_constant(0.8)).epsilon(1e-12));

  auto expt = LevyModel::one_dimensional(1.0, RadialProfile::exp_tempered(0.0, 1.0, 1.0));
  CHECK(check_lower_growth(expt, 2.0, xi_grid(1, 1e-3, 1.0, 20)) > 0.0);

  auto line = LevyModel(1.0, SpectralMeasure::symmetric_atoms({p2(1.0, 0.0)}, {1.0}), RadialProfile::constant());
  CHECK_THROWS_AS(check_lower_growth(line, 1.0, xi_grid(2, 1.0, 2.0, 2)), DegeneracyError);
}

TEST_CASE("small-frequency Taylor limit") {
  const double a = 1.0;
  auto expt = LevyModel::one_dimensional(a, RadialProfile::exp_tempered(0.0, 1.0, 1.0));
  // sigma^2 = 2 \int_0^\infty s^{1-a} e^{-s} ds = 2 Gamma(2-a)
  const double sigma2 = 2.0 * std::tgamma(2.0 - a);
  const double xi = 1e-3;
  CHECK(phi(expt, p1(xi)).value / (xi * xi) == doctest::Approx(0.5 * sigma2).epsilon(1e-5));
}

TEST_CASE("two-sided comparison") {
  auto poly = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0));
  const auto r = check_two_sided(poly, xi_grid(1, 1e-2, 1e2, 41));
  CHECK(r.inf_ratio > 0.0);
  CHECK(std::isfinite(r.sup_ratio));
  CHECK(r.sup_ratio / r.inf_ratio < 20.0);
  CHECK_THROWS_AS(check_two_sided(LevyModel::one_dimensional(1.0, RadialProfile::constant()), xi_grid(1, 1.0, 2.0, 2)),
                  PreconditionError);
}
