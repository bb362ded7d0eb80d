#include <limits>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tsd/errors.hpp"
#include "tsd/levy_model.hpp"

using namespace tsd;
using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

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

}  // namespace

TEST_CASE("tail mass") {
  auto cauchy = LevyModel::one_dimensional(1.0, RadialProfile::constant());
  CHECK(nu_tail(cauchy, 2.0) == doctest::Approx(1.0).epsilon(1e-14));

  auto poly = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0));
  exp_sinh<double> es;
  for (double r : {0.01, 0.5, 3.0}) {
    const double oracle = 2.0 * es.integrate([&](double u) { const double s = u + r; return std::pow(s, -2.0) * std::pow(1.0 + s, -3.0); });
    CHECK(nu_tail(poly, r) == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK_THROWS_AS(nu_tail(poly, 0.0), DomainError);
}

TEST_CASE("truncated moments") {
  const double alpha = 1.3;
  auto m = LevyModel::one_dimensional(alpha, RadialProfile::exp_tempered(0.5, 1.0, 1.0), 0.7);
  tanh_sinh<double> ts;
  for (double r : {0.1, 1.0, 10.0}) {
    auto f2 = [&](double s) { return std::pow(s, 1.0 - alpha) * std::pow(1.0 + s, 0.5) * std::exp(-s); };
    auto f4 = [&](double s) { return std::pow(s, 3.0 - alpha) * std::pow(1.0 + s, 0.5) * std::exp(-s); };
    CHECK(truncated_second_moment(m, r) == doctest::Approx(1.4 * ts.integrate(f2, 0.0, r)).epsilon(1e-9));
    CHECK(truncated_fourth_moment(m, r) == doctest::Approx(1.4 * ts.integrate(f4, 0.0, r)).epsilon(1e-9));
  }
  // 2 \int_0^r s^{1-alpha} (1+s)^{-3} ds = 1 - (1+r)^{-2}
  auto poly = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0));
  for (double r : {1e3, 1e300, std::numeric_limits<double>::infinity()})
    CHECK(truncated_second_moment(poly, r) == doctest::Approx(1.0 - 1.0 / ((1.0 + r) * (1.0 + r))).epsilon(1e-9));
}

TEST_CASE("ball mass in one dimension") {
  auto cauchy = LevyModel::one_dimensional(1.0, RadialProfile::constant());
  CHECK(nu_ball(cauchy, p1(3.0), 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(nu_ball(cauchy, p1(-3.0), 1.0) == nu_ball(cauchy, p1(3.0), 1.0));
  CHECK(std::isinf(nu_ball(cauchy, p1(0.5), 1.0)));
  // restricted to |y| >= 1: B(0.5, 1) meets only (1, 1.5)
  CHECK(nu_ball(cauchy, p1(0.5), 1.0, 1.0) == doctest::Approx(1.0 - 1.0 / 1.5).epsilon(1e-13));

  auto poly = LevyModel::one_dimensional(0.8, RadialProfile::poly_tempered(2.0));
  gauss_kronrod<double, 61> gk;
  auto f = [](double s) { return std::pow(s, -1.8) * std::pow(1.0 + s, -2.0); };
  CHECK(nu_ball(poly, p1(-2.0), 0.5) == doctest::Approx(gk.integrate(f, 1.5, 2.5, 15, 1e-13)).epsilon(1e-9));
}

TEST_CASE("ball mass with a spectral density in the plane") {
  const double alpha = 1.2;
  const double c = 0.3;
  auto model = LevyModel(alpha, SpectralMeasure::uniform_circle(2.0 * std::numbers::pi * c), RadialProfile::poly_tempered(1.0));
  const Point x = p2(1.0, 1.5);
  const double r = 0.6;
  // brute force over the disk in Cartesian coordinates; Levy density c |y|^{-2-alpha} (1+|y|)^{-1}
  auto inner = [&](double u) {
    const double h = std::sqrt(std::max(0.0, r * r - u * u));
    auto g = [&](double v) {
      const double n = std::hypot(x(0) + u, x(1) + v);
      return c * std::pow(n, -2.0 - alpha) / (1.0 + n);
    };
    return gauss_kronrod<double, 61>::integrate(g, -h, h, 10, 1e-12);
  };
  const double oracle = tanh_sinh<double>().integrate(inner, -r, r, 1e-11);
  CHECK(nu_ball(model, x, r) == doctest::Approx(oracle).epsilon(1e-7));
  CHECK(nu_ball(model, -x, r) == doctest::Approx(nu_ball(model, x, r)).epsilon(1e-12));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(LevyModel::one_dimensional(2.0, RadialProfile::constant()), DomainError);
  CHECK_THROWS_AS(LevyModel::one_dimensional(0.0, RadialProfile::constant()), DomainError);
  auto rising = RadialProfile::custom([](double s) { return 1.0 + s; }, "rising", false);
  CHECK_THROWS_AS(LevyModel::one_dimensional(1.0, rising), DomainError);
  CHECK_THROWS_AS(LevyModel(1.0, SpectralMeasure::atoms({p1(1.0)}, {1.0}), RadialProfile::constant()), DomainError);
}

TEST_CASE("degeneracy and gamma") {
  auto line = LevyModel(1.0, SpectralMeasure::symmetric_atoms({p2(1.0, 0.0)}, {1.0}), RadialProfile::constant());
  CHECK(line.degenerate());
  auto cross = LevyModel(1.0, SpectralMeasure::symmetric_atoms({p2(1.0, 0.0), p2(0.0, 1.0)}, {1.0, 1.0}),
                         RadialProfile::constant());
  CHECK_FALSE(cross.degenerate());
  const double rs[] = {0.01, 0.02, 0.05, 0.1, 0.2};
  CHECK(gamma_estimate(cross.spectral(), rs).gamma == doctest::Approx(1.0));
  auto rel = LevyModel::relativistic(2, 1.0);
  CHECK(gamma_estimate(rel.spectral(), rs).gamma == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("relativistic model") {
  CHECK(relativistic_constant(1, 1.0) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-14));
  auto rel = LevyModel::relativistic(1, 1.0);
  CHECK(rel.is_relativistic());
  CHECK(rel.beta() == 2.0);
  CHECK(rel.finite_second_moment());
  CHECK_THROWS_AS(LevyModel::relativistic(3, 1.0), UnsupportedError);
}
