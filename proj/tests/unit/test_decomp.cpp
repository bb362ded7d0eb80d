#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "tsd/decomp.hpp"
#include "tsd/errors.hpp"

using namespace tsd;

namespace {

constexpr double kPi = std::numbers::pi;

LevyModel cauchy_model() { return LevyModel::one_dimensional(1.0, RadialProfile::constant()); }

// smallest N with Poisson(mean) mass above N below tol, by explicit long-double sums
int brute_order(double mean, double tol) {
  for (int N = 0;; ++N) {
    long double tail = 0.0L;
    long double term = std::exp(-static_cast<long double>(mean));
    for (int n = 1; n <= N; ++n) term *= mean / n;
    for (int n = N + 1; n < N + 400; ++n) {
      term *= mean / n;
      tail += term;
    }
    if (tail < tol) return N;
  }
}

double sup_rel(const DensityField& a, const DensityField& b) {
  double diff = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) diff = std::max(diff, std::abs(a.values[j] - b.values[j]));
  return diff / b.max_value();
}

}  // namespace

TEST_CASE("bounded-part mass") {
  CHECK(split(cauchy_model(), 1.0).lambda() == doctest::Approx(2.0).epsilon(1e-13));
  auto poly = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(2.0));
  // 2 \int_1^\infty s^{-2} (1+s)^{-2} ds = 3 - 4 ln 2 by partial fractions
  CHECK(split(poly, 1.0).lambda() == doctest::Approx(3.0 - 4.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(split(cauchy_model(), 1e8).lambda() < 1e-7);
  CHECK_THROWS_AS(split(cauchy_model(), 0.0), DomainError);
  auto s = split(cauchy_model(), 1.0);
  CHECK(s.bounded_density(0.5) == 0.0);
  CHECK(s.bounded_density(-2.0) == doctest::Approx(0.25));
}

TEST_CASE("series order") {
  CHECK(poisson_order(2.0, 1e-10) == 16);
  for (double mean : {0.1, 1.0, 2.0, 7.5})
    for (double tol : {1e-4, 1e-10}) CHECK(poisson_order(mean, tol) == brute_order(mean, tol));
  CHECK(poisson_order(0.0, 1e-10) == 0);
}

TEST_CASE("frequency identity of the split") {
  for (auto m : {cauchy_model(), LevyModel::one_dimensional(1.3, RadialProfile::poly_tempered(3.0), 0.6)}) {
    auto s = split(m, 0.7);
    PhiEvaluator ev(m, PhiMethod::Quadrature);
    for (double xi : {0.01, 0.3, 2.0, 11.0, 150.0}) {
      const double lhs = s.local_exponent(xi) + s.lambda() - s.bounded_transform(xi);
      CHECK(std::abs(lhs - ev(xi)) <= 1e-8 * std::max(1.0, ev(xi)));
    }
  }
}

TEST_CASE("compound Poisson field") {
  auto s = split(cauchy_model(), 1.0);
  const GridSpec g{1, 64.0, 4096};
  const auto cp = compound_poisson(s, 1.0, g, 1e-10, 0.2);
  CHECK(cp.overflow > 0.03);
  CHECK(cp.order == poisson_order(2.0, 1e-10));
  CHECK(cp.atom_weight == doctest::Approx(std::exp(-2.0)));
  const double total = cp.atom_weight + cp.ac_mass + cp.tail_bound;
  CHECK(std::abs(total - 1.0) <= 1e-9);
  double mn = 0.0;
  for (double v : cp.ac) mn = std::min(mn, v);
  CHECK(mn > -1e-6);

  auto empty = split(LevyModel::one_dimensional(1.0, RadialProfile::truncated(2.0)), 3.0);
  CHECK(empty.lambda() == 0.0);
  const auto cp0 = compound_poisson(empty, 0.5, g, 1e-10);
  CHECK(cp0.atom_weight == 1.0);
  CHECK(cp0.ac_mass == 0.0);
  const auto loc = local_density(empty, 0.5, g);
  const auto rec = recompose(loc, cp0);
  for (std::size_t j = 0; j < g.N; ++j) CHECK(rec.values[j] == doctest::Approx(loc.values[j]).epsilon(1e-12));

  CHECK_THROWS_AS(compound_poisson(s, 1.0, g, 1e-2), DomainError);
  CHECK_THROWS_AS(compound_poisson(s, 1.0, GridSpec{1, 2.0, 256}, 1e-10, 1e-3), GridError);
}

TEST_CASE("recomposition matches direct inversion") {
  auto m = cauchy_model();
  const double t = 0.5;
  auto s = split(m, default_eps(m, t));
  const GridSpec g{1, 64.0, 8192};
  const auto local = local_density(s, t, g);
  const auto cp = compound_poisson(s, t, g, 1e-10, 0.2);
  const auto rec = recompose(local, cp);
  const auto direct = invert(m, t, g);
  CHECK(sup_rel(rec, direct) <= 1e-4);
  CHECK(std::abs(rec.mass - 1.0) <= 2e-6);
  CHECK_THROWS_AS(recompose(local, compound_poisson(s, t, GridSpec{1, 64.0, 4096}, 1e-10, 0.2)), DomainError);
}

TEST_CASE("local density dominates in frequency") {
  auto m = cauchy_model();
  auto s = split(m, 1.0);
  const GridSpec g{1, 64.0, 4096};
  const auto local = local_density(s, 1.0, g);
  const auto full = invert(m, 1.0, g);
  for (std::size_t k = 0; k < local.spectrum.size(); ++k) CHECK(local.spectrum[k] >= full.spectrum[k] - 1e-15);
  CHECK(local.values[g.N / 2] > 1.0 / (kPi * kPi));
}

TEST_CASE("local moments against the truncated-measure moments") {
  auto m = LevyModel::one_dimensional(1.2, RadialProfile::exp_tempered(0.0, 1.0, 1.0), 0.8);
  for (double t : {0.01, 0.2}) {
    auto s = split(m, std::pow(t, 1.0 / 1.2));
    const double m2 = t * truncated_second_moment(m, s.eps());
    const double m4 = t * truncated_fourth_moment(m, s.eps()) + 3.0 * m2 * m2;
    CHECK(local_moment(s, t, 1) == doctest::Approx(m2).epsilon(1e-6));
    CHECK(local_moment(s, t, 2) == doctest::Approx(m4).epsilon(1e-6));
  }
  // pure stable: exact scaling under eps = t^{1/alpha}
  auto stable = LevyModel::one_dimensional(0.8, RadialProfile::constant());
  std::vector<double> scaled;
  for (double t : {1.0 / 256, 1.0 / 32, 1.0 / 8}) {
    auto s = split(stable, std::pow(t, 1.0 / 0.8));
    scaled.push_back(local_moment(s, t, 1) / std::pow(t, 2.0 / 0.8));
  }
  for (double v : scaled) CHECK(v == doctest::Approx(scaled.front()).epsilon(0.02));
  auto tiny = split(stable, std::pow(1e-6, 1.0 / 0.8));
  CHECK(local_moment(tiny, 1e-6, 1) < 1e-10);
}

TEST_CASE("ball mass of the second convolution power against double quadrature") {
  auto s = split(cauchy_model(), 1.0);
  const double eps = 1.0;
  auto f = [&](double y) { return std::abs(y) >= eps ? 1.0 / (y * y) : 0.0; };
  using boost::math::quadrature::gauss_kronrod;
  // \int f(y) \int_{x-y-r}^{x-y+r} f(z) dz dy, both integrals numerical
  auto inner = [&](double y, double x, double r) {
    double lo = x - y - r, hi = x - y + r, acc = 0.0;
    const double cuts[] = {lo, -eps, eps, hi};
    for (int i = 0; i < 3; ++i) {
      const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
      if (b > a && (a >= eps || b <= -eps)) acc += gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-14);
    }
    return acc;
  };
  auto oracle = [&](double x, double r) {
    std::vector<double> pts{-eps, eps, x - r - eps, x - r + eps, x + r - eps, x + r + eps};
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    auto g = [&](double y) { return f(y) * inner(y, x, r); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      if (pts[i + 1] > pts[i]) total += gauss_kronrod<double, 61>::integrate(g, pts[i], pts[i + 1], 12, 1e-13);
    boost::math::quadrature::exp_sinh<double> es;
    total += es.integrate([&](double u) { return g(pts.back() + u); }, 1e-13);
    total += es.integrate([&](double u) { return g(pts.front() - u); }, 1e-13);
    return total;
  };
  for (auto [x, r] : {std::pair{10.0, 0.4}, std::pair{3.0, 0.3}, std::pair{-6.0, 1.0}}) {
    CHECK(convolution_ball(s, 2, x, r) == doctest::Approx(oracle(x, r)).epsilon(1e-4));
  }
}

TEST_CASE("ball ratios grow at most geometrically") {
  auto s = split(LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0)), 1.0);
  const double xs[] = {4.0, 10.0, 30.0};
  const auto rows = convolution_ball_check(s, 5, xs);
  double lo = 1e300, hi = 0.0;
  for (const auto& row : rows) {
    if (!row.admissible) continue;
    CHECK(row.ratio > 0.0);
    const double root = std::pow(row.ratio, 1.0 / row.n);
    lo = std::min(lo, root);
    hi = std::max(hi, root);
  }
  CHECK(hi / lo < 10.0);
  // n = 1 is the plain ball mass
  CHECK(rows.front().measured == doctest::Approx(nu_ball(s.model(), Point::Constant(1, 4.0), rows.front().r, 1.0)));
}

TEST_CASE("local lower bound") {
  auto cauchy = cauchy_model();
  const double ts[] = {1e-3, 1e-2, 1e-1, 1.0};
  const auto rows = local_lower_check(cauchy, 1.0, ts);
  for (const auto& r : rows) CHECK(r.scaled == doctest::Approx(rows.front().scaled).epsilon(1e-6));
  const auto smaller = local_lower_check(cauchy, 0.5, ts);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(smaller[i].scaled > rows[i].scaled);
  auto poly = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0));
  for (const auto& r : local_lower_check(poly, 1.0, ts)) CHECK(r.scaled > 0.0);
}

TEST_CASE("planar recomposition through the transform") {
  auto m = LevyModel(1.0, SpectralMeasure::symmetric_atoms({unit2(0.0), unit2(kPi / 2)}, {1.0, 1.0}),
                     RadialProfile::poly_tempered(3.0));
  const GridSpec g{2, 12.0, 64};
  const double t = 1.0;
  const auto rec = recompose_spectral(split(m, 0.5), t, g);
  const auto direct = invert(m, t, g);
  CHECK(sup_rel(rec, direct) <= 1e-6);
  CHECK_THROWS_AS(compound_poisson(split(m, 0.5), t, g), UnsupportedError);
}
