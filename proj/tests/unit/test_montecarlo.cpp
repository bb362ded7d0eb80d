#include <limits>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tsd/density.hpp"
#include "tsd/montecarlo.hpp"

using namespace tsd;

namespace {

constexpr double kPi = std::numbers::pi;

SamplerConfig config(double t, double eps, std::size_t n, std::uint64_t seed,
                     SmallJumps mode = SmallJumps::GaussianSubstitute) {
  SamplerConfig c;
  c.t = t;
  c.eps = eps;
  c.count = n;
  c.seed = seed;
  c.mode = mode;
  return c;
}

}  // namespace

TEST_CASE("statistics helpers") {
  CHECK(ks_distance({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  CHECK(ks_distance({0.1, 0.6}, [](double x) { return x; }) == doctest::Approx(0.4));
  const auto r = chi_square({10.0, 20.0}, {0.5, 0.5});
  CHECK(r.statistic == doctest::Approx(10.0 / 3.0));
  CHECK(r.dof == 1);
  CHECK(r.p_value == doctest::Approx(std::erfc(std::sqrt(10.0 / 6.0))).epsilon(1e-10));
}

TEST_CASE("no jumps beyond the support") {
  auto m = LevyModel::one_dimensional(1.0, RadialProfile::truncated(1.0));
  IncrementSampler s(m, config(3.0, 2.0, 1, 1, SmallJumps::Drop));
  CHECK(s.lambda() == 0.0);
  auto rng = stream_engine(7, 0);
  for (int i = 0; i < 100; ++i) CHECK(s.big_jump_sum(rng)(0) == 0.0);
}

TEST_CASE("untempered radii are Pareto and always accepted") {
  auto m = LevyModel::one_dimensional(0.7, RadialProfile::constant(2.0));
  IncrementSampler s(m, config(1.0, 0.3, 1, 1));
  auto rng = stream_engine(11, 0);
  std::vector<double> r(20000);
  for (auto& v : r) v = s.radius(rng);
  CHECK(s.accepted() == s.proposals());
  CHECK(ks_distance(r, [](double x) { return x <= 0.3 ? 0.0 : 1.0 - std::pow(0.3 / x, 0.7); }) < 0.015);
}

TEST_CASE("jump counts follow the Poisson law") {
  auto m = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0));
  const auto cfg = config(0.5, 0.1, 100000, 5);
  const auto set = simulate(m, cfg);
  double mean = 0.0;
  for (auto n : set.jumps) mean += static_cast<double>(n);
  mean /= static_cast<double>(set.size());
  const double rate = cfg.t * set.lambda;
  CHECK(std::abs(mean - rate) < 3.0 * std::sqrt(rate / set.size()));
  CHECK(set.lambda == doctest::Approx(nu_tail(m, 0.1)).epsilon(1e-12));
  CHECK(set.acceptance_rate > 0.5);
  CHECK(set.acceptance_rate < 1.0);

  // symmetric increments have mean zero
  const auto x = set.coordinate();
  double mx = 0.0, m2 = 0.0;
  for (double v : x) mx += v;
  mx /= x.size();
  for (double v : x) m2 += (v - mx) * (v - mx);
  const double sd = std::sqrt(m2 / (x.size() - 1));
  CHECK(std::abs(mx) < 3.0 * sd / std::sqrt(static_cast<double>(x.size())));
  // variance t \int y^2 nu(dy) = t, Gaussian part plus jumps
  CHECK(sd * sd == doctest::Approx(cfg.t * truncated_second_moment(m, std::numeric_limits<double>::infinity())).epsilon(0.05));
}

TEST_CASE("sampling is reproducible and thread independent") {
  auto m = LevyModel::one_dimensional(1.2, RadialProfile::exp_tempered(0.0, 1.0, 1.0));
  const auto cfg = config(1.0, 0.05, 10000, 99);
  const auto a = simulate(m, cfg, 1);
  const auto b = simulate(m, cfg, 3);
  CHECK(a.values == b.values);
  CHECK(a.jumps == b.jumps);
  CHECK(a.acceptance_rate == b.acceptance_rate);
  const auto c = simulate(m, config(1.0, 0.05, 10000, 100), 1);
  CHECK(a.values != c.values);
}

TEST_CASE("Cauchy increments against the closed-form law") {
  auto m = LevyModel::one_dimensional(1.0, RadialProfile::constant());
  const double t = 1.0;
  const auto set = simulate(m, config(t, 0.02, 100000, 2024));
  auto cdf = [t](double x) { return 0.5 + std::atan(x / (kPi * t)) / kPi; };
  CHECK(ks_distance(set.coordinate(), cdf) <= 0.01);
  CHECK(set.gaussian_variance == doctest::Approx(2.0 * 0.02).epsilon(1e-10));
  // \int_{|y|<eps} |y|^3 y^{-2} dy = eps^2, over (2 eps)^{3/2}
  CHECK(set.gaussian_error_proxy == doctest::Approx(0.02 * 0.02 / std::pow(0.04, 1.5)).epsilon(1e-8));
}

TEST_CASE("tempered increments against the inverted density") {
  auto m = LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0));
  const auto field = invert(m, 1.0, GridSpec{1, 200.0, 1 << 14});
  GridCdf cdf(field);
  CHECK(cdf(0.0) == doctest::Approx(0.5).epsilon(1e-6));
  const auto set = simulate(m, config(1.0, 0.02, 100000, 77));
  CHECK(ks_distance(set.coordinate(), cdf) <= 0.01);
}

TEST_CASE("dropping small jumps converges as eps shrinks") {
  auto m = LevyModel::one_dimensional(0.5, RadialProfile::poly_tempered(3.0));
  const auto field = invert(m, 1.0, GridSpec{1, 400.0, 1 << 16});
  GridCdf cdf(field);
  std::vector<double> ks;
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto set = simulate(m, config(1.0, eps, 100000, 3, SmallJumps::Drop));
    ks.push_back(ks_distance(set.coordinate(), cdf));
  }
  CHECK(ks[0] > ks[1]);
  CHECK(ks[1] > ks[2]);
}

TEST_CASE("jump radii fit the tempered tail") {
  auto expm = LevyModel::one_dimensional(1.2, RadialProfile::exp_tempered(0.0, 1.0, 1.0));
  CHECK(radius_fit(expm, 0.5, 100000, 31).p_value > 1e-3);
  auto poly = LevyModel::one_dimensional(0.8, RadialProfile::poly_tempered(2.0));
  const auto r = radius_fit(poly, 0.1, 100000, 32);
  CHECK(r.p_value > 1e-3);
  CHECK(r.dof >= 10);
}

TEST_CASE("planar jumps from a circle density") {
  auto m = LevyModel(1.0, SpectralMeasure::uniform_circle(2.0), RadialProfile::poly_tempered(3.0));
  IncrementSampler s(m, config(1.0, 0.5, 1, 1));
  CHECK(s.small_jump_covariance()(0, 0) == doctest::Approx(s.small_jump_covariance()(1, 1)).epsilon(1e-9));
  CHECK(std::abs(s.small_jump_covariance()(0, 1)) < 1e-12);
  auto rng = stream_engine(4, 0);
  double c2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const Point j = s.jump(rng);
    CHECK(j.norm() >= 0.5);
    c2 += j(0) * j(0) / j.squaredNorm();
  }
  CHECK(c2 / n == doctest::Approx(0.5).epsilon(0.02));
}
