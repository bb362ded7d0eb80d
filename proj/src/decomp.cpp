#include "tsd/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tsd/errors.hpp"
#include "tsd/fourier.hpp"
#include "tsd/quadrature.hpp"
#include "tsd/radial.hpp"

namespace tsd {

namespace {

constexpr double kPi = std::numbers::pi;

// 2 \int_{-pi/2}^{pi/2} g(phi + tau) f(cos tau) dtau over a pi-periodic spectral density
template <class F>
double angular(const SpectralMeasure& mu, double phi, F&& f) {
  const double pts[] = {-0.5 * kPi, 0.0, 0.5 * kPi};
  QuadOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-300;
  auto g = [&](double tau) { return mu.density(phi + tau) * f(std::cos(tau)); };
  return 2.0 * integrate(g, std::span<const double>(pts), o).value;
}

// sum_i w_i R_i(<xi, theta_i>) with R even in its argument; mirrored atoms share one evaluation
template <class R>
double over_atoms(const LevyModel& model, const Point& xi, R&& radial_fn) {
  const auto& mu = model.spectral();
  std::map<std::pair<const RadialProfile*, double>, double> seen;
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double u = std::abs(xi.dot(mu.directions()[i]));
    const auto key = std::make_pair(&model.profile(i), u);
    auto it = seen.find(key);
    if (it == seen.end()) it = seen.emplace(key, radial_fn(model.profile(i), u)).first;
    total += mu.weights()[i] * it->second;
  }
  return total;
}

Point as_point(double x) {
  Point p(1);
  p << x;
  return p;
}

std::size_t next_pow2(double x) {
  std::size_t n = 64;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

}  // namespace

SplitMeasure::SplitMeasure(LevyModel model, double eps) : model_(std::move(model)), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("split: eps must be positive");
  lambda_ = nu_tail(model_, eps_);
}

SplitMeasure split(const LevyModel& model, double eps) { return SplitMeasure(model, eps); }

double default_eps(const LevyModel& model, double t) {
  if (!(t > 0.0)) throw DomainError("default_eps: t must be positive");
  return t <= 1.0 ? std::pow(t, 1.0 / model.alpha()) : std::pow(t, 1.0 / model.beta());
}

double SplitMeasure::bounded_density(double y) const {
  if (model_.dimension() != 1) throw UnsupportedError("bounded_density: d = 1 only");
  const double s = std::abs(y);
  if (s < eps_) return 0.0;
  const auto& mu = model_.spectral();
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.directions()[i](0) * y > 0.0) total += mu.weights()[i] * model_.profile(i)(s);
  return total * std::pow(s, -1.0 - model_.alpha());
}

double SplitMeasure::bounded_mass(double a, double b) const {
  if (model_.dimension() != 1) throw UnsupportedError("bounded_mass: d = 1 only");
  if (b <= a) return 0.0;
  const auto& mu = model_.spectral();
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const bool pos = mu.directions()[i](0) > 0.0;
    const double lo = std::max(pos ? a : -b, eps_);
    const double hi = pos ? b : -a;
    if (hi > lo) total += mu.weights()[i] * radial::segment(model_.profile(i), model_.alpha(), lo, hi);
  }
  return total;
}

double SplitMeasure::local_exponent(const Point& xi) const {
  const double a = model_.alpha();
  auto radial_fn = [&](const RadialProfile& q, double u) {
    return u == 0.0 ? 0.0 : radial::one_minus_cos(q, a, u, 0.0, eps_).value;
  };
  const auto& mu = model_.spectral();
  if (mu.kind() == SpectralKind::Atomic) return over_atoms(model_, xi, radial_fn);
  const double n = xi.norm();
  if (n == 0.0) return 0.0;
  const auto& q = model_.profile(0);
  return angular(mu, std::atan2(xi(1), xi(0)), [&](double c) { return radial_fn(q, n * std::abs(c)); });
}

double SplitMeasure::local_exponent(double xi) const { return local_exponent(as_point(xi)); }

double SplitMeasure::bounded_transform(const Point& xi) const {
  if (xi.norm() == 0.0) return lambda_;
  const double a = model_.alpha();
  auto radial_fn = [&](const RadialProfile& q, double u) {
    return u == 0.0 ? radial::tail(q, a, eps_) : radial::cos_transform(q, a, u, eps_);
  };
  const auto& mu = model_.spectral();
  if (mu.kind() == SpectralKind::Atomic) return over_atoms(model_, xi, radial_fn);
  const auto& q = model_.profile(0);
  const double n = xi.norm();
  return angular(mu, std::atan2(xi(1), xi(0)), [&](double c) { return radial_fn(q, n * std::abs(c)); });
}

double SplitMeasure::bounded_transform(double xi) const { return bounded_transform(as_point(xi)); }

GridSpec local_grid(const SplitMeasure& s, double t, double extent_factor) {
  if (!(t > 0.0)) throw DomainError("local_grid: t must be positive");
  const auto& model = s.model();
  const int d = model.dimension();
  const double sigma = std::sqrt(t * truncated_second_moment(model, s.eps()));
  const double L = extent_factor * std::max(sigma, std::pow(t, 1.0 / model.alpha()));
  auto min_exponent = [&](double r) {
    if (d == 1) return s.local_exponent(r);
    double m = s.local_exponent(Point(r * unit2(0.0)));
    for (int k = 1; k < 8; ++k) m = std::min(m, s.local_exponent(Point(r * unit2(kPi * k / 8.0))));
    return m;
  };
  double xi = 1.0 / L;
  while (t * min_exponent(xi) < 35.0) {
    xi *= 1.25;
    if (xi > 1e12) throw NumericError("local_grid: exponent does not grow", xi);
  }
  const std::size_t cap = d == 1 ? (std::size_t{1} << 22) : (std::size_t{1} << 10);
  GridSpec g{d, L, std::min(cap, next_pow2(2.0 * L * xi / kPi))};
  g.validate();
  return g;
}

DensityField local_density(const SplitMeasure& s, double t, const GridSpec& grid) {
  if (!(t > 0.0)) throw DomainError("local_density: t must be positive");
  if (grid.d != s.model().dimension()) throw DomainError("local_density: grid dimension differs from the model");
  if (grid.d == 1) return invert_transform(grid, t, Transform1([&](double xi) { return std::exp(-t * s.local_exponent(xi)); }));
  return invert_transform(grid, t, Transform2([&](const Point& xi) { return std::exp(-t * s.local_exponent(xi)); }));
}

double local_moment(const SplitMeasure& s, double t, int n, std::optional<GridSpec> grid) {
  if (n < 1 || n > 3) throw DomainError("local_moment: n must be 1, 2 or 3");
  const GridSpec g = grid ? *grid : local_grid(s, t);
  const auto f = local_density(s, t, g);
  const double h = g.h();
  const double outer = 0.75 * g.L;
  double total = 0.0;
  double tail = 0.0;
  auto add = [&](double r2, double v) {
    const double c = std::pow(r2, n) * v;
    total += c;
    if (r2 > outer * outer) tail += c;
  };
  if (g.d == 1) {
    for (std::size_t j = 0; j < g.N; ++j) add(g.x(j) * g.x(j), f.values[j]);
  } else {
    for (std::size_t i = 0; i < g.N; ++i)
      for (std::size_t j = 0; j < g.N; ++j) add(g.x(i) * g.x(i) + g.x(j) * g.x(j), f.values[i * g.N + j]);
  }
  if (tail > 0.01 * total) throw GridError("local_moment: grid too small for moment convergence");
  return total * std::pow(h, g.d);
}

namespace {

// e^{-mean} sum_{n>N} mean^n / n!, summed forward from n = N + 1 (no cancellation)
double poisson_tail(double mean, int N) {
  double log_term = -mean + (N + 1) * std::log(mean) - std::lgamma(N + 2.0);
  double tk = std::exp(log_term);
  double tail = 0.0;
  for (int k = N + 1; tk > 0.0; ++k) {
    tail += tk;
    if (tk < 1e-20 * tail && k > mean) break;
    tk *= mean / (k + 1);
  }
  return tail;
}

}  // namespace

int poisson_order(double mean, double tol) {
  if (!(mean >= 0.0)) throw DomainError("poisson_order: mean must be nonnegative");
  if (!(tol > 0.0)) throw DomainError("poisson_order: tol must be positive");
  if (mean == 0.0) return 0;
  for (int N = 0; N < 100000; ++N)
    if (poisson_tail(mean, N) < tol) return N;
  throw NumericError("poisson_order: series too long", mean);
}

CompoundPoissonField compound_poisson(const SplitMeasure& s, double t, const GridSpec& grid, double tol,
                                      double max_overflow) {
  if (s.model().dimension() != 1 || grid.d != 1)
    throw UnsupportedError("compound_poisson: the explicit series is d = 1 only; use recompose_spectral");
  if (!(t > 0.0)) throw DomainError("compound_poisson: t must be positive");
  if (!(tol > 0.0 && tol <= 1e-3)) throw DomainError("compound_poisson: tol must lie in (0, 1e-3]");
  grid.validate();
  CompoundPoissonField cp;
  cp.grid = grid;
  cp.t = t;
  cp.lambda = s.lambda();
  const double mean = t * cp.lambda;
  cp.atom_weight = std::exp(-mean);
  const std::size_t N = grid.N;
  const std::size_t half = N / 2;
  cp.ac.assign(N, 0.0);
  cp.nu_hat.assign(half + 1, 0.0);
  cp.ac_spectrum.assign(half + 1, 0.0);
  if (mean == 0.0) return cp;

  cp.order = poisson_order(mean, tol);
  cp.tail_bound = poisson_tail(mean, cp.order);

  // frequency side: e^{-t lambda} sum_{n=1}^{order} (t nu_hat)^n / n!
  const double dxi = grid.dxi();
  std::vector<double> higher(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    const double v = k == 0 ? cp.lambda : s.bounded_transform(k * dxi);
    cp.nu_hat[k] = v;
    const double z = t * v;
    double sum = 0.0;
    for (int n = cp.order; n >= 1; --n) sum = z / n * (1.0 + sum);
    cp.ac_spectrum[k] = cp.atom_weight * sum;
    higher[k] = cp.ac_spectrum[k] - cp.atom_weight * z;
  }

  // n >= 2 part: raw inverse transform (continuous density, no clipping)
  {
    std::vector<double> x(half + 1);
    for (std::size_t k = 0; k <= half; ++k) x[k] = (k % 2 == 0 ? 1.0 : -1.0) * higher[k];
    const auto y = fourier::dct1(x);
    const double scale = dxi / (2.0 * kPi);
    for (std::size_t j = 0; j <= half; ++j) cp.ac[j] = scale * y[j];
    for (std::size_t j = 1; j < half; ++j) cp.ac[N - j] = cp.ac[j];
  }

  // n = 1 part: exact cell averages of the bounded density, periodized with period 2L
  const double h = grid.h();
  const double L = grid.L;
  const double w1 = cp.atom_weight * t;
  std::vector<double> first(N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    const double x = grid.x(j);
    first[j] = s.bounded_mass(x - 0.5 * h, x + 0.5 * h) / h;
  }
  constexpr int kImages = 32;
  for (std::size_t j = 0; j < N; ++j) {
    const double x = grid.x(j);
    double img = 0.0;
    for (int m = 1; m <= kImages; ++m) img += s.bounded_density(x + 2.0 * L * m) + s.bounded_density(x - 2.0 * L * m);
    first[j] += img;
  }
  // mass beyond the last image, spread evenly
  const double far = nu_tail(s.model(), (2.0 * kImages + 1.0) * L);
  for (std::size_t j = 0; j < N; ++j) cp.ac[j] += w1 * (first[j] + far / (2.0 * L));
  double mass = 0.0;
  for (double v : cp.ac) mass += v;
  cp.ac_mass = mass * h;

  // mass leaving [-L, L]: P(|S_n| > L) <= n nu_bar(|y| > L/n) / lambda
  double overflow = 0.0;
  double pn = cp.atom_weight;
  for (int n = 1; n <= cp.order; ++n) {
    pn *= mean / n;
    overflow += pn * std::min(1.0, n * nu_tail(s.model(), std::max(L / n, s.eps())) / cp.lambda);
  }
  cp.overflow = overflow;
  if (overflow > max_overflow)
    throw GridError("compound_poisson: estimated overflow " + std::to_string(overflow) + " beyond the grid");
  return cp;
}

DensityField recompose(const DensityField& local, const CompoundPoissonField& cp) {
  if (local.grid.d != 1 || cp.grid.d != 1) throw DomainError("recompose: d = 1 fields required");
  if (local.grid.N != cp.grid.N || local.grid.L != cp.grid.L) throw DomainError("recompose: grid mismatch");
  if (local.t != cp.t) throw DomainError("recompose: time mismatch");
  std::vector<double> f(cp.ac_spectrum.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = local.spectrum[k] * (cp.atom_weight + cp.ac_spectrum[k]);
  return invert_samples(local.grid, local.t, std::move(f));
}

DensityField recompose_spectral(const SplitMeasure& s, double t, const GridSpec& grid) {
  if (grid.d != s.model().dimension()) throw DomainError("recompose_spectral: grid dimension differs from the model");
  const double lambda = s.lambda();
  auto F = [&](const Point& xi) {
    const double local = t * s.local_exponent(xi);
    if (local > 45.0) return 0.0;
    return std::exp(-local - t * (lambda - s.bounded_transform(xi)));
  };
  if (grid.d == 1) return invert_transform(grid, t, Transform1([&](double xi) { return F(as_point(xi)); }));
  return invert_transform(grid, t, Transform2(F));
}

namespace {

struct BallSpectrum {
  GridSpec grid;
  std::vector<double> nu_hat;
};

BallSpectrum ball_spectrum(const SplitMeasure& s, double max_x, const BallOptions& opt) {
  const double L = opt.L > 0.0 ? opt.L : std::max(500.0, 20.0 * max_x);
  const double cutoff = opt.cutoff > 0.0 ? opt.cutoff : 400.0 / std::min(s.eps(), 1.0);
  const std::size_t N = std::min(std::size_t{1} << 21, next_pow2(2.0 * L * cutoff / kPi));
  BallSpectrum b{GridSpec{1, L, N}, {}};
  const double dxi = b.grid.dxi();
  b.nu_hat.resize(N / 2 + 1);
  for (std::size_t k = 0; k <= N / 2; ++k) b.nu_hat[k] = k == 0 ? s.lambda() : s.bounded_transform(k * dxi);
  return b;
}

// (1/pi) \int_0^\Xi nu_hat^n (2 sin(xi r)/xi) cos(xi x) dxi by the trapezoid rule on the dual grid
double ball_sum(const BallSpectrum& b, int n, double x, double r) {
  const double dxi = b.grid.dxi();
  const std::size_t half = b.grid.N / 2;
  double s = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double xi = k * dxi;
    const double wk = k == half ? 0.5 : 1.0;
    s += wk * std::pow(b.nu_hat[k], n) * 2.0 * std::sin(xi * r) / xi * std::cos(xi * x);
  }
  s = 2.0 * s + std::pow(b.nu_hat[0], n) * 2.0 * r;
  return s * dxi / (2.0 * kPi);
}

}  // namespace

double convolution_ball(const SplitMeasure& s, int n, double x, double r, const BallOptions& opt) {
  if (s.model().dimension() != 1) throw UnsupportedError("convolution_ball: d = 1 only");
  if (n < 1) throw DomainError("convolution_ball: n must be >= 1");
  if (!(r > 0.0)) throw DomainError("convolution_ball: r must be positive");
  if (n == 1) return nu_ball(s.model(), as_point(x), r, s.eps());
  return ball_sum(ball_spectrum(s, std::abs(x) + r, opt), n, x, r);
}

std::vector<BallRow> convolution_ball_check(const SplitMeasure& s, int n_max, std::span<const double> x_set,
                                            const BallOptions& opt) {
  if (s.model().dimension() != 1) throw UnsupportedError("convolution_ball_check: d = 1 only");
  if (n_max < 1 || n_max > 5) throw DomainError("convolution_ball_check: n_max must lie in 1..5");
  double max_x = 0.0;
  for (double x : x_set) max_x = std::max(max_x, std::abs(x));
  const auto spec = n_max >= 2 ? ball_spectrum(s, max_x, opt) : BallSpectrum{};
  const double a = s.model().alpha();
  const auto& q = s.model().profile(0);
  const double eps = s.eps();
  std::vector<BallRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    for (double x : x_set) {
      const double ax = std::abs(x);
      for (BallRule rule : {BallRule::EpsThird, BallRule::XOverFivePowN}) {
        BallRow row;
        row.n = n;
        row.x = x;
        row.rule = rule;
        row.r = rule == BallRule::EpsThird ? eps / 3.0 : ax / std::pow(5.0, n);
        row.admissible = row.r > 0.0 && row.r <= std::max(eps / 3.0, ax / std::pow(5.0, n)) && ax - row.r >= eps;
        row.shape = row.r * std::pow(std::pow(eps, -a) * q(eps), n - 1) * std::pow(ax, -a - 1.0) * q(ax);
        if (row.admissible) {
          row.measured = n == 1 ? nu_ball(s.model(), as_point(x), row.r, eps) : ball_sum(spec, n, x, row.r);
          row.ratio = row.measured / row.shape;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<LocalLowerRow> local_lower_check(const LevyModel& model, double a, std::span<const double> t_set) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("local_lower_check: a must lie in (0, 1]");
  std::vector<LocalLowerRow> rows;
  const int d = model.dimension();
  for (double t : t_set) {
    LocalLowerRow row;
    row.t = t;
    row.eps = a * std::pow(t, 1.0 / model.alpha());
    const SplitMeasure s(model, row.eps);
    const auto g = local_grid(s, t);
    const auto f = local_density(s, t, g);
    const std::size_t c = g.N / 2;
    row.p0 = d == 1 ? f.values[c] : f.values[c * g.N + c];
    row.scaled = std::pow(t, d / model.alpha()) * row.p0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tsd
