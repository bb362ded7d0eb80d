#include "tsd/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include "tsd/errors.hpp"
#include "tsd/fourier.hpp"
#include "tsd/quadrature.hpp"

namespace tsd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegligible = 45.0;  // F below e^{-45} is treated as zero

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(double x) {
  std::size_t n = 64;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

void finish_field(DensityField& f) {
  double mx = 0.0;
  double mn = 0.0;
  for (double v : f.values) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  f.min_before_clip = mn;
  if (mn < -1e-9 * mx)
    throw GridError("density grid too coarse: negative ringing " + std::to_string(mn) + " against max " +
                    std::to_string(mx));
  for (double& v : f.values) v = std::max(v, 0.0);
  double s = 0.0;
  for (double v : f.values) s += v;
  f.mass = s * std::pow(f.grid.h(), f.grid.d);
}

double catmull_rom(double p0, double p1, double p2, double p3, double u) {
  return p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

void GridSpec::validate() const {
  if (d != 1 && d != 2) throw DomainError("grid: d must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("grid: L must be positive");
  if (N < 64 || !is_pow2(N)) throw DomainError("grid: N must be a power of two >= 64");
}

GridSpec GridSpec::from_spacing(int d, double L, double h) {
  GridSpec g{d, L, next_pow2(2.0 * L / h)};
  g.validate();
  return g;
}

double DensityField::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double DensityField::symmetry_defect() const {
  const std::size_t n = grid.N;
  double worst = 0.0;
  if (grid.d == 1) {
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(values[j] - values[(n - j) % n]));
    return worst;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(values[i * n + j] - values[((n - i) % n) * n + (n - j) % n]));
  return worst;
}

double DensityField::at(double x) const {
  if (grid.d != 1) throw DomainError("DensityField::at(double) needs d = 1");
  const std::size_t half = grid.N / 2;
  const double dxi = grid.dxi();
  double s = 0.0;
  for (std::size_t k = 1; k < spectrum.size() && k < half; ++k) s += spectrum[k] * std::cos(k * dxi * x);
  s = spectrum[0] + 2.0 * s;
  if (spectrum.size() > half) s += spectrum[half] * std::cos(grid.cutoff() * x);
  return std::max(0.0, s * dxi / (2.0 * kPi));
}

double DensityField::at(const Point& x) const {
  if (grid.d != 2 || x.size() != 2) throw DomainError("DensityField::at(Point) needs d = 2");
  const auto n = static_cast<long>(grid.N);
  const double h = grid.h();
  const double u0 = (x(0) + grid.L) / h;
  const double u1 = (x(1) + grid.L) / h;
  const long i0 = static_cast<long>(std::floor(u0));
  const long i1 = static_cast<long>(std::floor(u1));
  const double f0 = u0 - i0;
  const double f1 = u1 - i1;
  auto v = [&](long a, long b) {
    a = ((a % n) + n) % n;
    b = ((b % n) + n) % n;
    return values[a * n + b];
  };
  double rows[4];
  for (int r = 0; r < 4; ++r) {
    const long a = i0 - 1 + r;
    rows[r] = catmull_rom(v(a, i1 - 1), v(a, i1), v(a, i1 + 1), v(a, i1 + 2), f1);
  }
  return std::max(0.0, catmull_rom(rows[0], rows[1], rows[2], rows[3], f0));
}

DensityField invert_transform(const GridSpec& grid, double t, const Transform1& F, bool monotone_tail) {
  grid.validate();
  if (grid.d != 1) throw DomainError("invert_transform: one-dimensional transform on a d != 1 grid");
  const std::size_t N = grid.N;
  const std::size_t half = N / 2;
  const double dxi = grid.dxi();
  DensityField out;
  out.grid = grid;
  out.t = t;
  out.spectrum.assign(half + 1, 0.0);
  int small_run = 0;
  std::size_t last = half;
  for (std::size_t k = 0; k <= half; ++k) {
    const double f = F(k * dxi);
    out.spectrum[k] = f;
    if (monotone_tail && k > 0) {
      small_run = f < std::exp(-kNegligible) ? small_run + 1 : 0;
      if (small_run >= 16) {
        last = k;
        break;
      }
    }
  }
  for (std::size_t k = last + 1; k <= half; ++k) out.spectrum[k] = 0.0;
  return invert_samples(grid, t, std::move(out.spectrum));
}

DensityField invert_samples(const GridSpec& grid, double t, std::vector<double> samples) {
  grid.validate();
  if (grid.d != 1) throw DomainError("invert_samples: d = 1 only");
  const std::size_t N = grid.N;
  const std::size_t half = N / 2;
  if (samples.size() != half + 1) throw DomainError("invert_samples: need N/2 + 1 samples");
  DensityField out;
  out.grid = grid;
  out.t = t;
  out.spectrum = std::move(samples);
  std::vector<double> x(half + 1);
  for (std::size_t k = 0; k <= half; ++k) x[k] = (k % 2 == 0 ? 1.0 : -1.0) * out.spectrum[k];
  const auto y = fourier::dct1(x);
  const double scale = grid.dxi() / (2.0 * kPi);
  out.values.assign(N, 0.0);
  for (std::size_t j = 0; j <= half; ++j) out.values[j] = scale * y[j];
  for (std::size_t j = 1; j < half; ++j) out.values[N - j] = out.values[j];
  const double f_end = std::abs(out.spectrum[half]);
  out.cutoff_warning = f_end > std::exp(-35.0);
  out.truncation_error = f_end * grid.cutoff() / (kPi * std::max(1.0, -std::log(std::max(f_end, 1e-300))));
  finish_field(out);
  return out;
}

DensityField invert_transform(const GridSpec& grid, double t, const Transform2& F) {
  grid.validate();
  if (grid.d != 2) throw DomainError("invert_transform: two-dimensional transform on a d != 2 grid");
  const auto N = static_cast<long>(grid.N);
  const long half = N / 2;
  const double dxi = grid.dxi();
  std::vector<std::complex<double>> a(static_cast<std::size_t>(N * N));
  auto idx = [&](long k0, long k1) { return static_cast<std::size_t>((k0 + half) * N + (k1 + half)); };
  Point xi(2);
  double f_edge = 0.0;
  for (long k0 = -half; k0 < half; ++k0) {
    for (long k1 = -half; k1 < half; ++k1) {
      double f;
      const bool mirrored = k0 > -half && k1 > -half && (k0 > 0 || (k0 == 0 && k1 > 0));
      if (mirrored) {
        f = a[idx(-k0, -k1)].real() * (((k0 + k1) % 2 == 0) ? 1.0 : -1.0);
      } else {
        xi << k0 * dxi, k1 * dxi;
        f = F(xi);
      }
      if (k0 == -half || k1 == -half) f_edge = std::max(f_edge, f);
      a[idx(k0, k1)] = ((k0 + k1) % 2 == 0 ? 1.0 : -1.0) * f;
    }
  }
  fourier::dft2(a, static_cast<int>(N), -1);
  const double scale = std::pow(dxi / (2.0 * kPi), 2);
  DensityField out;
  out.grid = grid;
  out.t = t;
  out.values.resize(a.size());
  for (long j0 = 0; j0 < N; ++j0)
    for (long j1 = 0; j1 < N; ++j1) {
      const double sign = ((j0 + j1) % 2 == 0) ? 1.0 : -1.0;
      out.values[j0 * N + j1] = sign * scale * a[j0 * N + j1].real();
    }
  out.cutoff_warning = f_edge > std::exp(-35.0);
  out.truncation_error =
      f_edge * grid.cutoff() * grid.cutoff() / (2.0 * kPi * std::max(1.0, -std::log(std::max(f_edge, 1e-300))));
  finish_field(out);
  return out;
}

namespace {

// min over a few directions of Phi(r e)
double min_phi_at(const PhiEvaluator& ev, int d, double r) {
  if (d == 1) return ev(r);
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 16; ++k) m = std::min(m, ev(Point(r * unit2(kPi * k / 16.0))));
  return m;
}

double aliasing_estimate(const LevyModel& model, double t, double L) {
  return t * model.alpha() * nu_tail(model, L) / std::pow(L, model.dimension());
}

}  // namespace

GridSpec auto_grid(const LevyModel& model, double t) {
  if (!(t > 0.0)) throw DomainError("auto_grid: t must be positive");
  const int d = model.dimension();
  if (d > 2) throw UnsupportedError("auto_grid: d must be 1 or 2");
  const double alpha = model.alpha();
  PhiEvaluator ev(model);
  double xi_c = 1.0;
  while (t * min_phi_at(ev, d, xi_c) < 35.0) {
    xi_c *= 1.25;
    if (xi_c > 1e9) throw NumericError("auto_grid: exponent does not grow", xi_c);
  }
  while (xi_c > 1e-6 && t * min_phi_at(ev, d, xi_c / 1.25) >= 35.0) xi_c /= 1.25;

  double L0 = std::max({10.0 * std::pow(t, 1.0 / alpha), 10.0});
  if (model.finite_second_moment()) L0 = std::max(L0, 10.0 * std::sqrt(t * truncated_second_moment(model, 1e4)));
  const std::size_t cap = d == 1 ? (std::size_t{1} << 22) : (std::size_t{1} << 10);
  double L = L0;
  while (aliasing_estimate(model, t, L) > 1e-10 && 2.0 * L * xi_c / kPi < static_cast<double>(cap)) L *= 1.25;
  std::size_t N = next_pow2(2.0 * L * xi_c / kPi);
  if (N > cap) {
    N = cap;
    L = std::max(L0, static_cast<double>(N) * kPi / (2.0 * xi_c));
  }
  GridSpec g{d, L, N};
  g.validate();
  return g;
}

DensityField invert(const LevyModel& model, double t, const GridSpec& grid, PhiMethod method) {
  if (!(t > 0.0)) throw DomainError("invert: t must be positive");
  if (grid.d != model.dimension()) throw DomainError("invert: grid dimension differs from the model");
  if (grid.d == 2 && model.degenerate()) throw DegeneracyError("invert: degenerate model in d = 2");
  PhiEvaluator ev(model, method);
  DensityField out = grid.d == 1
                         ? invert_transform(grid, t, Transform1([&](double xi) { return std::exp(-t * ev(xi)); }))
                         : invert_transform(grid, t, Transform2([&](const Point& xi) { return std::exp(-t * ev(xi)); }));
  const double phi_c = min_phi_at(ev, grid.d, grid.cutoff());
  const double a = t * phi_c;
  const double tail = std::exp(-a) / (model.alpha() * std::max(a, 1.0));
  out.truncation_error = grid.d == 1 ? tail * grid.cutoff() / kPi : tail * grid.cutoff() * grid.cutoff() / (2.0 * kPi);
  out.cutoff_warning = a < 35.0;
  out.aliasing_error = aliasing_estimate(model, t, grid.L);
  return out;
}

double density_at(const PhiEvaluator& ev, double t, double x) {
  if (!(t > 0.0)) throw DomainError("density_at: t must be positive");
  if (ev.model().dimension() != 1) throw UnsupportedError("density_at: d = 1 only");
  auto F = [&](double xi) { return std::exp(-t * ev(xi)); };
  double xi_c = 1.0;
  while (t * ev(xi_c) < 40.0) {
    xi_c *= 1.5;
    if (xi_c > 1e12) throw NumericError("density_at: exponent does not grow", xi_c);
  }
  while (xi_c > 1e-9 && t * ev(xi_c / 1.5) >= 40.0) xi_c /= 1.5;

  QuadOptions opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-300;
  opt.max_subdivisions = 1 << 16;
  // split at the scale where t Phi ~ 1 so the peak of F is resolved
  std::vector<double> pts{0.0};
  for (double s = xi_c / 1.5; s > xi_c * 1e-6; s /= 4.0) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  pts.push_back(xi_c);
  const double i0 = integrate(F, std::span<const double>(pts), opt).value;
  if (x == 0.0) return i0 / kPi;

  const double ax = std::abs(x);
  QuadOptions osc = opt;
  osc.rel_tol = 1e-10;
  osc.abs_tol = 1e-12 * i0 * ax;
  auto g = [&](double v) { return F(v / ax); };
  const auto r = integrate_cos_range(g, 0.0, ax * xi_c, i0 * ax, osc);
  return std::max(0.0, r.value / (ax * kPi));
}

double density_at(const LevyModel& model, double t, double x) {
  PhiEvaluator ev(model);
  return density_at(ev, t, x);
}

std::vector<DiagonalRow> on_diagonal_scan(const LevyModel& model, std::span<const double> t_set) {
  std::vector<DiagonalRow> rows;
  const int d = model.dimension();
  std::optional<PhiEvaluator> ev;
  if (d == 1) ev.emplace(model);
  for (double t : t_set) {
    DiagonalRow r;
    r.t = t;
    if (d == 1) {
      r.p0 = density_at(*ev, t, 0.0);
    } else {
      const auto f = invert(model, t, auto_grid(model, t));
      const std::size_t c = f.grid.N / 2;
      r.p0 = f.values[c * f.grid.N + c];
    }
    r.scaled_alpha = r.p0 * std::pow(t, d / model.alpha());
    r.scaled_beta = r.p0 * std::pow(t, d / model.beta());
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tsd
