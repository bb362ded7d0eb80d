// Runs the acceptance criteria; one PASS/FAIL line each, nonzero exit on any failure.
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tsd/charexp.hpp"
#include "tsd/decomp.hpp"
#include "tsd/harness.hpp"
#include "tsd/montecarlo.hpp"

using namespace tsd;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// mass and symmetry of every field produced below, for the last criterion
struct FieldLog {
  std::size_t count = 0;
  double worst_mass = 0.0;
  double worst_symmetry = 0.0;
  void operator()(const DensityField& f) {
    ++count;
    worst_mass = std::max(worst_mass, std::abs(f.mass - 1.0));
    worst_symmetry = std::max(worst_symmetry, f.symmetry_defect() / f.max_value());
  }
};
FieldLog g_fields;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LevyModel cauchy() { return LevyModel::one_dimensional(1.0, RadialProfile::constant(), 1.0, "cauchy"); }
LevyModel poly3() { return LevyModel::one_dimensional(1.0, RadialProfile::poly_tempered(3.0), 1.0, "poly3"); }
LevyModel exp1() { return LevyModel::one_dimensional(1.0, RadialProfile::exp_tempered(0.0, 1.0, 1.0), 1.0, "exp"); }

EnvelopeSpec spec1(Side side, Regime regime, double alpha, RadialProfile q, double beta = 2.0) {
  EnvelopeSpec s;
  s.id = std::string(to_string(side)) + "_" + to_string(regime);
  s.side = side;
  s.regime = regime;
  s.d = 1;
  s.alpha = alpha;
  s.gamma = 1.0;
  s.beta = beta;
  s.profile = std::move(q);
  return s;
}

Outcome cauchy_oracle() {
  const auto m = cauchy();
  double phi_err = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double xi = 1e-3 * std::pow(5e4, i / 400.0);  // up to 50
    phi_err = std::max(phi_err, rel(phi(m, Point::Constant(1, xi), PhiMethod::Quadrature).value, kPi * xi));
  }
  double grid_err = 0.0, point_err = 0.0;
  const GridSpec g{1, 16384.0, std::size_t{1} << 21};
  for (double t : {0.1, 1.0}) {
    const auto f = invert(m, t, g);
    g_fields(f);
    for (std::size_t j = 0; j < g.N; ++j) {
      const double x = g.x(j);
      if (std::abs(x) <= 10.0) grid_err = std::max(grid_err, rel(f.values[j], t / (x * x + kPi * kPi * t * t)));
    }
    for (int i = -20; i <= 20; ++i) {
      const double x = 0.5 * i + 0.013;
      point_err = std::max(point_err, rel(density_at(m, t, x), t / (x * x + kPi * kPi * t * t)));
    }
  }
  return {phi_err <= 1e-8 && grid_err <= 1e-6 && point_err <= 1e-6,
          "phi " + fmt("%.1e", phi_err) + ", invert " + fmt("%.1e", grid_err) + ", density_at " + fmt("%.1e", point_err)};
}

Outcome relativistic_oracle() {
  double phi_err = 0.0;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto m = LevyModel::relativistic(1, alpha);
    for (int i = 0; i <= 100; ++i) {
      const double xi = 1e-2 * std::pow(5e3, i / 100.0);
      const double exact = std::pow(xi * xi + 1.0, alpha / 2) - 1.0;
      phi_err = std::max(phi_err, rel(phi(m, Point::Constant(1, xi), PhiMethod::Quadrature).value, exact));
    }
  }
  double scale_err = 0.0;
  for (double alpha : {1.0, 1.5}) {
    const auto one = LevyModel::relativistic(1, alpha, 1.0);
    for (double mass : {2.0, 4.0}) {
      const auto heavy = LevyModel::relativistic(1, alpha, mass);
      const double k = std::pow(mass, 1.0 / alpha);
      for (double t : {0.25, 1.0})
        for (double x : {0.0, 0.3, 1.0, 2.5})
          scale_err = std::max(scale_err, rel(density_at(heavy, t, x), k * density_at(one, mass * t, k * x)));
    }
  }
  return {phi_err <= 1e-6 && scale_err <= 1e-4, "phi " + fmt("%.1e", phi_err) + ", mass scaling " + fmt("%.1e", scale_err)};
}

Outcome stable_scaling() {
  double err = 0.0;
  for (double alpha : {0.8, 1.5}) {
    const auto m = LevyModel::one_dimensional(alpha, RadialProfile::constant());
    for (double t : {0.25, 1.0, 4.0}) {
      const double k = std::pow(t, -1.0 / alpha);
      for (double x : {0.0, 0.4, 1.0, 3.0}) err = std::max(err, rel(density_at(m, t, x), k * density_at(m, 1.0, k * x)));
    }
  }
  return {err <= 1e-5, "max rel " + fmt("%.1e", err)};
}

Outcome decomposition() {
  const double ts[] = {0.1, 0.5, 1.0};
  double worst = 0.0;
  bool ok = true;
  for (const auto& m : {cauchy(), poly3(), exp1()}) {
    const auto r = verify_decomposition(m, ts);
    ok = ok && r.passed;
    for (const auto& row : r.rows) worst = std::max({worst, row.defect, row.defect_refined});
  }
  return {ok && worst <= 1e-4, "max defect " + fmt("%.1e", worst)};
}

Outcome moment_scaling() {
  std::string detail;
  bool ok = true;
  for (const auto& m : {poly3(), LevyModel::one_dimensional(1.2, RadialProfile::exp_tempered(0.0, 1.0, 1.0), 0.8)}) {
    const double alpha = m.alpha();
    for (int n : {1, 2}) {
      std::vector<double> lt, lm;
      for (int k = 8; k >= 3; --k) {
        const double t = std::pow(2.0, -k);
        const auto s = split(m, std::pow(t, 1.0 / alpha));
        lt.push_back(std::log(t));
        lm.push_back(std::log(local_moment(s, t, n)));
      }
      const double b = slope(lt, lm);
      const double want = 2.0 * n / alpha;
      ok = ok && rel(b, want) <= 0.05;
      detail += (detail.empty() ? "" : ", ") + fmt("%.3f", b) + "/" + fmt("%.3f", want);
    }
  }
  return {ok, "slopes " + detail};
}

std::string scan_detail(const VerificationReport& r) {
  return r.model_id + " " + to_string(r.side) + " " + fmt("%.3g", r.ratio) + " (d " + fmt("%.1e", r.refinement_delta) +
         ")";
}

Outcome small_t_envelopes() {
  VerifyOptions opt;
  opt.on_field = std::ref(g_fields);
  const auto ts = default_t_set(Regime::SmallT);
  bool ok = true;
  std::string detail;
  auto run = [&](const LevyModel& m, const EnvelopeSpec& up, const EnvelopeSpec& lo) {
    const auto ru = verify_upper(m, up, ts, default_x_set(m, up), opt);
    const auto rl = verify_lower(m, lo, ts, default_x_set(m, lo), opt);
    ok = ok && ru.passed && rl.passed && rl.ratio > 0.0;
    detail += (detail.empty() ? "" : "; ") + scan_detail(ru) + ", " + scan_detail(rl);
  };
  run(poly3(), spec1(Side::Upper, Regime::SmallT, 1.0, RadialProfile::poly_tempered(3.0)),
      spec1(Side::Lower, Regime::SmallT, 1.0, RadialProfile::poly_tempered(3.0)));
  auto rel_model = LevyModel::relativistic(1, 1.0);
  rel_model.set_id("relativistic");
  // (1+s)^{(d+alpha-1)/2} e^{-2s}, gamma = d
  run(rel_model, spec1(Side::Upper, Regime::SmallT, 1.0, RadialProfile::poly_tempered(3.0)),
      spec1(Side::Lower, Regime::SmallT, 1.0, RadialProfile::exp_tempered(0.5, 2.0, 2.0)));
  return {ok, detail};
}

Outcome large_t_envelopes() {
  const auto m = exp1();
  const double ts[] = {2.0, 8.0, 32.0, 100.0};
  double lo = 1e300, hi = 0.0, drift = 0.0;
  for (double t : ts) {
    double v[2];
    for (int pass = 0; pass < 2; ++pass) {
      const auto f = invert(m, t, scan_grid(m, t, pass == 0 ? 20.0 : 40.0, pass == 1), PhiMethod::Tabulated);
      g_fields(f);
      v[pass] = f.at(0.0) * std::sqrt(t);
    }
    lo = std::min(lo, v[0]);
    hi = std::max(hi, v[0]);
    drift = std::max(drift, rel(v[1], v[0]));
  }
  VerifyOptions opt;
  opt.on_field = std::ref(g_fields);
  const auto up = spec1(Side::Upper, Regime::LargeT, 1.0, RadialProfile::poly_tempered(3.0), 2.0);
  const auto r = verify_upper(m, up, ts, default_x_set(m, up), opt);
  std::string per_t;
  for (double t : ts) {
    double sup = 0.0;
    for (const auto& pt : r.points)
      if (!pt.refined && pt.t == t) sup = std::max(sup, pt.ratio);
    per_t += " " + fmt("%.3g", sup);
  }
  const bool ok = lo > 0.0 && std::isfinite(hi) && drift < 0.1 && r.passed;
  return {ok, "t^{1/2} p_t(0) in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "] drift " + fmt("%.1e", drift) +
                  "; off-diagonal sup " + fmt("%.3g", r.ratio) + " (d " + fmt("%.1e", r.refinement_delta) +
                  "), per t:" + per_t};
}

Outcome ball_bound() {
  const auto m = poly3();
  const double eps = 1.0;
  const auto s = split(m, eps);
  auto f = [&](double y) {
    const double a = std::abs(y);
    return a >= eps ? 1.0 / (a * a * std::pow(1.0 + a, 3.0)) : 0.0;
  };
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double y, double x, double r) {
    const double lo = x - y - r, hi = x - y + r;
    const double cuts[] = {lo, -eps, eps, hi};
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
      if (b > a && (a >= eps || b <= -eps)) acc += gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-14);
    }
    return acc;
  };
  auto oracle = [&](double x, double r) {
    std::vector<double> pts{-eps, eps, x - r - eps, x - r + eps, x + r - eps, x + r + eps};
    std::sort(pts.begin(), pts.end());
    auto g = [&](double y) { return f(y) * inner(y, x, r); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      if (pts[i + 1] > pts[i]) total += gauss_kronrod<double, 61>::integrate(g, pts[i], pts[i + 1], 12, 1e-13);
    boost::math::quadrature::exp_sinh<double> es;
    total += es.integrate([&](double u) { return g(pts.back() + u); }, 1e-13);
    total += es.integrate([&](double u) { return g(pts.front() - u); }, 1e-13);
    return total;
  };
  double err = 0.0;
  for (auto [x, r] : {std::pair{10.0, 0.4}, {3.0, 0.3}, {-6.0, 1.0}, {2.0, 0.5}, {25.0, 2.0}})
    err = std::max(err, rel(convolution_ball(s, 2, x, r), oracle(x, r)));
  const double xs[] = {4.0, 10.0, 30.0};
  double lo = 1e300, hi = 0.0;
  for (const auto& row : convolution_ball_check(s, 5, xs)) {
    if (!row.admissible) continue;
    const double root = std::pow(row.ratio, 1.0 / row.n);
    lo = std::min(lo, root);
    hi = std::max(hi, root);
  }
  return {err <= 1e-4 && lo > 0.0 && hi / lo < 10.0, "n=2 vs quadrature " + fmt("%.1e", err) + ", root span " + fmt("%.2f", hi / lo)};
}

Outcome monte_carlo() {
  SamplerConfig cfg;
  cfg.t = 1.0;
  cfg.eps = 0.02;
  cfg.count = 100000;
  cfg.seed = 20240601;
  bool ok = true;
  std::string detail;
  auto jump_check = [&](const SampleSet& set) {
    double mean = 0.0;
    for (auto k : set.jumps) mean += static_cast<double>(k);
    mean /= static_cast<double>(set.size());
    const double expected = cfg.t * set.lambda;
    const double z = std::abs(mean - expected) / std::sqrt(expected / static_cast<double>(set.size()));
    ok = ok && z <= 3.0;
    return z;
  };
  const auto cm = cauchy();
  const auto cs = simulate(cm, cfg);
  const double ks_c = ks_distance(cs.coordinate(), [](double x) { return 0.5 + std::atan(x / kPi) / kPi; });
  const double z_c = jump_check(cs);
  const auto pm = poly3();
  const auto ps = simulate(pm, cfg);
  const auto field = invert(pm, cfg.t, GridSpec{1, 200.0, std::size_t{1} << 14});
  g_fields(field);
  const double ks_p = ks_distance(ps.coordinate(), GridCdf(field));
  const double z_p = jump_check(ps);
  ok = ok && ks_c <= 0.01 && ks_p <= 0.01;
  detail = "KS cauchy " + fmt("%.4f", ks_c) + " poly " + fmt("%.4f", ks_p) + ", jump z " + fmt("%.2f", z_c) + " " +
           fmt("%.2f", z_p);
  return {ok, detail};
}

Outcome normalization() {
  return {g_fields.count > 0 && g_fields.worst_mass <= 1e-6 && g_fields.worst_symmetry <= 1e-9,
          std::to_string(g_fields.count) + " fields, |mass-1| " + fmt("%.1e", g_fields.worst_mass) + ", symmetry " +
              fmt("%.1e", g_fields.worst_symmetry)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget;  // seconds, 0: none
  };
  const std::vector<Criterion> all = {
      {"Cauchy oracle", cauchy_oracle, 10.0},
      {"relativistic oracle", relativistic_oracle, 0.0},
      {"stable scaling", stable_scaling, 0.0},
      {"decomposition exactness", decomposition, 60.0},
      {"moment scaling", moment_scaling, 0.0},
      {"small-t envelopes", small_t_envelopes, 0.0},
      {"large-t envelopes", large_t_envelopes, 0.0},
      {"convolution-power ball bound", ball_bound, 0.0},
      {"Monte Carlo consistency", monte_carlo, 60.0},
      {"normalization and symmetry", normalization, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string budget;
    if (all[i].budget > 0.0 && secs > all[i].budget) {
      o.pass = false;
      budget = " over budget " + fmt("%.0f s", all[i].budget);
    }
    std::printf("%s %2zu %s: %s (%.1f s%s)\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, o.detail.c_str(), secs,
                budget.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
  return failures == 0 ? 0 : 1;
}
