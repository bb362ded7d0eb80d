#include "tsd/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tsd/charexp.hpp"
#include "tsd/errors.hpp"
#include "tsd/quadrature.hpp"

namespace tsd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_regime(const EnvelopeSpec& spec, double t, Regime want, const char* who) {
  if (spec.regime != want) throw DomainError(std::string(who) + ": spec has the other regime");
  if (want == Regime::SmallT && !(t > 0.0 && t <= 1.0))
    throw RegimeError(std::string(who) + ": t must lie in (0, 1]");
  if (want == Regime::LargeT && !(t > 1.0 && std::isfinite(t)))
    throw RegimeError(std::string(who) + ": t must exceed 1");
}

double min_form(const EnvelopeSpec& spec, double t, const Point& x) {
  if (x.size() != spec.d) throw DomainError("envelope: dimension mismatch");
  const double k = spec.kappa();
  const double diag = std::pow(t, -spec.d / k);
  const double r = x.norm();
  if (r == 0.0) return diag;
  const double off = std::pow(t, 1.0 + (spec.gamma - spec.d) / k) * std::pow(r, -spec.alpha - spec.gamma) * spec.profile(r);
  return std::min(diag, off);
}

bool tail_integrable(const EnvelopeSpec& spec) { return profile_beta(spec.profile, spec.alpha) >= spec.beta - 1e-12; }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

std::string fmt(const char* label, double a, double b) {
  std::ostringstream os;
  os << label << " " << a << " -> " << b;
  return os.str();
}

// Directions probing the cone; d = 1 uses +1 only (the model is symmetric).
std::vector<Point> cone_probes(const LevyModel& model, const DirectionSet& cone) {
  std::vector<Point> out;
  if (model.dimension() == 1) {
    out.push_back(Point::Ones(1));
    return out;
  }
  if (cone.everywhere()) {
    for (int k = 0; k < 12; ++k) out.push_back(unit2(kPi * k / 12.0));
    return out;
  }
  for (const auto& th : cone.directions) out.push_back(th.normalized());
  for (const auto& [a, b] : cone.arcs)
    for (double f : {0.0, 0.5, 1.0}) out.push_back(unit2(a + f * (b - a)));
  return out;
}

// Ratio of nu(B(x,r)) to r^gamma |x|^{-alpha-gamma} q(|x|) at rho up to rho_max.
double ball_ratio_inf(const LevyModel& model, const EnvelopeSpec& spec, const std::vector<Point>& probes,
                      double rho_max, int n_rho) {
  double inf = kInf;
  for (double rho : log_grid(0.1, rho_max, n_rho)) {
    const double q = spec.profile(rho);
    for (const auto& th : probes) {
      const Point x = rho * th;
      for (double f : {0.5, 0.125, 1.0 / 32}) {
        const double r = f * rho;
        const double shape = std::pow(r, spec.gamma) * std::pow(rho, -spec.alpha - spec.gamma) * q;
        if (!(shape > 0.0)) continue;
        inf = std::min(inf, nu_ball(model, x, r) / shape);
      }
    }
  }
  return inf;
}

HypothesisItem ball_lower_bound(const LevyModel& model, const EnvelopeSpec& spec) {
  const auto probes = cone_probes(model, spec.cone);
  const double c = ball_ratio_inf(model, spec, probes, 20.0, 12);
  const double c_ext = ball_ratio_inf(model, spec, probes, 40.0, 14);
  HypothesisItem it{"ball_lower_bound", Verdict::Pass, c, fmt("inf ratio, range doubled:", c, c_ext)};
  if (!(c > 0.0) || !std::isfinite(c) || c_ext < 0.5 * c) it.verdict = Verdict::Fail;
  return it;
}

// sup over [lo, hi] of nu_tail(r) r^p, compared with the sup over [lo, 2 hi]
HypothesisItem tail_power(const LevyModel& model, const char* name, double p, double lo, double hi) {
  auto sup_on = [&](double a, double b) {
    double s = 0.0;
    for (double r : log_grid(a, b, 25)) s = std::max(s, nu_tail(model, r) * std::pow(r, p));
    return s;
  };
  const double base = sup_on(lo, hi);
  const double ext = sup_on(lo, 2.0 * hi);
  HypothesisItem it{name, Verdict::Pass, base, fmt("sup ratio, range extended:", base, ext)};
  if (!std::isfinite(base) || ext > 1.5 * base) it.verdict = Verdict::Fail;
  return it;
}

// small r end of nu_tail(r) r^alpha: compare sup over [1e-3, 1) with sup over [1e-6, 1)
HypothesisItem small_ball_tail(const LevyModel& model) {
  auto sup_on = [&](double a) {
    double s = 0.0;
    for (double r : log_grid(a, 0.999, 25)) s = std::max(s, nu_tail(model, r) * std::pow(r, model.alpha()));
    return s;
  };
  const double base = sup_on(1e-3);
  const double ext = sup_on(1e-6);
  HypothesisItem it{"small_ball_tail", Verdict::Pass, base, fmt("sup ratio, range extended:", base, ext)};
  if (!std::isfinite(base) || ext > 1.5 * base) it.verdict = Verdict::Fail;
  return it;
}

// Phi(xi) / |xi|^p over radii [lo, hi]; extension adds radii past `far` (hi or lo side).
struct GrowthScan {
  double inf_base = kInf, sup_base = 0.0, inf_all = kInf, sup_all = 0.0;
};

GrowthScan growth_scan(const LevyModel& model, double p, double lo, double hi, bool extend_up) {
  PhiEvaluator phi_eval(model);
  const int d = model.dimension();
  const double a = extend_up ? lo : 0.5 * lo;
  const double b = extend_up ? 2.0 * hi : hi;
  GrowthScan g;
  for (const auto& xi : xi_grid(d, a, b, 16, 12)) {
    const double n = xi.norm();
    const double v = phi_eval(xi) / std::pow(n, p);
    g.inf_all = std::min(g.inf_all, v);
    g.sup_all = std::max(g.sup_all, v);
    if (n >= lo * (1 - 1e-12) && n <= hi * (1 + 1e-12)) {
      g.inf_base = std::min(g.inf_base, v);
      g.sup_base = std::max(g.sup_base, v);
    }
  }
  return g;
}

HypothesisItem growth_lower(const LevyModel& model, const char* name, double p, double lo, double hi, bool up) {
  const auto g = growth_scan(model, p, lo, hi, up);
  HypothesisItem it{name, Verdict::Pass, g.inf_base, fmt("inf ratio, range extended:", g.inf_base, g.inf_all)};
  if (!(g.inf_base > 1e-12 * g.sup_base) || g.inf_all < 0.5 * g.inf_base) it.verdict = Verdict::Fail;
  if (model.degenerate()) {
    it.verdict = Verdict::Fail;
    it.detail = "spectral measure is degenerate";
  }
  return it;
}

HypothesisItem growth_two_sided(const LevyModel& model, double beta) {
  const auto g = growth_scan(model, beta, 1e-3, 1.0, false);
  std::ostringstream os;
  os << "ratio range [" << g.inf_base << ", " << g.sup_base << "], extended [" << g.inf_all << ", " << g.sup_all
     << "]";
  HypothesisItem it{"low_frequency_two_sided", Verdict::Pass, g.sup_base / g.inf_base, os.str()};
  if (!(g.inf_base > 0.0) || !std::isfinite(g.sup_base) || g.inf_all < 0.5 * g.inf_base ||
      g.sup_all > 2.0 * g.sup_base)
    it.verdict = Verdict::Fail;
  return it;
}

HypothesisItem dominating_profile(const LevyModel& model, const RadialProfile& qbar) {
  HypothesisItem it{"dominating_profile", Verdict::Pass, 0.0, {}};
  const auto s = log_grid(1e-3, 2e3, 61);
  double prev = kInf;
  for (double v : s) {
    const double qb = qbar(v);
    if (qb > prev * (1 + 1e-12)) {
      it.verdict = Verdict::Fail;
      it.detail = "envelope profile is not nonincreasing";
      return it;
    }
    prev = qb;
  }
  double base = 0.0, ext = 0.0;
  for (const auto& q : model.profiles())
    for (double v : s) {
      const double qv = q(v);
      const double qb = qbar(v);
      const double r = qv == 0.0 ? 0.0 : (qb > 0.0 ? qv / qb : kInf);
      ext = std::max(ext, r);
      if (v <= 1e3) base = std::max(base, r);
    }
  it.constant = base;
  it.detail = fmt("sup q/qbar, range doubled:", base, ext);
  if (!std::isfinite(ext) || ext > 1.5 * base) it.verdict = Verdict::Fail;
  return it;
}

HypothesisItem profile_doubling(const RadialProfile& qbar) {
  HypothesisItem it{"profile_doubling", Verdict::Pass, 0.0, {}};
  try {
    const double k1 = doubling_constant(qbar, 1e-3, 1e3).K;
    const double k2 = doubling_constant(qbar, 1e-3, 2e3).K;
    it.constant = k1;
    it.detail = fmt("doubling constant, range doubled:", k1, k2);
    if (k2 > 1.1 * k1) it.verdict = Verdict::Fail;
  } catch (const UnsupportedError& e) {
    it.verdict = Verdict::Fail;
    it.detail = e.what();
  }
  return it;
}

HypothesisItem spectral_growth(const EnvelopeSpec& spec, double gamma_fit) {
  HypothesisItem it{"spectral_ball_growth", Verdict::Pass, gamma_fit, {}};
  std::ostringstream os;
  os << "gamma " << spec.gamma << ", fitted " << gamma_fit;
  it.detail = os.str();
  if (spec.gamma > gamma_fit + 0.2) it.verdict = Verdict::Fail;
  return it;
}

HypothesisItem tail_integrability(const EnvelopeSpec& spec) {
  const double p = spec.beta - spec.alpha - 1.0;
  auto f = [&](double s) { return std::pow(s, p) * spec.profile(s); };
  const double pts[] = {1.0, 10.0, 100.0, 1e3, 1e4};
  HypothesisItem it{"tail_integrability", Verdict::Pass, integrate(f, std::span<const double>(pts)).value, {}};
  it.detail = "integral over [1, 1e4] " + std::to_string(it.constant);
  if (!tail_integrable(spec)) {
    it.verdict = Verdict::Fail;
    it.detail += "; diverges for this beta";
  }
  return it;
}

void polynomial_scope(const LevyModel& model, HypothesisReport& rep) {
  for (const auto& q : model.profiles()) {
    if (q.kind() != ProfileKind::PolyTempered) continue;
    HypothesisItem it{"polynomial_decay_scope", Verdict::Pass, q.m(), {}};
    std::ostringstream os;
    os << "m " << q.m() << " against 2 - alpha " << 2.0 - model.alpha();
    it.detail = os.str();
    if (!(q.m() > 2.0 - model.alpha())) {
      it.verdict = Verdict::NotCovered;
      it.detail += ": outside the polynomial tempering result";
    }
    rep.items.push_back(it);
    return;
  }
}

}  // namespace

bool DirectionSet::contains(const Point& x) const {
  const double n = x.norm();
  if (n == 0.0 || everywhere()) return true;
  const Point u = x / n;
  for (const auto& th : directions)
    if (th.size() == u.size() && (u - th.normalized()).norm() <= tol) return true;
  if (u.size() == 2) {
    const double phi = std::atan2(u(1), u(0));
    for (const auto& [a, b] : arcs) {
      const double w = std::remainder(phi - a, 2.0 * kPi);
      const double shifted = w < -tol ? w + 2.0 * kPi : w;
      if (shifted <= (b - a) + tol) return true;
    }
  }
  return false;
}

void EnvelopeSpec::validate() const {
  if (d != 1 && d != 2) throw DomainError("envelope spec: d must be 1 or 2");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("envelope spec: alpha must lie in (0,2)");
  if (!(gamma >= 1.0 && gamma <= d)) throw DomainError("envelope spec: gamma must lie in [1, d]");
  if (regime == Regime::LargeT && !(beta >= alpha && beta <= 2.0))
    throw DomainError("envelope spec: beta must lie in [alpha, 2]");
  for (const auto& th : cone.directions)
    if (th.size() != d || th.norm() == 0.0) throw DomainError("envelope spec: bad cone direction");
  if (!cone.arcs.empty() && d != 2) throw DomainError("envelope spec: arcs need d = 2");
}

double env_upper_small_t(const EnvelopeSpec& spec, double t, const Point& x) {
  check_regime(spec, t, Regime::SmallT, "env_upper_small_t");
  return min_form(spec, t, x);
}

std::optional<double> env_lower_small_t(const EnvelopeSpec& spec, double t, const Point& x) {
  check_regime(spec, t, Regime::SmallT, "env_lower_small_t");
  if (!spec.cone.contains(x)) return std::nullopt;
  return min_form(spec, t, x);
}

std::optional<double> env_upper_large_t(const EnvelopeSpec& spec, double t, const Point& x) {
  check_regime(spec, t, Regime::LargeT, "env_upper_large_t");
  if (!tail_integrable(spec)) return std::nullopt;
  return min_form(spec, t, x);
}

std::optional<double> env_lower_large_t(const EnvelopeSpec& spec, double t, const Point& x) {
  check_regime(spec, t, Regime::LargeT, "env_lower_large_t");
  if (!spec.cone.contains(x)) return std::nullopt;
  return min_form(spec, t, x);
}

std::optional<double> envelope(const EnvelopeSpec& spec, double t, const Point& x) {
  if (spec.side == Side::Upper)
    return spec.regime == Regime::SmallT ? std::optional(env_upper_small_t(spec, t, x)) : env_upper_large_t(spec, t, x);
  return spec.regime == Regime::SmallT ? env_lower_small_t(spec, t, x) : env_lower_large_t(spec, t, x);
}

double env_product_form(const EnvelopeSpec& spec, double t, const Point& x) {
  const double k = spec.kappa();
  const double r = x.norm();
  const double q = r == 0.0 ? spec.profile.value_at_zero() : spec.profile(r);
  return std::pow(t, -spec.d / k) * std::pow(1.0 + std::pow(t, -1.0 / k) * r, -spec.alpha - spec.gamma) * q;
}

bool HypothesisReport::passed() const { return first_failure() == nullptr; }

const HypothesisItem* HypothesisReport::first_failure() const {
  for (const auto& it : items)
    if (it.verdict == Verdict::Fail) return &it;
  return nullptr;
}

HypothesisReport hypothesis_check(const LevyModel& model, const EnvelopeSpec& spec) {
  HypothesisReport rep;
  const bool match = spec.d == model.dimension() && std::abs(spec.alpha - model.alpha()) < 1e-12;
  rep.items.push_back({"model_match", match ? Verdict::Pass : Verdict::Fail, 0.0,
                       match ? "dimension and alpha agree" : "dimension or alpha differ from the model"});
  try {
    spec.validate();
    rep.items.push_back({"spec_valid", Verdict::Pass, spec.gamma, "gamma and beta in range"});
  } catch (const DomainError& e) {
    rep.items.push_back({"spec_valid", Verdict::Fail, spec.gamma, e.what()});
  }
  if (!rep.passed()) return rep;

  const double r_grid[] = {0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
  rep.gamma_fit = gamma_estimate(model.spectral(), r_grid).gamma;
  rep.items.push_back(growth_lower(model, "high_frequency_growth", model.alpha(), 1.0, 1e3, true));

  if (spec.side == Side::Upper) {
    rep.items.push_back(dominating_profile(model, spec.profile));
    rep.items.push_back(profile_doubling(spec.profile));
    rep.items.push_back(spectral_growth(spec, rep.gamma_fit));
    if (spec.regime == Regime::LargeT) {
      rep.items.push_back(tail_integrability(spec));
      rep.items.push_back(growth_lower(model, "low_frequency_growth", spec.beta, 1e-3, 1.0, false));
    }
  } else {
    rep.items.push_back(ball_lower_bound(model, spec));
    if (spec.regime == Regime::SmallT) {
      rep.items.push_back(small_ball_tail(model));
    } else {
      rep.items.push_back(tail_power(model, "tail_decay", spec.beta, 1e-4, 1e3));
      rep.items.push_back(growth_two_sided(model, spec.beta));
    }
  }
  polynomial_scope(model, rep);
  return rep;
}

std::string to_string(Side s) { return s == Side::Upper ? "upper" : "lower"; }
std::string to_string(Regime r) { return r == Regime::SmallT ? "small_t" : "large_t"; }
std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::NotCovered:
      return "NOT_COVERED";
  }
  return "?";
}

}  // namespace tsd
