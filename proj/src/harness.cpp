#include "tsd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>

#include "tsd/decomp.hpp"
#include "tsd/errors.hpp"
#include "tsd/model_io.hpp"
#include "tsd/version.hpp"

namespace tsd {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t next_pow2(double x) {
  std::size_t n = 64;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

double sup_rel_diff(const DensityField& a, const DensityField& b) {
  double diff = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) diff = std::max(diff, std::abs(a.values[j] - b.values[j]));
  return diff / b.max_value();
}

VerificationReport verify(const LevyModel& model, const EnvelopeSpec& spec, std::span<const double> t_set,
                          std::span<const Point> x_set, const VerifyOptions& opt, Side side) {
  const char* who = side == Side::Upper ? "verify_upper" : "verify_lower";
  if (spec.side != side) throw DomainError(std::string(who) + ": envelope spec has the other side");
  if (t_set.empty() || x_set.empty()) throw DomainError(std::string(who) + ": empty scan");
  VerificationReport rep;
  rep.model_id = model.id();
  rep.spec_id = spec.id;
  rep.side = side;
  rep.regime = spec.regime;
  rep.hypotheses = hypothesis_check(model, spec);
  if (const auto* bad = rep.hypotheses.first_failure())
    throw PreconditionError(std::string(who) + ": hypothesis '" + bad->name + "' failed (" + bad->detail + ")");

  double x_max = 0.0;
  for (const auto& x : x_set) {
    if (x.size() != model.dimension()) throw DomainError(std::string(who) + ": scan point dimension mismatch");
    x_max = std::max(x_max, x.norm());
  }
  std::vector<Point> extended(x_set.begin(), x_set.end());
  for (const auto& x : x_set)
    if (x.norm() > 0.0) extended.push_back(2.0 * x);

  const bool upper = side == Side::Upper;
  double extreme[2] = {upper ? 0.0 : kInf, upper ? 0.0 : kInf};
  rep.slackness = kInf;
  for (double t : t_set) {
    for (int pass = 0; pass < 2; ++pass) {
      const bool refined = pass == 1;
      const auto grid = scan_grid(model, t, 2.0 * std::max(x_max, 1e-3), refined);
      const auto field = invert(model, t, grid, opt.method);
      if (opt.on_field) opt.on_field(field);
      const double floor = opt.floor * field.max_value();
      const std::span<const Point> xs = refined ? std::span<const Point>(extended) : x_set;
      for (const auto& x : xs) {
        const auto env = envelope(spec, t, x);
        if (!env) {
          if (!refined) ++rep.excluded_cone;
          continue;
        }
        const double p = grid.d == 1 ? field.at(x(0)) : field.at(x);
        if (p < floor) {
          ++rep.excluded_floor;
          continue;
        }
        const double ratio = *env > 0.0 ? p / *env : kInf;
        rep.points.push_back({t, x, p, *env, ratio, refined});
        extreme[pass] = upper ? std::max(extreme[pass], ratio) : std::min(extreme[pass], ratio);
        if (!refined) rep.slackness = std::min(rep.slackness, ratio);
      }
    }
  }
  rep.ratio = extreme[0];
  rep.ratio_refined = extreme[1];
  const bool finite = std::isfinite(rep.ratio) && rep.ratio > 0.0 && std::isfinite(rep.ratio_refined);
  rep.refinement_delta = finite ? std::abs(rep.ratio_refined / rep.ratio - 1.0) : kInf;
  rep.passed = finite && rep.refinement_delta < opt.refinement_threshold;
  if (!finite) rep.note = "ratio not finite and positive";
  else if (!rep.passed) rep.note = "ratio moved under refinement";
  if (!upper) rep.slackness = rep.ratio;
  return rep;
}

std::string csv_name(std::size_t index, const std::string& model, const std::string& spec) {
  std::string s = std::to_string(index) + "_" + model + (spec.empty() ? "" : "_" + spec);
  for (auto& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) c = '_';
  return s + ".csv";
}

void write_scan_csv(const VerificationReport& r, int d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << std::setprecision(17) << "t," << (d == 1 ? "x" : "x0,x1") << ",p,env,ratio,refined\n";
  for (const auto& pt : r.points) {
    out << pt.t;
    for (int i = 0; i < d; ++i) out << ',' << pt.x(i);
    out << ',' << pt.p << ',' << pt.env << ',' << pt.ratio << ',' << (pt.refined ? 1 : 0) << '\n';
  }
}

void write_decomposition_csv(const DecompositionReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << std::setprecision(17) << "t,eps,lambda,order,defect,defect_refined,mass_recomposed,mass_direct,overflow\n";
  for (const auto& row : r.rows)
    out << row.t << ',' << row.eps << ',' << row.lambda << ',' << row.order << ',' << row.defect << ','
        << row.defect_refined << ',' << row.mass_recomposed << ',' << row.mass_direct << ',' << row.overflow << '\n';
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<double> default_t_set(Regime regime, int n) {
  if (n < 1) throw DomainError("default_t_set: n must be positive");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    if (regime == Regime::SmallT) out.push_back(std::pow(2.0, -(n - 1 - i)));
    else out.push_back(n == 1 ? 2.0 : 2.0 * std::pow(50.0, static_cast<double>(i) / (n - 1)));
  }
  return out;
}

std::vector<Point> default_x_set(const LevyModel& model, const EnvelopeSpec& spec, int n, double lo, double hi) {
  const int d = model.dimension();
  std::vector<Point> dirs;
  if (spec.side == Side::Lower && !spec.cone.everywhere()) {
    for (const auto& th : spec.cone.directions) dirs.push_back(th.normalized());
    for (const auto& [a, b] : spec.cone.arcs) dirs.push_back(unit2(0.5 * (a + b)));
  } else if (model.spectral().kind() == SpectralKind::Atomic) {
    dirs = model.spectral().directions();
  } else {
    for (int k = 0; k < 8; ++k) dirs.push_back(unit2(kPi * k / 8.0));
  }
  std::vector<Point> out{Point::Zero(d)};
  for (const auto& th : dirs)
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)) * th);
  return out;
}

GridSpec scan_grid(const LevyModel& model, double t, double x_max, bool refined) {
  const int d = model.dimension();
  const GridSpec base = auto_grid(model, t);
  double L = std::max({10.0 * std::pow(t, 1.0 / model.alpha()), 10.0, d == 1 ? 50.0 * x_max : 1.25 * x_max});
  if (model.finite_second_moment())
    L = std::max(L, 10.0 * std::sqrt(t * truncated_second_moment(model, std::numeric_limits<double>::infinity())));
  const std::size_t cap = d == 1 ? (std::size_t{1} << 21) : std::size_t{512};
  std::size_t N = std::min(cap, next_pow2(2.0 * L / base.h()));
  if (refined) N *= 2;
  GridSpec g{d, L, N};
  g.validate();
  return g;
}

VerificationReport verify_upper(const LevyModel& model, const EnvelopeSpec& spec, std::span<const double> t_set,
                                std::span<const Point> x_set, const VerifyOptions& opt) {
  return verify(model, spec, t_set, x_set, opt, Side::Upper);
}

VerificationReport verify_lower(const LevyModel& model, const EnvelopeSpec& spec, std::span<const double> t_set,
                                std::span<const Point> x_set, const VerifyOptions& opt) {
  return verify(model, spec, t_set, x_set, opt, Side::Lower);
}

DecompositionReport verify_decomposition(const LevyModel& model, std::span<const double> t_set,
                                         const DecompositionOptions& opt) {
  DecompositionReport rep;
  rep.model_id = model.id();
  rep.passed = true;
  const int d = model.dimension();
  for (double t : t_set) {
    DecompositionRow row;
    row.t = t;
    row.eps = opt.eps > 0.0 ? opt.eps : default_eps(model, t);
    const auto s = split(model, row.eps);
    row.lambda = s.lambda();
    GridSpec grid;
    if (opt.grid) {
      grid = *opt.grid;
    } else {
      grid = scan_grid(model, t, 0.0, false);
      if (d == 2) grid.N = std::min<std::size_t>(grid.N, 256);
    }
    for (int pass = 0; pass < 2; ++pass) {
      GridSpec g = grid;
      if (pass == 1) g.N *= 2;
      const auto direct = invert(model, t, g);
      DensityField rec;
      if (d == 1) {
        const auto local = local_density(s, t, g);
        const auto cp = compound_poisson(s, t, g, opt.tol, 1.0);
        rec = recompose(local, cp);
        if (pass == 0) {
          row.order = cp.order;
          row.overflow = cp.overflow;
        }
      } else {
        rec = recompose_spectral(s, t, g);
      }
      const double defect = sup_rel_diff(rec, direct);
      if (pass == 0) {
        row.defect = defect;
        row.mass_recomposed = rec.mass;
        row.mass_direct = direct.mass;
      } else {
        row.defect_refined = defect;
      }
    }
    row.passed = row.defect <= opt.threshold && row.defect_refined <= opt.threshold;
    rep.passed = rep.passed && row.passed;
    rep.refinement_delta = std::max(rep.refinement_delta, std::abs(row.defect_refined - row.defect));
    rep.rows.push_back(row);
  }
  return rep;
}

json to_json(const HypothesisReport& r) {
  json items = json::array();
  for (const auto& it : r.items)
    items.push_back({{"name", it.name}, {"verdict", to_string(it.verdict)}, {"constant", finite_or_null(it.constant)},
                     {"detail", it.detail}});
  return {{"gamma_fit", r.gamma_fit}, {"passed", r.passed()}, {"items", items}};
}

json to_json(const VerificationReport& r) {
  json j{{"kind", to_string(r.side)},
         {"model", r.model_id},
         {"spec", r.spec_id},
         {"regime", to_string(r.regime)},
         {r.side == Side::Upper ? "sup_ratio" : "inf_ratio", finite_or_null(r.ratio)},
         {"ratio_refined", finite_or_null(r.ratio_refined)},
         {"refinement_delta", finite_or_null(r.refinement_delta)},
         {"excluded_cone", r.excluded_cone},
         {"excluded_floor", r.excluded_floor},
         {"points", r.points.size()},
         {"hypotheses", to_json(r.hypotheses)},
         {"verdict", r.passed ? "PASS" : "FAIL"}};
  if (r.side == Side::Upper) j["slackness"] = finite_or_null(r.slackness);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const DecompositionReport& r) {
  json rows = json::array();
  double worst = 0.0;
  for (const auto& row : r.rows) {
    worst = std::max({worst, row.defect, row.defect_refined});
    rows.push_back({{"t", row.t}, {"eps", row.eps}, {"lambda", row.lambda}, {"order", row.order},
                    {"defect", row.defect}, {"defect_refined", row.defect_refined},
                    {"mass_recomposed", row.mass_recomposed}, {"mass_direct", row.mass_direct},
                    {"overflow", row.overflow}, {"verdict", row.passed ? "PASS" : "FAIL"}});
  }
  return {{"kind", "decomposition"}, {"model", r.model_id}, {"max_defect", worst},
          {"refinement_delta", r.refinement_delta}, {"rows", rows}, {"verdict", r.passed ? "PASS" : "FAIL"}};
}

SuiteResult run_suite(const json& suite, const std::filesystem::path& base_dir, const std::filesystem::path& out_dir) {
  if (!suite.is_object()) throw DomainError("suite must be a JSON object");
  if (suite.value("suite_schema", 0) != 1) throw DomainError("unsupported suite_schema (expected 1)");
  std::filesystem::create_directories(out_dir);

  auto resolve = [&](const json& entry) {
    return entry.is_string() ? read_json(base_dir / entry.get<std::string>()) : entry;
  };
  const json model_docs = suite.value("models", json::object());
  const json spec_docs = suite.value("specs", json::object());
  const json checks = suite.value("checks", json::array());
  std::map<std::string, LevyModel> models;
  for (const auto& [name, entry] : model_docs.items()) {
    auto m = model_from_json(resolve(entry));
    if (m.id().empty()) m.set_id(name);
    models.emplace(name, std::move(m));
  }
  std::map<std::string, EnvelopeSpec> specs;
  for (const auto& [name, entry] : spec_docs.items()) {
    auto s = envelope_from_json(resolve(entry));
    if (s.id.empty()) s.id = name;
    specs.emplace(name, std::move(s));
  }

  SuiteResult out;
  json results = json::array();
  VerifyOptions vopt;
  vopt.refinement_threshold = suite.value("refinement_threshold", 0.1);
  std::size_t index = 0;
  for (const auto& check : checks) {
    ++index;
    const std::string kind = check.value("kind", std::string{});
    const std::string model_name = check.value("model", std::string{});
    json entry{{"kind", kind}, {"model", model_name}};
    try {
      const auto mit = models.find(model_name);
      if (mit == models.end()) throw DomainError("unknown model '" + model_name + "'");
      const auto& model = mit->second;
      if (kind == "decomposition") {
        DecompositionOptions dopt;
        dopt.threshold = check.value("threshold", 1e-4);
        const auto ts = check.at("t").get<std::vector<double>>();
        const auto rep = verify_decomposition(model, ts, dopt);
        entry = to_json(rep);
        const auto file = csv_name(index, model_name, "");
        write_decomposition_csv(rep, out_dir / file);
        entry["csv"] = file;
      } else if (kind == "upper" || kind == "lower") {
        const std::string spec_name = check.value("spec", std::string{});
        entry["spec"] = spec_name;
        const auto sit = specs.find(spec_name);
        if (sit == specs.end()) throw DomainError("unknown spec '" + spec_name + "'");
        const auto& spec = sit->second;
        const auto ts = check.contains("t") ? check["t"].get<std::vector<double>>() : default_t_set(spec.regime);
        std::vector<Point> xs;
        if (check.contains("radii")) {
          const auto radii = check["radii"].get<std::vector<double>>();
          for (const auto& x : default_x_set(model, spec, 1, 1.0, 1.0)) {
            if (x.norm() == 0.0) {
              xs.push_back(x);
              continue;
            }
            for (double r : radii) xs.push_back(r * x);
          }
        } else {
          xs = default_x_set(model, spec);
        }
        const auto rep = kind == "upper" ? verify_upper(model, spec, ts, xs, vopt) : verify_lower(model, spec, ts, xs, vopt);
        entry = to_json(rep);
        entry["model"] = model_name;
        entry["spec"] = spec_name;
        const auto file = csv_name(index, model_name, spec_name);
        write_scan_csv(rep, model.dimension(), out_dir / file);
        entry["csv"] = file;
      } else {
        throw DomainError("unknown check kind '" + kind + "'");
      }
    } catch (const std::exception& e) {
      entry["verdict"] = "FAIL";
      entry["note"] = e.what();
    }
    if (entry["verdict"] != "PASS")
      out.failures.push_back(kind + " " + model_name + (entry.contains("spec") ? " " + entry["spec"].get<std::string>() : "") +
                             (entry.contains("note") ? ": " + entry["note"].get<std::string>() : ""));
    results.push_back(entry);
  }
  out.report = {{"suite_id", suite.value("suite_id", std::string{})}, {"toolkit_version", kToolkitVersion},
                {"results", results}};
  out.exit_code = out.failures.empty() ? 0 : 1;
  std::ofstream rep(out_dir / "report.json");
  if (!rep) throw DomainError("cannot write " + (out_dir / "report.json").string());
  rep << out.report.dump(2) << '\n';
  return out;
}

SuiteResult run_suite(const std::filesystem::path& suite_file, const std::filesystem::path& out_dir) {
  return run_suite(read_json(suite_file), suite_file.parent_path(), out_dir);
}

}  // namespace tsd
