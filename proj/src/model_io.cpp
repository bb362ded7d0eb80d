#include "tsd/model_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "tsd/errors.hpp"

namespace tsd {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw DomainError(std::string("missing or non-numeric field '") + key + "'");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::string text(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw DomainError(std::string("missing or non-string field '") + key + "'");
  return j[key].get<std::string>();
}

void check_schema(const json& j, const char* key, int version) {
  if (!j.is_object()) throw DomainError("document must be a JSON object");
  if (!j.contains(key)) throw DomainError(std::string("missing '") + key + "'");
  if (!j[key].is_number_integer() || j[key].get<int>() != version)
    throw DomainError(std::string("unsupported ") + key + " (expected " + std::to_string(version) + ")");
}

Point point(const json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw DomainError("vector of length d expected");
  Point p(d);
  for (int i = 0; i < d; ++i) {
    if (!j[i].is_number()) throw DomainError("vector entries must be numbers");
    p(i) = j[i].get<double>();
  }
  return p;
}

json point_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

int dimension(const json& j) {
  if (!j.contains("d") || !j["d"].is_number_integer()) throw DomainError("missing integer field 'd'");
  const int d = j["d"].get<int>();
  if (d != 1 && d != 2) throw DomainError("d must be 1 or 2");
  return d;
}

SpectralMeasure spectral_from_json(const json& j, int d) {
  const std::string type = text(j, "type");
  if (type == "atoms") {
    if (!j.contains("directions") || !j.contains("weights")) throw DomainError("atoms need directions and weights");
    std::vector<Point> dirs;
    for (const auto& e : j["directions"]) {
      Point p = point(e, d);
      if (p.norm() == 0.0) throw DomainError("zero direction");
      dirs.push_back(p / p.norm());
    }
    std::vector<double> w = j["weights"].get<std::vector<double>>();
    if (j.value("symmetrize", false)) return SpectralMeasure::symmetric_atoms(dirs, w);
    return SpectralMeasure::atoms(std::move(dirs), std::move(w));
  }
  if (type == "density") {
    if (d != 2) throw DomainError("spectral densities need d = 2");
    if (j.value("uniform", false)) {
      const double mass = number(j, "mass");
      if (!(mass > 0.0)) throw DomainError("density mass must be positive");
      return SpectralMeasure::uniform_circle(mass);
    }
    const auto a = j.value("cos", std::vector<double>{});
    const auto b = j.value("sin", std::vector<double>{});
    if (a.empty()) throw DomainError("density needs 'uniform' or 'cos' coefficients");
    double g_max = a[0];
    for (std::size_t k = 1; k < a.size(); ++k) g_max += std::abs(a[k]);
    for (double v : b) g_max += std::abs(v);
    auto g = [a, b](double phi) {
      double v = a[0];
      for (std::size_t k = 1; k < a.size(); ++k) v += a[k] * std::cos(2.0 * k * phi);
      for (std::size_t k = 0; k < b.size(); ++k) v += b[k] * std::sin(2.0 * (k + 1) * phi);
      return v;
    };
    for (int i = 0; i < 720; ++i)
      if (g(kPi * i / 360.0) < -1e-12) throw DomainError("density coefficients give a negative density");
    return SpectralMeasure::circle_density([g](double phi) { return std::max(0.0, g(phi)); }, g_max, "fourier");
  }
  throw DomainError("unknown spectral type '" + type + "'");
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

RadialProfile profile_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("profile must be an object");
  const std::string kind = text(j, "kind");
  if (kind == "constant") return RadialProfile::constant(number_or(j, "value", 1.0));
  if (kind == "poly_tempered") return RadialProfile::poly_tempered(number(j, "m"));
  if (kind == "exp_tempered") {
    const double c2 = number(j, "c2");
    return RadialProfile::exp_tempered(number_or(j, "a", 0.0), number_or(j, "c1", c2), c2);
  }
  if (kind == "truncated") return RadialProfile::truncated(number(j, "s0"));
  throw DomainError("unknown profile kind '" + kind + "'");
}

json profile_to_json(const RadialProfile& q) {
  switch (q.kind()) {
    case ProfileKind::Constant:
      return {{"kind", "constant"}, {"value", q.value()}};
    case ProfileKind::PolyTempered:
      return {{"kind", "poly_tempered"}, {"m", q.m()}};
    case ProfileKind::ExpTempered:
      return {{"kind", "exp_tempered"}, {"a", q.a()}, {"c1", q.c1()}, {"c2", q.c2()}};
    case ProfileKind::Truncated:
      return {{"kind", "truncated"}, {"s0", q.s0()}};
    case ProfileKind::Relativistic:
    case ProfileKind::Custom:
      break;
  }
  throw UnsupportedError("profile '" + q.name() + "' has no JSON form");
}

LevyModel model_from_json(const json& j) {
  check_schema(j, "model_schema", kModelSchema);
  const int d = dimension(j);
  const double alpha = number(j, "alpha");
  const std::string id = j.value("id", std::string{});
  if (j.contains("preset")) {
    const std::string preset = text(j, "preset");
    if (preset != "relativistic") throw DomainError("unknown preset '" + preset + "'");
    auto m = LevyModel::relativistic(d, alpha, number_or(j, "mass", 1.0));
    if (!id.empty()) m.set_id(id);
    return m;
  }
  if (!j.contains("spectral")) throw DomainError("missing 'spectral'");
  auto mu = spectral_from_json(j["spectral"], d);
  std::vector<RadialProfile> profiles;
  if (j.contains("profiles")) {
    for (const auto& p : j["profiles"]) profiles.push_back(profile_from_json(p));
  } else if (j.contains("profile")) {
    profiles.push_back(profile_from_json(j["profile"]));
  } else {
    throw DomainError("missing 'profile'");
  }
  return LevyModel(alpha, std::move(mu), std::move(profiles), id);
}

LevyModel load_model(const std::filesystem::path& path) {
  auto m = model_from_json(read_json(path));
  if (m.id().empty()) m.set_id(path.stem().string());
  return m;
}

json model_to_json(const LevyModel& model) {
  json j{{"model_schema", kModelSchema}, {"d", model.dimension()}, {"alpha", model.alpha()}};
  if (!model.id().empty()) j["id"] = model.id();
  if (model.is_relativistic()) {
    j["preset"] = "relativistic";
    j["mass"] = model.profile(0).rel_mass();
    return j;
  }
  const auto& mu = model.spectral();
  if (mu.kind() == SpectralKind::Atomic) {
    json dirs = json::array();
    for (const auto& th : mu.directions()) dirs.push_back(point_json(th));
    j["spectral"] = {{"type", "atoms"}, {"directions", dirs}, {"weights", mu.weights()}};
  } else if (mu.is_uniform()) {
    j["spectral"] = {{"type", "density"}, {"uniform", true}, {"mass", mu.total_mass()}};
  } else {
    throw UnsupportedError("non-uniform spectral densities have no JSON form");
  }
  if (model.shared_profile()) {
    j["profile"] = profile_to_json(model.profile(0));
  } else {
    json ps = json::array();
    for (const auto& q : model.profiles()) ps.push_back(profile_to_json(q));
    j["profiles"] = ps;
  }
  return j;
}

EnvelopeSpec envelope_from_json(const json& j) {
  check_schema(j, "envelope_schema", kEnvelopeSchema);
  EnvelopeSpec s;
  s.id = j.value("id", std::string{});
  s.d = dimension(j);
  s.alpha = number(j, "alpha");
  const std::string side = text(j, "side");
  if (side == "upper") s.side = Side::Upper;
  else if (side == "lower") s.side = Side::Lower;
  else throw DomainError("side must be 'upper' or 'lower'");
  const std::string regime = j.value("regime", std::string("small_t"));
  if (regime == "small_t") s.regime = Regime::SmallT;
  else if (regime == "large_t") s.regime = Regime::LargeT;
  else throw DomainError("regime must be 'small_t' or 'large_t'");
  s.beta = number_or(j, "beta", 2.0);
  if (j.contains("preset")) {
    if (text(j, "preset") != "relativistic_lower") throw DomainError("unknown envelope preset");
    s.profile = RadialProfile::exp_tempered(0.5 * (s.d + s.alpha - 1.0), 2.0, 2.0);
    s.gamma = s.d;
  } else {
    if (!j.contains("profile")) throw DomainError("missing 'profile'");
    s.profile = profile_from_json(j["profile"]);
    s.gamma = number_or(j, "gamma", 1.0);
  }
  if (j.contains("cone")) {
    const auto& c = j["cone"];
    for (const auto& e : c.value("directions", json::array())) s.cone.directions.push_back(point(e, s.d));
    for (const auto& e : c.value("arcs", json::array())) {
      if (!e.is_array() || e.size() != 2) throw DomainError("arcs are [start, end] pairs");
      s.cone.arcs.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    s.cone.tol = number_or(c, "tol", 1e-6);
  }
  s.validate();
  return s;
}

EnvelopeSpec load_envelope(const std::filesystem::path& path) {
  auto s = envelope_from_json(read_json(path));
  if (s.id.empty()) s.id = path.stem().string();
  return s;
}

json envelope_to_json(const EnvelopeSpec& s) {
  json j{{"envelope_schema", kEnvelopeSchema}, {"side", to_string(s.side)}, {"regime", to_string(s.regime)},
         {"d", s.d}, {"alpha", s.alpha}, {"gamma", s.gamma}, {"beta", s.beta}, {"profile", profile_to_json(s.profile)}};
  if (!s.id.empty()) j["id"] = s.id;
  if (!s.cone.everywhere()) {
    json dirs = json::array();
    for (const auto& th : s.cone.directions) dirs.push_back(point_json(th));
    json arcs = json::array();
    for (const auto& [a, b] : s.cone.arcs) arcs.push_back({a, b});
    j["cone"] = {{"directions", dirs}, {"arcs", arcs}, {"tol", s.cone.tol}};
  }
  return j;
}

}  // namespace tsd
