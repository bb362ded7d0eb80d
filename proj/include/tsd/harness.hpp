#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsd/charexp.hpp"
#include "tsd/density.hpp"
#include "tsd/envelope.hpp"

namespace tsd {

struct ScanPoint {
  double t = 0.0;
  Point x;
  double p = 0.0;
  double env = 0.0;
  double ratio = 0.0;
  bool refined = false;  ///< from the second scan (grid N -> 2N, x-range doubled)
};

struct VerifyOptions {
  double refinement_threshold = 0.1;  ///< largest accepted relative change of the extreme ratio
  double floor = 1e-14;               ///< points with p below floor * max p are excluded
  PhiMethod method = PhiMethod::Tabulated;
  /// called with every field the scans invert
  std::function<void(const DensityField&)> on_field;
};

struct VerificationReport {
  std::string model_id;
  std::string spec_id;
  Side side = Side::Upper;
  Regime regime = Regime::SmallT;
  std::vector<ScanPoint> points;
  double ratio = 0.0;           ///< sup (upper) or inf (lower) of p / env on the first scan
  double ratio_refined = 0.0;   ///< the same on the second scan
  double refinement_delta = 0.0;  ///< |ratio_refined / ratio - 1|
  double slackness = 0.0;       ///< upper: inf of p / env, small when the envelope is loose
  std::size_t excluded_cone = 0;
  std::size_t excluded_floor = 0;
  HypothesisReport hypotheses;
  bool passed = false;
  std::string note;
};

/// t = 2^{-k}, k = n-1..0 (SmallT) or n log-spaced points in [2, 100] (LargeT).
std::vector<double> default_t_set(Regime regime, int n = 7);
/// x = 0 and n log-spaced radii in [lo, hi] along each spectral direction (cone directions for a
/// restricted lower spec; eight angles for a spectral density).
std::vector<Point> default_x_set(const LevyModel& model, const EnvelopeSpec& spec, int n = 24, double lo = 0.1,
                                 double hi = 20.0);

/// Grid used for the scans at time t covering |x| <= x_max: L >= 50 x_max (d = 1), the
/// automatic spacing, N a power of two. `refined` doubles N.
GridSpec scan_grid(const LevyModel& model, double t, double x_max, bool refined);

/// PreconditionError naming the first failing hypothesis.
VerificationReport verify_upper(const LevyModel& model, const EnvelopeSpec& spec, std::span<const double> t_set,
                                std::span<const Point> x_set, const VerifyOptions& opt = {});
VerificationReport verify_lower(const LevyModel& model, const EnvelopeSpec& spec, std::span<const double> t_set,
                                std::span<const Point> x_set, const VerifyOptions& opt = {});

struct DecompositionRow {
  double t = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  int order = 0;
  double defect = 0.0;          ///< sup |recomposed - direct| / sup direct
  double defect_refined = 0.0;  ///< the same with N doubled
  double mass_recomposed = 0.0;
  double mass_direct = 0.0;
  double overflow = 0.0;
  bool passed = false;
};

struct DecompositionOptions {
  double threshold = 1e-4;
  double tol = 1e-10;
  double eps = 0.0;  ///< 0: default_eps(model, t)
  std::optional<GridSpec> grid;
};

struct DecompositionReport {
  std::string model_id;
  std::vector<DecompositionRow> rows;
  double refinement_delta = 0.0;  ///< largest |defect_refined - defect|
  bool passed = false;
};

/// Recomposed vs directly inverted density for each t. d = 1 uses the series; d = 2 the transform.
DecompositionReport verify_decomposition(const LevyModel& model, std::span<const double> t_set,
                                         const DecompositionOptions& opt = {});

struct SuiteResult {
  int exit_code = 0;
  nlohmann::json report;
  std::vector<std::string> failures;
};

/// Suite document:
///   {"suite_schema": 1, "suite_id": str,
///    "models": {name: model document or path}, "specs": {name: envelope document or path},
///    "checks": [{"kind": "upper"|"lower", "model": name, "spec": name, "t": [..], "radii": [..]},
///               {"kind": "decomposition", "model": name, "t": [..], "threshold": 1e-4}],
///    "refinement_threshold": 0.1}
/// Paths resolve against `base_dir`. Writes report.json and one CSV per scan into `out_dir`;
/// exit code 0 iff every check passes.
SuiteResult run_suite(const nlohmann::json& suite, const std::filesystem::path& base_dir,
                      const std::filesystem::path& out_dir);
SuiteResult run_suite(const std::filesystem::path& suite_file, const std::filesystem::path& out_dir);

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const DecompositionReport& r);
nlohmann::json to_json(const HypothesisReport& r);

}  // namespace tsd
