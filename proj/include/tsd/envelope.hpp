#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsd/levy_model.hpp"

namespace tsd {

enum class Side { Upper, Lower };
enum class Regime { SmallT, LargeT };

/// Directions where a lower envelope applies: finite directions (angular tolerance `tol`) and,
/// for d = 2, polar-angle arcs [a, b]. Both empty means everywhere.
struct DirectionSet {
  std::vector<Point> directions;
  std::vector<std::pair<double, double>> arcs;
  double tol = 1e-6;

  bool everywhere() const noexcept { return directions.empty() && arcs.empty(); }
  /// Whether x lies in the cone {r theta : r > 0, theta in the set}; x = 0 always does.
  bool contains(const Point& x) const;
};

struct EnvelopeSpec {
  std::string id;
  Side side = Side::Upper;
  Regime regime = Regime::SmallT;
  int d = 1;
  double alpha = 1.0;
  double gamma = 1.0;
  double beta = 2.0;  ///< LargeT only
  RadialProfile profile = RadialProfile::constant();
  DirectionSet cone;  ///< Lower only

  /// DomainError unless alpha in (0,2), gamma in [1,d] and (LargeT) beta in [alpha, 2].
  void validate() const;
  /// Time exponent scale: alpha for SmallT, beta for LargeT.
  double kappa() const noexcept { return regime == Regime::SmallT ? alpha : beta; }
};

/// min(t^{-d/k}, t^{1+(gamma-d)/k} |x|^{-alpha-gamma} q(|x|)), k = alpha (SmallT) or beta (LargeT).
/// All take t in (0,1] for SmallT and t > 1 for LargeT, RegimeError otherwise.
double env_upper_small_t(const EnvelopeSpec& spec, double t, const Point& x);
/// nullopt outside the cone.
std::optional<double> env_lower_small_t(const EnvelopeSpec& spec, double t, const Point& x);
/// nullopt when \int_1^\infty s^{beta-alpha-1} q(s) ds diverges for the spec's profile.
std::optional<double> env_upper_large_t(const EnvelopeSpec& spec, double t, const Point& x);
/// nullopt outside the cone.
std::optional<double> env_lower_large_t(const EnvelopeSpec& spec, double t, const Point& x);
/// Dispatch on side and regime.
std::optional<double> envelope(const EnvelopeSpec& spec, double t, const Point& x);

/// t^{-d/k} (1 + t^{-1/k} |x|)^{-alpha-gamma} q(|x|), the product form of the same bound.
double env_product_form(const EnvelopeSpec& spec, double t, const Point& x);

enum class Verdict { Pass, Fail, NotCovered };

struct HypothesisItem {
  std::string name;
  Verdict verdict = Verdict::Pass;
  double constant = 0.0;  ///< fitted constant (inf or sup of the tested ratio)
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisItem> items;
  double gamma_fit = 1.0;

  /// No item failed (NotCovered items do not count against).
  bool passed() const;
  const HypothesisItem* first_failure() const;
};

/// Numerical check of the conditions behind the envelope for this model. Report only.
HypothesisReport hypothesis_check(const LevyModel& model, const EnvelopeSpec& spec);

std::string to_string(Side s);
std::string to_string(Regime r);
std::string to_string(Verdict v);

}  // namespace tsd
