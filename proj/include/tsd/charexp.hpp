#pragma once

#include <memory>
#include <span>
#include <vector>

#include "tsd/levy_model.hpp"

namespace tsd {

enum class PhiMethod {
  Auto,       ///< closed forms where available, radial quadrature otherwise
  Quadrature,  ///< always integrate
  Tabulated    ///< like Auto, but d = 1 quadrature models are tabulated in |xi| (about 1e-7 relative)
};

struct ExponentEvaluation {
  Point xi;
  double value = 0.0;
  bool closed_form = false;
  double error = 0.0;
};

/// c_alpha = \int_0^\infty (1 - cos v) v^{-1-alpha} dv, by quadrature (cached per alpha).
double stable_constant(double alpha);

/// psi_q(u) = \int_0^\infty (1 - cos(u s)) s^{-1-alpha} q(s) ds.
double psi(const RadialProfile& q, double alpha, double u);

ExponentEvaluation phi(const LevyModel& model, const Point& xi, PhiMethod method = PhiMethod::Auto);

/// Repeated evaluation of Phi for grid fills. Pairs +-theta share one radial integral; for an
/// isotropic tempered model in d = 2 (and for d = 1 under Tabulated) Phi(|xi|) is tabulated once
/// in log-log coordinates and interpolated.
class PhiEvaluator {
 public:
  explicit PhiEvaluator(const LevyModel& model, PhiMethod method = PhiMethod::Auto);
  ~PhiEvaluator();
  PhiEvaluator(PhiEvaluator&&) noexcept;

  double operator()(const Point& xi) const;
  /// d = 1 shortcut.
  double operator()(double xi) const;

  const LevyModel& model() const noexcept { return *model_; }

 private:
  struct RadialTable;
  const LevyModel* model_;
  PhiMethod method_;
  // atoms whose mirror image comes later reuse its psi; -1 marks the representative
  std::vector<int> mirror_of_;
  std::unique_ptr<RadialTable> table_;
};

/// Directions x radii on a log scale (d = 1: xi > 0 only, by symmetry).
std::vector<Point> xi_grid(int d, double r_lo, double r_hi, int n_radii, int n_directions = 36);

/// inf over the grid of Phi(xi) / |xi|^exponent. DegeneracyError for degenerate models.
double check_lower_growth(const LevyModel& model, double exponent, std::span<const Point> xis);

struct TwoSidedRatio {
  double inf_ratio = 0.0;
  double sup_ratio = 0.0;
};

/// Ratios Phi(xi) / min(|xi|^2, |xi|^alpha) over the grid.
/// PreconditionError when the second moment of nu is infinite; DegeneracyError when the
/// directional second moment vanishes for some direction.
TwoSidedRatio check_two_sided(const LevyModel& model, std::span<const Point> xis);

}  // namespace tsd
