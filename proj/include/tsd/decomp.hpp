#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsd/density.hpp"
#include "tsd/levy_model.hpp"

namespace tsd {

/// nu split at radius eps into the small-jump part (|y| < eps) and the bounded part
/// (|y| >= eps, total mass lambda).
class SplitMeasure {
 public:
  SplitMeasure(LevyModel model, double eps);

  const LevyModel& model() const noexcept { return model_; }
  double eps() const noexcept { return eps_; }
  double lambda() const noexcept { return lambda_; }

  /// d = 1 density of the bounded part at y (zero on (-eps, eps)).
  double bounded_density(double y) const;
  /// d = 1: \int_a^b of the bounded-part density, exact up to quadrature.
  double bounded_mass(double a, double b) const;
  /// Exponent of the small-jump part: \int_{|y|<eps} (1 - cos<xi,y>) nu(dy).
  double local_exponent(const Point& xi) const;
  double local_exponent(double xi) const;
  /// Transform of the bounded part: \int_{|y|>=eps} cos<xi,y> nu(dy).
  double bounded_transform(const Point& xi) const;
  double bounded_transform(double xi) const;

 private:
  LevyModel model_;
  double eps_;
  double lambda_;
};

SplitMeasure split(const LevyModel& model, double eps);

/// eps = t^{1/alpha} for t <= 1 and t^{1/beta} for t > 1.
double default_eps(const LevyModel& model, double t);

/// Grid suited to the small-jump semigroup at time t: extent a multiple of the jump scale,
/// cutoff with t Phi_eps(cutoff) >= 35.
GridSpec local_grid(const SplitMeasure& s, double t, double extent_factor = 32.0);

/// Density of the small-jump semigroup at time t.
DensityField local_density(const SplitMeasure& s, double t, const GridSpec& grid);

/// \int |x|^{2n} p_t^eps(x) dx from the grid (local_grid unless given), n in {1, 2, 3}.
/// GridError when the outer quarter of the grid carries more than 1% of the moment.
double local_moment(const SplitMeasure& s, double t, int n, std::optional<GridSpec> grid = std::nullopt);

/// Compound-Poisson law e^{-t lambda} sum_n t^n nu_bar^{n*} / n! on a d = 1 grid.
struct CompoundPoissonField {
  GridSpec grid;
  double t = 0.0;
  double lambda = 0.0;
  double atom_weight = 1.0;       ///< e^{-t lambda}, the mass at 0
  std::vector<double> ac;         ///< density of the absolutely continuous part on the grid
  double ac_mass = 0.0;           ///< h sum ac
  int order = 0;                  ///< series truncated after this many convolution powers
  double tail_bound = 0.0;        ///< Poisson mass of the omitted terms
  double overflow = 0.0;          ///< estimated mass escaping [-L, L]
  std::vector<double> nu_hat;     ///< bounded-part transform at xi_k, k = 0..N/2
  std::vector<double> ac_spectrum;  ///< transform of the a.c. part at xi_k
};

/// Smallest N with e^{-mean} sum_{n>N} mean^n / n! < tol.
int poisson_order(double mean, double tol);

/// Series assembled in the frequency domain. The n = 1 term is placed on the grid as exact cell
/// averages of the bounded-part density; n >= 2 terms come from the inverse transform.
/// GridError when the estimated overflow exceeds `max_overflow`.
CompoundPoissonField compound_poisson(const SplitMeasure& s, double t, const GridSpec& grid, double tol = 1e-10,
                                      double max_overflow = 1e-2);

/// p_t = p_t^eps * Pbar_t, multiplied in the frequency domain and inverted on the shared grid.
DensityField recompose(const DensityField& local, const CompoundPoissonField& cp);

/// d = 2: the same product computed from the bounded-part transform directly.
DensityField recompose_spectral(const SplitMeasure& s, double t, const GridSpec& grid);

enum class BallRule { EpsThird, XOverFivePowN };

struct BallRow {
  int n = 0;
  double x = 0.0;
  double r = 0.0;
  BallRule rule = BallRule::EpsThird;
  bool admissible = true;
  double measured = 0.0;  ///< nu_bar^{n*}(B(x, r))
  double shape = 0.0;     ///< r (eps^{-alpha} q(eps))^{n-1} |x|^{-alpha-1} q(|x|)
  double ratio = 0.0;
};

/// Options for the spectral ball sum used for n >= 2.
struct BallOptions {
  double L = 0.0;       ///< 0: max(500, 20 max|x|)
  double cutoff = 0.0;  ///< 0: 400 / min(eps, 1)
};

/// nu_bar^{n*}(B(x, r)) for d = 1: exact for n = 1, periodized spectral sum for n >= 2.
double convolution_ball(const SplitMeasure& s, int n, double x, double r, const BallOptions& opt = {});

/// Ratio table over n = 1..n_max, x in x_set and both radius rules. d = 1, n_max <= 5.
std::vector<BallRow> convolution_ball_check(const SplitMeasure& s, int n_max, std::span<const double> x_set,
                                            const BallOptions& opt = {});

struct LocalLowerRow {
  double t = 0.0;
  double eps = 0.0;
  double p0 = 0.0;      ///< p_t^{eps}(0) with eps = a t^{1/alpha}
  double scaled = 0.0;  ///< t^{d/alpha} p0
};

/// t^{d/alpha} p_t^{a t^{1/alpha}}(0) over t_set.
std::vector<LocalLowerRow> local_lower_check(const LevyModel& model, double a, std::span<const double> t_set);

}  // namespace tsd
