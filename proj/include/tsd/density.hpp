#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsd/charexp.hpp"
#include "tsd/levy_model.hpp"

namespace tsd {

/// Uniform grid x_j = -L + j h, h = 2L/N, per axis; dual frequencies xi_k = k pi / L, |k| <= N/2.
struct GridSpec {
  int d = 1;
  double L = 10.0;
  std::size_t N = 1024;

  double h() const noexcept { return 2.0 * L / static_cast<double>(N); }
  /// Frequency cutoff pi / h.
  double cutoff() const noexcept { return 3.141592653589793 / h(); }
  double dxi() const noexcept { return 3.141592653589793 / L; }
  double x(std::size_t j) const noexcept { return -L + static_cast<double>(j) * h(); }
  /// DomainError unless N is a power of two >= 64, L > 0 and d in {1, 2}.
  void validate() const;
  /// Grid with N rounded up to a power of two covering [-L, L] at spacing <= h.
  static GridSpec from_spacing(int d, double L, double h);
};

/// p_t sampled on a grid. d = 2 values are row-major with index i0 * N + i1 (axis 0 first).
struct DensityField {
  GridSpec grid;
  double t = 0.0;
  std::vector<double> values;
  double mass = 0.0;
  double min_before_clip = 0.0;
  double aliasing_error = 0.0;
  double truncation_error = 0.0;
  /// t Phi(cutoff) below 35: the spectral tail may not be negligible.
  bool cutoff_warning = false;
  /// d = 1: transform samples F(xi_k), k = 0..N/2, kept for trigonometric interpolation.
  std::vector<double> spectrum;

  double max_value() const;
  /// max_j |p(x_j) - p(-x_j)|.
  double symmetry_defect() const;
  /// d = 1 value off the grid (trigonometric interpolant of the transform samples).
  double at(double x) const;
  /// d = 2 value off the grid (bicubic Catmull-Rom, periodic).
  double at(const Point& x) const;
};

/// Real, even transform F(xi) of a probability density; F(0) = 1.
using Transform1 = std::function<double(double)>;
using Transform2 = std::function<double(const Point&)>;

/// Inverts sampled transforms. Samples are zeroed once F has dropped below e^{-45} and stays
/// there (`monotone_tail`), so expensive exponents are not evaluated in the far field.
DensityField invert_transform(const GridSpec& grid, double t, const Transform1& F, bool monotone_tail = true);
DensityField invert_transform(const GridSpec& grid, double t, const Transform2& F);
/// d = 1 inversion of precomputed samples F(k pi / L), k = 0..N/2.
DensityField invert_samples(const GridSpec& grid, double t, std::vector<double> samples);

/// Default grid for p_t: L from the scale t^{1/alpha}, the variance and the aliasing bound;
/// cutoff from t Phi(cutoff) >= 35. N is capped at 2^22 (d = 1) or 2^10 (d = 2).
GridSpec auto_grid(const LevyModel& model, double t);

/// p_t on the grid by discrete Fourier inversion of e^{-t Phi}.
DensityField invert(const LevyModel& model, double t, const GridSpec& grid, PhiMethod method = PhiMethod::Auto);

/// p_t(x) for d = 1 by direct quadrature of (1/pi) \int_0^\infty cos(x xi) e^{-t Phi(xi)} dxi.
double density_at(const LevyModel& model, double t, double x);
/// Same with a prepared evaluator (the model must be one-dimensional).
double density_at(const PhiEvaluator& phi_eval, double t, double x);

struct DiagonalRow {
  double t = 0.0;
  double p0 = 0.0;
  double scaled_alpha = 0.0;  ///< p_t(0) t^{d/alpha}
  double scaled_beta = 0.0;   ///< p_t(0) t^{d/beta}
};

std::vector<DiagonalRow> on_diagonal_scan(const LevyModel& model, std::span<const double> t_set);

}  // namespace tsd
