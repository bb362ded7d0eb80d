#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tsd {

using Point = Eigen::VectorXd;

enum class SpectralKind { Atomic, Density };

/// Finite measure mu on the unit sphere S^{d-1}.
///
/// Atomic: directions theta_i with weights w_i.
/// Density: d = 2 only; g(phi) with respect to arc length, phi the polar angle.
class SpectralMeasure {
 public:
  static SpectralMeasure atoms(std::vector<Point> directions, std::vector<double> weights);
  /// Atoms {+theta_i, -theta_i}, each with weight w_i.
  static SpectralMeasure symmetric_atoms(const std::vector<Point>& half, const std::vector<double>& weights);
  /// Density on the circle; `g_max` bounds g and `name` identifies it in reports.
  static SpectralMeasure circle_density(std::function<double(double)> g, double g_max, std::string name);
  static SpectralMeasure uniform_circle(double total_mass);

  int dimension() const noexcept { return dim_; }
  SpectralKind kind() const noexcept { return kind_; }
  const std::vector<Point>& directions() const noexcept { return dirs_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return dirs_.size(); }

  double total_mass() const noexcept { return mass_; }
  bool symmetric() const noexcept { return symmetric_; }
  /// Support inside a proper linear subspace (smallest eigenvalue of the second-moment
  /// matrix below 1e-10).
  bool degenerate() const noexcept { return degenerate_; }
  /// \int theta theta^T mu(d theta)
  const Eigen::MatrixXd& second_moment_matrix() const noexcept { return moment_; }

  /// Density value g(phi) (Density kind).
  double density(double phi) const;
  double density_max() const noexcept { return g_max_; }
  const std::string& name() const noexcept { return name_; }
  /// Uniform density (constant g); enables radial shortcuts.
  bool is_uniform() const noexcept { return uniform_; }

  /// \int_0^{2 pi} f(phi) g(phi) dphi with breakpoints (Density kind).
  double integrate_angle(const std::function<double(double)>& f, std::span<const double> breakpoints = {}) const;

 private:
  SpectralMeasure() = default;
  void finish();

  int dim_ = 1;
  SpectralKind kind_ = SpectralKind::Atomic;
  std::vector<Point> dirs_;
  std::vector<double> weights_;
  std::shared_ptr<const std::function<double(double)>> g_;
  double g_max_ = 0.0;
  std::string name_;
  bool uniform_ = false;
  double mass_ = 0.0;
  bool symmetric_ = false;
  bool degenerate_ = false;
  Eigen::MatrixXd moment_;
};

struct GammaFit {
  double gamma = 1.0;  ///< fitted exponent, clamped to [1, d]
  double c = 0.0;      ///< max over the grid of mu(B(theta,r))/r^{gamma-1} at the worst theta
  double raw_slope = 0.0;
};

/// mu(B(theta, r) \cap S).
double spectral_ball(const SpectralMeasure& mu, const Point& theta, double r);

/// Least-squares fit of log mu(B(theta,r)) against log r at the worst theta.
/// r_grid must lie in (0, 1/2) with at least 4 points.
GammaFit gamma_estimate(const SpectralMeasure& mu, std::span<const double> r_grid);

/// Unit vector at polar angle phi (d = 2).
Point unit2(double phi);

}  // namespace tsd
