#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsd/profile.hpp"
#include "tsd/spectral.hpp"

namespace tsd {

/// Symmetric Levy measure of spectral-radial form
///   nu(D) = \int_S \int_0^\infty 1_D(s theta) s^{-1-alpha} Q(theta, s) ds mu(d theta),
/// with Q(theta_i, s) = q_i(s) per atom (Atomic mu) or one shared q (either kind).
class LevyModel {
 public:
  /// `profiles` holds one shared profile, or one per atom.
  LevyModel(double alpha, SpectralMeasure spectral, std::vector<RadialProfile> profiles, std::string id = {});
  LevyModel(double alpha, SpectralMeasure spectral, RadialProfile profile, std::string id = {});

  /// Relativistic alpha-stable process with Phi(xi) = (|xi|^2 + m^{2/alpha})^{alpha/2} - m.
  static LevyModel relativistic(int d, double alpha, double mass = 1.0);
  /// d = 1 convenience: atoms {+1, -1} with weight w each.
  static LevyModel one_dimensional(double alpha, RadialProfile profile, double w = 1.0, std::string id = {});

  int dimension() const noexcept { return spectral_.dimension(); }
  double alpha() const noexcept { return alpha_; }
  const SpectralMeasure& spectral() const noexcept { return spectral_; }
  const std::string& id() const noexcept { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  bool shared_profile() const noexcept { return profiles_.size() == 1; }
  /// Profile attached to atom i (or the shared profile).
  const RadialProfile& profile(std::size_t i = 0) const noexcept { return profiles_[shared_profile() ? 0 : i]; }
  const std::vector<RadialProfile>& profiles() const noexcept { return profiles_; }

  bool is_pure_stable() const noexcept;
  bool is_relativistic() const noexcept { return relativistic_; }
  bool degenerate() const noexcept { return spectral_.degenerate(); }

  /// Tail index beta for the large-time regime (minimum over profiles).
  double beta() const noexcept { return beta_; }
  /// Whether \int |y|^2 nu(dy) < infinity.
  bool finite_second_moment() const noexcept;

 private:
  double alpha_;
  SpectralMeasure spectral_;
  std::vector<RadialProfile> profiles_;
  std::string id_;
  bool relativistic_ = false;
  double beta_ = 0.0;
};

/// nu(B(0,r)^c).
double nu_tail(const LevyModel& model, double r);

/// \int_{|y|<r} |y|^2 nu(dy).
double truncated_second_moment(const LevyModel& model, double r);

/// \int_{|y|<r} |y|^4 nu(dy).
double truncated_fourth_moment(const LevyModel& model, double r);

/// nu(B(x,r)); +infinity when the ball contains the origin.
/// `min_radius` restricts to |y| >= min_radius (the bounded part of the measure).
double nu_ball(const LevyModel& model, const Point& x, double r, double min_radius = 0.0);

/// Normalizing constant of the relativistic Levy density, C_{d,alpha} |y|^{-d-alpha} K_{d,alpha}(|y|).
double relativistic_constant(int d, double alpha);

}  // namespace tsd
