#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tsd {

enum class ProfileKind { Constant, PolyTempered, ExpTempered, Truncated, Relativistic, Custom };

enum class TailClass { Heavy, Polynomial, Exponential, Compact };

struct DoublingInfo {
  double K = 1.0;    ///< sup of q(s)/q(2s) over the sampled range
  double eta = 0.0;  ///< log2(K)
};

/// Radial tempering profile q(s) multiplying the stable radial density s^{-1-alpha}.
///
/// Kinds:
///  - Constant{value}          q = value
///  - PolyTempered{m}          q = (1+s)^{-m}
///  - ExpTempered{a, c1, c2}   q = (1+s)^a e^{-c2 s}; (c1 >= c2) is the lower rate of the class
///  - Truncated{s0}            q = 1 on (0, s0], 0 beyond
///  - Relativistic{d, alpha, m} q = K_{d,alpha}(m^{1/alpha} s)
///  - Custom                   user callable
class RadialProfile {
 public:
  static RadialProfile constant(double value = 1.0);
  static RadialProfile poly_tempered(double m);
  static RadialProfile exp_tempered(double a, double c1, double c2);
  static RadialProfile truncated(double s0);
  static RadialProfile relativistic(int d, double alpha, double mass = 1.0);
  /// `doubling` declares that q(s) <= K q(2s) holds; `beta_hint` (if > 0) is reported as the
  /// tail exponent; `scale` is a characteristic length used as a quadrature breakpoint.
  static RadialProfile custom(std::function<double(double)> q, std::string name, bool doubling,
                              double beta_hint = 0.0, double scale = 1.0);

  /// q(s) without argument checking (s > 0 assumed).
  double operator()(double s) const;

  ProfileKind kind() const noexcept { return kind_; }
  TailClass tail_class() const noexcept;
  const std::string& name() const noexcept { return name_; }

  double value() const noexcept { return p0_; }  ///< Constant
  double m() const noexcept { return p0_; }      ///< PolyTempered
  double a() const noexcept { return p0_; }      ///< ExpTempered
  double c1() const noexcept { return p1_; }     ///< ExpTempered
  double c2() const noexcept { return p2_; }     ///< ExpTempered
  double s0() const noexcept { return p0_; }     ///< Truncated
  int rel_dimension() const noexcept { return rel_d_; }
  double rel_alpha() const noexcept { return p0_; }
  double rel_mass() const noexcept { return p1_; }

  bool declares_doubling() const noexcept;
  /// Doubling constant on [1e-3, 1e3], cached at construction for doubling profiles.
  const std::optional<DoublingInfo>& doubling() const noexcept { return doubling_; }

  /// End of the support (s0 for Truncated, +inf otherwise).
  double support_end() const noexcept;
  /// q(0+).
  double value_at_zero() const;
  /// Characteristic lengths where the profile bends; used as integration breakpoints.
  std::vector<double> knots() const;
  /// Whether \int_0^\infty s^{1-alpha} q(s) ds is finite.
  bool finite_second_moment(double alpha) const;

 private:
  RadialProfile() = default;
  void finish();

  ProfileKind kind_ = ProfileKind::Constant;
  std::string name_;
  double p0_ = 1.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  int rel_d_ = 0;
  bool custom_doubling_ = false;
  double beta_hint_ = 0.0;
  double scale_ = 1.0;
  std::shared_ptr<const std::function<double(double)>> fn_;
  std::optional<DoublingInfo> doubling_;
};

/// q(s); DomainError for s <= 0.
double profile_eval(const RadialProfile& q, double s);

/// K = max of q(s)/q(2s) over a log grid on [s_min, s_max]; eta = log2 K.
/// UnsupportedError if the profile vanishes on [s_min, 2 s_max].
DoublingInfo doubling_constant(const RadialProfile& q, double s_min, double s_max);

/// Tail index beta in [alpha, 2] for which \int_1^\infty s^{beta-alpha-1} q(s) ds < infinity.
double profile_beta(const RadialProfile& q, double alpha);

/// K_{d,alpha}(s) = s^{d+alpha} \int_0^\infty e^{-u} e^{-s^2/(4u)} u^{-(2+d+alpha)/2} du.
double relativistic_kernel(int d, double alpha, double s);

}  // namespace tsd
