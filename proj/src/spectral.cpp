#include "tsd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tsd/errors.hpp"
#include "tsd/quadrature.hpp"

namespace tsd {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double phi) {
  phi = std::fmod(phi, 2.0 * kPi);
  return phi < 0.0 ? phi + 2.0 * kPi : phi;
}

}  // namespace

Point unit2(double phi) {
  Point p(2);
  p << std::cos(phi), std::sin(phi);
  return p;
}

SpectralMeasure SpectralMeasure::atoms(std::vector<Point> directions, std::vector<double> weights) {
  if (directions.empty()) throw DomainError("spectral measure: no atoms");
  if (directions.size() != weights.size()) throw DomainError("spectral measure: directions/weights size mismatch");
  SpectralMeasure mu;
  mu.kind_ = SpectralKind::Atomic;
  mu.dim_ = static_cast<int>(directions.front().size());
  if (mu.dim_ < 1) throw DomainError("spectral measure: dimension must be >= 1");
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != mu.dim_) throw DomainError("spectral measure: mixed dimensions");
    if (std::abs(directions[i].norm() - 1.0) > 1e-12) throw DomainError("spectral measure: direction not on the unit sphere");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw DomainError("spectral measure: weights must be positive");
  }
  mu.dirs_ = std::move(directions);
  mu.weights_ = std::move(weights);
  mu.name_ = "atoms";
  mu.finish();
  return mu;
}

SpectralMeasure SpectralMeasure::symmetric_atoms(const std::vector<Point>& half, const std::vector<double>& weights) {
  std::vector<Point> dirs;
  std::vector<double> w;
  for (std::size_t i = 0; i < half.size(); ++i) {
    const Point u = half[i] / half[i].norm();
    dirs.push_back(u);
    dirs.push_back(-u);
    w.push_back(weights.at(i));
    w.push_back(weights.at(i));
  }
  return atoms(std::move(dirs), std::move(w));
}

SpectralMeasure SpectralMeasure::circle_density(std::function<double(double)> g, double g_max, std::string name) {
  if (!g) throw DomainError("spectral density: missing callable");
  if (!(g_max > 0.0)) throw DomainError("spectral density: g_max must be positive");
  SpectralMeasure mu;
  mu.kind_ = SpectralKind::Density;
  mu.dim_ = 2;
  mu.g_ = std::make_shared<const std::function<double(double)>>(std::move(g));
  mu.g_max_ = g_max;
  mu.name_ = std::move(name);
  mu.finish();
  return mu;
}

SpectralMeasure SpectralMeasure::uniform_circle(double total_mass) {
  if (!(total_mass > 0.0)) throw DomainError("uniform spectral density: mass must be positive");
  const double g = total_mass / (2.0 * kPi);
  auto mu = circle_density([g](double) { return g; }, g, "uniform");
  mu.uniform_ = true;
  return mu;
}

double SpectralMeasure::density(double phi) const {
  if (kind_ != SpectralKind::Density) return 0.0;
  return (*g_)(wrap_angle(phi));
}

double SpectralMeasure::integrate_angle(const std::function<double(double)>& f, std::span<const double> breakpoints) const {
  std::vector<double> pts{0.0, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi};
  for (double b : breakpoints) pts.push_back(wrap_angle(b));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), pts.end());
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  // absolute floor scaled by g: cancelling integrands (cos sin) have value 0
  opt.abs_tol = 1e-13 * std::max(g_max_, 1e-300);
  return integrate([&](double phi) { return f(phi) * (*g_)(phi); }, std::span<const double>(pts), opt).value;
}

void SpectralMeasure::finish() {
  moment_ = Eigen::MatrixXd::Zero(dim_, dim_);
  if (kind_ == SpectralKind::Atomic) {
    mass_ = 0.0;
    for (std::size_t i = 0; i < dirs_.size(); ++i) {
      mass_ += weights_[i];
      moment_ += weights_[i] * dirs_[i] * dirs_[i].transpose();
    }
    symmetric_ = true;
    for (std::size_t i = 0; i < dirs_.size() && symmetric_; ++i) {
      bool paired = false;
      for (std::size_t j = 0; j < dirs_.size(); ++j) {
        if ((dirs_[i] + dirs_[j]).norm() < 1e-12 && std::abs(weights_[i] - weights_[j]) <= 1e-12 * weights_[i]) {
          paired = true;
          break;
        }
      }
      symmetric_ = paired;
    }
  } else {
    mass_ = integrate_angle([](double) { return 1.0; });
    moment_(0, 0) = integrate_angle([](double p) { return std::cos(p) * std::cos(p); });
    moment_(1, 1) = integrate_angle([](double p) { return std::sin(p) * std::sin(p); });
    moment_(0, 1) = moment_(1, 0) = integrate_angle([](double p) { return std::cos(p) * std::sin(p); });
    symmetric_ = true;
    for (int k = 0; k < 64 && symmetric_; ++k) {
      const double phi = (k + 0.37) * kPi / 64.0;
      const double a = (*g_)(phi);
      const double b = (*g_)(phi + kPi);
      symmetric_ = std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
    }
  }
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw DomainError("spectral measure: total mass must be finite and positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment_);
  degenerate_ = eig.eigenvalues().minCoeff() < 1e-10;
}

double spectral_ball(const SpectralMeasure& mu, const Point& theta, double r) {
  if (mu.kind() == SpectralKind::Atomic) {
    double m = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if ((mu.directions()[i] - theta).norm() < r) m += mu.weights()[i];
    return m;
  }
  // chord of length r on the unit circle subtends half-angle 2 asin(r/2)
  const double phi0 = std::atan2(theta(1), theta(0));
  const double half = 2.0 * std::asin(std::min(1.0, 0.5 * r));
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-15;
  return integrate([&](double p) { return mu.density(p); }, phi0 - half, phi0 + half, opt).value;
}

GammaFit gamma_estimate(const SpectralMeasure& mu, std::span<const double> r_grid) {
  if (mu.size() == 0 && mu.kind() == SpectralKind::Atomic) throw DomainError("gamma_estimate: empty spectral measure");
  if (r_grid.size() < 4) throw DomainError("gamma_estimate: need at least 4 radii");
  for (double r : r_grid)
    if (!(r > 0.0 && r < 0.5)) throw DomainError("gamma_estimate: radii must lie in (0, 1/2)");

  std::vector<Point> candidates;
  if (mu.kind() == SpectralKind::Atomic) {
    candidates = mu.directions();
  } else {
    for (int k = 0; k < 180; ++k) candidates.push_back(unit2(k * kPi / 90.0));
  }

  const double n = static_cast<double>(r_grid.size());
  double best_slope = std::numeric_limits<double>::infinity();
  for (const auto& theta : candidates) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool ok = true;
    for (double r : r_grid) {
      const double m = spectral_ball(mu, theta, r);
      if (!(m > 0.0)) {
        ok = false;
        break;
      }
      const double x = std::log(r);
      const double y = std::log(m);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    if (!ok) continue;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    best_slope = std::min(best_slope, slope);
  }
  if (!std::isfinite(best_slope)) throw DomainError("gamma_estimate: spectral measure has no mass near any candidate");

  GammaFit fit;
  fit.raw_slope = best_slope;
  fit.gamma = std::clamp(1.0 + best_slope, 1.0, static_cast<double>(mu.dimension()));
  // numerical zero slope for atoms
  if (std::abs(best_slope) < 1e-12) fit.gamma = 1.0;
  for (const auto& theta : candidates)
    for (double r : r_grid) fit.c = std::max(fit.c, spectral_ball(mu, theta, r) / std::pow(r, fit.gamma - 1.0));
  return fit;
}

}  // namespace tsd
