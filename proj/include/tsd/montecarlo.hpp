#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tsd/density.hpp"
#include "tsd/levy_model.hpp"

namespace tsd {

enum class SmallJumps { Drop, GaussianSubstitute };

struct SamplerConfig {
  double t = 1.0;
  double eps = 0.01;
  SmallJumps mode = SmallJumps::GaussianSubstitute;
  std::size_t count = 100000;
  std::uint64_t seed = 1;

  /// DomainError unless t > 0, eps > 0 and count >= 1.
  void validate() const;
};

/// Engine for stream k of a run seeded with `seed`: mt19937_64 over seed_seq{lo32, hi32, k}.
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t k);

/// Draws jumps of the bounded part |y| >= eps and the Gaussian stand-in for the rest.
class IncrementSampler {
 public:
  IncrementSampler(const LevyModel& model, const SamplerConfig& config);

  const LevyModel& model() const noexcept { return *model_; }
  const SamplerConfig& config() const noexcept { return config_; }
  double lambda() const noexcept { return lambda_; }
  /// \int_{|y|<eps} y y^T nu(dy)
  const Eigen::MatrixXd& small_jump_covariance() const noexcept { return cov_; }

  /// One jump of the bounded part, normalized to a probability law.
  Point jump(std::mt19937_64& rng);
  /// Radius of one jump, density proportional to s^{-1-alpha} q(s) on (eps, inf) for the chosen atom.
  double radius(std::mt19937_64& rng, std::size_t atom = 0);
  /// Poisson(t lambda) many jumps, summed. `jumps` receives the count when given.
  Point big_jump_sum(std::mt19937_64& rng, std::size_t* jumps = nullptr);
  /// big_jump_sum plus the centered Gaussian with covariance t * small_jump_covariance (GaussianSubstitute).
  Point increment(std::mt19937_64& rng, std::size_t* jumps = nullptr);

  std::size_t proposals() const noexcept { return proposals_; }
  std::size_t accepted() const noexcept { return accepted_; }

 private:
  std::size_t pick_atom(std::mt19937_64& rng);
  Point direction(std::mt19937_64& rng, std::size_t atom);

  const LevyModel* model_;
  SamplerConfig config_;
  double lambda_ = 0.0;
  std::vector<double> atom_tail_;  ///< per atom: w_i \int_eps^inf s^{-1-alpha} q_i(s) ds
  std::discrete_distribution<std::size_t> atom_pick_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

Point sample_big_jump_sum(const LevyModel& model, const SamplerConfig& config, std::mt19937_64& rng);
Point sample_increment(const LevyModel& model, const SamplerConfig& config, std::mt19937_64& rng);

struct SampleSet {
  int d = 1;
  std::vector<double> values;       ///< count * d, row-major
  std::vector<std::size_t> jumps;   ///< jump count per sample
  double lambda = 0.0;
  double acceptance_rate = 1.0;
  double gaussian_variance = 0.0;   ///< trace of the small-jump covariance times t
  /// t \int_{|y|<eps} |y|^3 nu(dy) / (t trace)^{3/2}: size of the Gaussian stand-in error, heuristic.
  double gaussian_error_proxy = 0.0;

  std::size_t size() const noexcept { return jumps.size(); }
  /// Coordinate `axis` of every sample.
  std::vector<double> coordinate(int axis = 0) const;
};

/// `config.count` samples in blocks of 4096, block b drawn from stream_engine(seed, b).
/// Threads (0: hardware concurrency) take whole blocks, so the output does not depend on them.
SampleSet simulate(const LevyModel& model, const SamplerConfig& config, unsigned threads = 0);

/// sup_x |F_n(x) - F(x)|.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson statistic for counts against probabilities (which must sum to 1).
ChiSquareResult chi_square(const std::vector<double>& counts, const std::vector<double>& probabilities);

/// Goodness of fit of `n` sampled jump radii against the binned law of the bounded-part radius
/// (d = 1 or a single shared profile). Bins are equal-probability bins of the untempered Pareto law.
ChiSquareResult radius_fit(const LevyModel& model, double eps, std::size_t n, std::uint64_t seed, int bins = 20);

/// CDF of a d = 1 density field: trapezoidal cumulative sum on the grid, with the mass missing
/// from [-L, L] split evenly between the two tails.
class GridCdf {
 public:
  explicit GridCdf(const DensityField& field);
  double operator()(double x) const;

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  double left_ = 0.0;
  std::vector<double> cum_;
  std::vector<double> p_;
};

}  // namespace tsd
