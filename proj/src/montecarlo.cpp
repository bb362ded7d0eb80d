#include "tsd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <thread>

#include "tsd/errors.hpp"
#include "tsd/quadrature.hpp"
#include "tsd/radial.hpp"

namespace tsd {

namespace {

constexpr std::size_t kBlock = 4096;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unit_open(std::mt19937_64& rng) {
  // (0, 1]
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// \int_0^eps s^{2-alpha} q(s) ds
double inner_third_moment(const RadialProfile& q, double alpha, double eps) {
  auto f = [&](double s) { return std::pow(s, 2.0 - alpha) * q(s); };
  return integrate(f, 0.0, eps, radial::default_options()).value;
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("sampler: t must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("sampler: eps must be positive");
  if (count < 1) throw DomainError("sampler: count must be at least 1");
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return std::mt19937_64(seq);
}

IncrementSampler::IncrementSampler(const LevyModel& model, const SamplerConfig& config)
    : model_(&model), config_(config) {
  config.validate();
  const auto& mu = model.spectral();
  const int d = model.dimension();
  const double a = model.alpha();
  const double eps = config.eps;
  cov_ = Eigen::MatrixXd::Zero(d, d);
  if (mu.kind() == SpectralKind::Atomic) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto& q = model.profile(i);
      atom_tail_.push_back(mu.weights()[i] * radial::tail(q, a, eps));
      const auto& th = mu.directions()[i];
      cov_ += mu.weights()[i] * radial::inner_second_moment(q, a, eps) * th * th.transpose();
    }
  } else {
    atom_tail_.push_back(mu.total_mass() * radial::tail(model.profile(0), a, eps));
    cov_ = mu.second_moment_matrix() * radial::inner_second_moment(model.profile(0), a, eps);
  }
  for (double v : atom_tail_) lambda_ += v;
  if (lambda_ > 0.0) atom_pick_ = std::discrete_distribution<std::size_t>(atom_tail_.begin(), atom_tail_.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
  chol_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

std::size_t IncrementSampler::pick_atom(std::mt19937_64& rng) { return atom_pick_(rng); }

Point IncrementSampler::direction(std::mt19937_64& rng, std::size_t atom) {
  const auto& mu = model_->spectral();
  if (mu.kind() == SpectralKind::Atomic) return mu.directions()[atom];
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double phi = kTwoPi * u(rng);
    if (u(rng) * mu.density_max() <= mu.density(phi)) return unit2(phi);
  }
}

double IncrementSampler::radius(std::mt19937_64& rng, std::size_t atom) {
  const auto& q = model_->profile(atom);
  const double eps = config_.eps;
  const double q_eps = q(eps);
  if (!(q_eps > 0.0)) throw DomainError("sampler: no mass beyond eps");
  const double inv_a = -1.0 / model_->alpha();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < 100000000; ++k) {
    ++proposals_;
    const double s = eps * std::pow(unit_open(rng), inv_a);
    if (u(rng) * q_eps <= q(s)) {
      ++accepted_;
      return s;
    }
  }
  throw NumericError("sampler: rejection step did not accept", eps, 0.0);
}

Point IncrementSampler::jump(std::mt19937_64& rng) {
  const std::size_t atom = pick_atom(rng);
  return radius(rng, atom) * direction(rng, atom);
}

Point IncrementSampler::big_jump_sum(std::mt19937_64& rng, std::size_t* jumps) {
  Point sum = Point::Zero(model_->dimension());
  const double mean = config_.t * lambda_;
  std::size_t n = 0;
  if (mean > 0.0) n = std::poisson_distribution<std::size_t>(mean)(rng);
  for (std::size_t i = 0; i < n; ++i) sum += jump(rng);
  if (jumps) *jumps = n;
  return sum;
}

Point IncrementSampler::increment(std::mt19937_64& rng, std::size_t* jumps) {
  Point x = big_jump_sum(rng, jumps);
  if (config_.mode == SmallJumps::GaussianSubstitute) {
    std::normal_distribution<double> g;
    Point z(model_->dimension());
    for (int i = 0; i < z.size(); ++i) z(i) = g(rng);
    x += std::sqrt(config_.t) * (chol_ * z);
  }
  return x;
}

Point sample_big_jump_sum(const LevyModel& model, const SamplerConfig& config, std::mt19937_64& rng) {
  IncrementSampler s(model, config);
  return s.big_jump_sum(rng);
}

Point sample_increment(const LevyModel& model, const SamplerConfig& config, std::mt19937_64& rng) {
  IncrementSampler s(model, config);
  return s.increment(rng);
}

std::vector<double> SampleSet::coordinate(int axis) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[i * d + axis];
  return out;
}

SampleSet simulate(const LevyModel& model, const SamplerConfig& config, unsigned threads) {
  const IncrementSampler proto(model, config);
  const int d = model.dimension();
  SampleSet out;
  out.d = d;
  out.values.resize(config.count * d);
  out.jumps.resize(config.count);
  out.lambda = proto.lambda();

  const std::size_t blocks = (config.count + kBlock - 1) / kBlock;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
  std::atomic<std::size_t> next{0};
  std::vector<std::size_t> proposals(threads, 0), accepted(threads, 0);
  auto work = [&](unsigned w) {
    IncrementSampler s = proto;
    for (std::size_t b = next++; b < blocks; b = next++) {
      auto rng = stream_engine(config.seed, b);
      const std::size_t end = std::min(config.count, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) {
        const Point x = s.increment(rng, &out.jumps[i]);
        for (int k = 0; k < d; ++k) out.values[i * d + k] = x(k);
      }
    }
    proposals[w] = s.proposals();
    accepted[w] = s.accepted();
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  std::size_t np = 0, na = 0;
  for (unsigned w = 0; w < threads; ++w) {
    np += proposals[w];
    na += accepted[w];
  }
  out.acceptance_rate = np == 0 ? 1.0 : static_cast<double>(na) / static_cast<double>(np);

  if (config.mode == SmallJumps::GaussianSubstitute) {
    out.gaussian_variance = config.t * proto.small_jump_covariance().trace();
    const auto& mu = model.spectral();
    double third = 0.0;
    if (mu.kind() == SpectralKind::Atomic) {
      for (std::size_t i = 0; i < mu.size(); ++i)
        third += mu.weights()[i] * inner_third_moment(model.profile(i), model.alpha(), config.eps);
    } else {
      third = mu.total_mass() * inner_third_moment(model.profile(0), model.alpha(), config.eps);
    }
    if (out.gaussian_variance > 0.0) out.gaussian_error_proxy = config.t * third / std::pow(out.gaussian_variance, 1.5);
  }
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

ChiSquareResult chi_square(const std::vector<double>& counts, const std::vector<double>& probabilities) {
  if (counts.size() != probabilities.size() || counts.size() < 2) throw DomainError("chi_square: bad bins");
  double n = 0.0;
  for (double c : counts) n += c;
  ChiSquareResult r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * probabilities[i];
    if (!(e > 0.0)) throw DomainError("chi_square: empty expected bin");
    r.statistic += (counts[i] - e) * (counts[i] - e) / e;
  }
  r.dof = static_cast<int>(counts.size()) - 1;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

ChiSquareResult radius_fit(const LevyModel& model, double eps, std::size_t n, std::uint64_t seed, int bins) {
  if (!model.shared_profile()) throw UnsupportedError("radius_fit: needs one shared profile");
  if (bins < 2) throw DomainError("radius_fit: need at least two bins");
  const auto& q = model.profile(0);
  const double a = model.alpha();
  const double total = radial::tail(q, a, eps);
  std::vector<double> edges;
  for (int k = 0; k < bins; ++k) edges.push_back(eps * std::pow(1.0 - static_cast<double>(k) / bins, -1.0 / a));
  edges.push_back(radial::kInf);
  std::vector<double> probs;
  for (int k = 0; k < bins; ++k) probs.push_back(radial::segment(q, a, edges[k], edges[k + 1]) / total);
  // fold thin bins at the top into their neighbour
  while (probs.size() > 2 && probs.back() * static_cast<double>(n) < 5.0) {
    probs[probs.size() - 2] += probs.back();
    probs.pop_back();
    edges.erase(edges.end() - 2);
  }

  SamplerConfig cfg;
  cfg.eps = eps;
  cfg.seed = seed;
  IncrementSampler s(model, cfg);
  auto rng = stream_engine(seed, 0);
  std::vector<double> counts(probs.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.radius(rng, 0);
    const auto it = std::upper_bound(edges.begin(), edges.end(), r);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - edges.begin()) - 1, probs.size() - 1);
    counts[k] += 1.0;
  }
  return chi_square(counts, probs);
}

GridCdf::GridCdf(const DensityField& field) {
  if (field.grid.d != 1) throw UnsupportedError("GridCdf: d = 1 only");
  x0_ = field.grid.x(0);
  h_ = field.grid.h();
  p_ = field.values;
  cum_.resize(p_.size() + 1, 0.0);
  for (std::size_t j = 0; j < p_.size(); ++j) {
    const double next = j + 1 < p_.size() ? p_[j + 1] : p_[0];
    cum_[j + 1] = cum_[j] + 0.5 * h_ * (p_[j] + next);
  }
  left_ = 0.5 * (1.0 - cum_.back());
}

double GridCdf::operator()(double x) const {
  const double u = (x - x0_) / h_;
  if (u <= 0.0) return 0.0;
  const auto n = p_.size();
  if (u >= static_cast<double>(n)) return 1.0;
  const auto j = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(j);
  const double next = j + 1 < n ? p_[j + 1] : p_[0];
  return left_ + cum_[j] + h_ * (f * p_[j] + 0.5 * f * f * (next - p_[j]));
}

}  // namespace tsd
