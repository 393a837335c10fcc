#pragma once

// Hamiltonian Monte Carlo with a fixed number of leapfrog steps, dual-averaging
// step-size adaptation and a diagonal metric estimated in warmup windows.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <exception>
#include <limits>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hawkes_hurdle/distributions.hpp"

namespace hh {

/// A log density over R^d with gradient, plus what the sampler needs to
/// start chains and report draws.
template <class T>
concept SamplerTarget = requires(const T& t, std::span<const double> u, std::span<double> g,
                                 std::mt19937_64& rng) {
  { t.dimension() } -> std::convertible_to<std::size_t>;
  { t.log_density(u, g) } -> std::convertible_to<double>;
  { t.initial_point(rng) } -> std::convertible_to<std::vector<double>>;
  { t.constrain(u) } -> std::convertible_to<std::vector<double>>;
  { t.parameter_names() } -> std::convertible_to<std::vector<std::string>>;
};

struct SamplerConfig {
  int chains = 4;
  int warmup_iters = 1000;
  int sampling_iters = 1000;
  int leapfrog_steps = 32;
  double target_acceptance = 0.8;
  std::uint64_t seed = 20240101;
  double step_jitter = 0.1;  // uniform relative jitter of the step size after warmup
  int max_init_attempts = 100;
  int threads = 1;

  void validate() const {
    if (chains < 1) throw std::invalid_argument("sampler: chains must be >= 1");
    if (warmup_iters < 0) throw std::invalid_argument("sampler: warmup_iters must be >= 0");
    if (sampling_iters < 1) throw std::invalid_argument("sampler: sampling_iters must be > 0");
    if (leapfrog_steps < 1) throw std::invalid_argument("sampler: leapfrog_steps must be > 0");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
      throw std::invalid_argument("sampler: target_acceptance must lie in (0, 1)");
    if (!(step_jitter >= 0.0 && step_jitter < 1.0))
      throw std::invalid_argument("sampler: step_jitter must lie in [0, 1)");
  }
};

struct ChainStats {
  double step_size = 0.0;
  double mean_acceptance = 0.0;  // sampling phase
  int divergences = 0;           // sampling phase
  std::vector<double> inverse_metric;
};

/// Constrained-space draws, one row-major (draws x dimension) matrix per chain.
struct PosteriorDraws {
  std::string label;
  std::vector<std::string> names;
  std::vector<std::vector<double>> chains;
  std::size_t draws_per_chain = 0;
  std::vector<ChainStats> stats;

  std::size_t dimension() const { return names.size(); }
  std::size_t chain_count() const { return chains.size(); }
  std::size_t total_draws() const { return chains.size() * draws_per_chain; }

  std::span<const double> draw(std::size_t chain, std::size_t s) const {
    return std::span<const double>(chains.at(chain)).subspan(s * dimension(), dimension());
  }
  double value(std::size_t chain, std::size_t s, std::size_t k) const {
    return chains[chain][s * dimension() + k];
  }
  /// All draws of parameter k, chains concatenated.
  std::vector<double> column(std::size_t k) const {
    std::vector<double> out;
    out.reserve(total_draws());
    for (std::size_t c = 0; c < chains.size(); ++c)
      for (std::size_t s = 0; s < draws_per_chain; ++s) out.push_back(value(c, s, k));
    return out;
  }
  std::vector<double> chain_column(std::size_t chain, std::size_t k) const {
    std::vector<double> out(draws_per_chain);
    for (std::size_t s = 0; s < draws_per_chain; ++s) out[s] = value(chain, s, k);
    return out;
  }
  std::size_t index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("no parameter named " + name);
    return static_cast<std::size_t>(it - names.begin());
  }
  int divergences() const {
    int n = 0;
    for (const auto& s : stats) n += s.divergences;
    return n;
  }
};

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point in phase space with cached log density and gradient.
struct PhasePoint {
  std::vector<double> position;
  std::vector<double> momentum;
  std::vector<double> gradient;
  double log_density = kNegInf;
};

inline double kinetic_energy(std::span<const double> momentum, std::span<const double> inv_metric) {
  double k = 0.0;
  for (std::size_t i = 0; i < momentum.size(); ++i)
    k += inv_metric[i] * momentum[i] * momentum[i];
  return 0.5 * k;
}

inline double hamiltonian(const PhasePoint& z, std::span<const double> inv_metric) {
  return -z.log_density + kinetic_energy(z.momentum, inv_metric);
}

/// `steps` leapfrog steps of size `eps` (negative eps integrates backwards).
/// Stops early and returns false when the density becomes non-finite.
template <SamplerTarget T>
bool leapfrog(const T& target, PhasePoint& z, std::span<const double> inv_metric, double eps,
              int steps) {
  const std::size_t d = z.position.size();
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < d; ++i) z.momentum[i] += 0.5 * eps * z.gradient[i];
    for (std::size_t i = 0; i < d; ++i) z.position[i] += eps * inv_metric[i] * z.momentum[i];
    z.log_density = target.log_density(z.position, z.gradient);
    if (!std::isfinite(z.log_density)) return false;
    for (std::size_t i = 0; i < d; ++i) z.momentum[i] += 0.5 * eps * z.gradient[i];
  }
  return true;
}

namespace detail {

class DualAveraging {
 public:
  explicit DualAveraging(double target) : target_(target) {}

  void restart(double step) {
    mu_ = std::log(10.0 * step);
    h_bar_ = 0.0;
    x_bar_ = 0.0;
    count_ = 0;
  }

  double update(double accept) {
    ++count_;
    const double n = static_cast<double>(count_);
    const double eta = 1.0 / (n + kT0);
    h_bar_ = (1.0 - eta) * h_bar_ + eta * (target_ - accept);
    const double x = mu_ - std::sqrt(n) / kGamma * h_bar_;
    const double w = std::pow(n, -kKappa);
    x_bar_ = w * x + (1.0 - w) * x_bar_;
    return std::exp(x);
  }

  double final_step() const { return std::exp(x_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;
  double target_;
  double mu_ = 0.0;
  double h_bar_ = 0.0;
  double x_bar_ = 0.0;
  long count_ = 0;
};

class RunningVariance {
 public:
  explicit RunningVariance(std::size_t d) : mean_(d, 0.0), m2_(d, 0.0) {}
  void add(std::span<const double> x) {
    ++n_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean_[i];
      mean_[i] += delta / n_;
      m2_[i] += delta * (x[i] - mean_[i]);
    }
  }
  // Shrunk towards 1e-3 as in common HMC practice.
  std::vector<double> regularized() const {
    std::vector<double> out(mean_.size());
    const double n = static_cast<double>(n_);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double var = n > 1 ? m2_[i] / (n - 1) : 1.0;
      out[i] = (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0));
    }
    return out;
  }
  void reset() {
    n_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

 private:
  long n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct WarmupSchedule {
  int first = 0;                // first iteration feeding the metric estimate
  std::vector<int> window_ends;  // exclusive ends of the doubling windows
};

/// Fast initial buffer, doubling slow windows, fast terminal buffer.
inline WarmupSchedule warmup_schedule(int warmup) {
  WarmupSchedule out;
  if (warmup < 20) return out;
  int init = 75, term = 50, base = 25;
  if (init + term + base > warmup) {
    init = static_cast<int>(0.15 * warmup);
    term = static_cast<int>(0.1 * warmup);
    base = warmup - init - term;
  }
  out.first = init;
  const int last = warmup - term;
  int start = init;
  int size = base;
  for (;;) {
    const int end = start + size;
    if (end + 2 * size > last) {
      out.window_ends.push_back(last);
      break;
    }
    out.window_ends.push_back(end);
    start = end;
    size *= 2;
  }
  return out;
}

inline std::mt19937_64 chain_rng(std::uint64_t seed, int chain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain), 0x5eedu};
  return std::mt19937_64(seq);
}

}  // namespace detail

struct ChainResult {
  std::vector<double> draws;  // constrained, row-major
  ChainStats stats;
};

template <SamplerTarget T>
ChainResult run_chain(const T& target, const SamplerConfig& cfg, int chain) {
  const std::size_t d = target.dimension();
  auto rng = detail::chain_rng(cfg.seed, chain);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  PhasePoint z;
  z.gradient.assign(d, 0.0);
  z.momentum.assign(d, 0.0);
  bool found = false;
  for (int attempt = 0; attempt < cfg.max_init_attempts && !found; ++attempt) {
    z.position = target.initial_point(rng);
    z.log_density = target.log_density(z.position, z.gradient);
    found = std::isfinite(z.log_density) &&
            std::all_of(z.gradient.begin(), z.gradient.end(),
                        [](double g) { return std::isfinite(g); });
  }
  if (!found)
    throw SamplerError("chain " + std::to_string(chain) + ": no finite starting point after " +
                       std::to_string(cfg.max_init_attempts) + " attempts");

  std::vector<double> inv_metric(d, 1.0);

  auto draw_momentum = [&](PhasePoint& p) {
    for (std::size_t i = 0; i < d; ++i) p.momentum[i] = normal(rng) / std::sqrt(inv_metric[i]);
  };

  // Doubles or halves the step until a single leapfrog step crosses an
  // acceptance probability of 0.8.
  auto initial_step = [&](double eps) {
    int direction = 0;
    for (int iter = 0; iter < 100; ++iter) {
      PhasePoint trial = z;
      draw_momentum(trial);
      const double h0 = hamiltonian(trial, inv_metric);
      const bool ok = leapfrog(target, trial, inv_metric, eps, 1);
      const bool above = ok && h0 - hamiltonian(trial, inv_metric) > std::log(0.8);
      if (direction == 0)
        direction = above ? 1 : -1;
      else if ((direction == 1) != above)
        break;
      eps = direction == 1 ? eps * 2.0 : eps * 0.5;
      if (eps > 1e7 || eps < 1e-10) break;
    }
    return eps;
  };

  // One HMC transition; returns the acceptance probability.
  int divergences = 0;
  auto transition = [&](double eps) {
    PhasePoint proposal = z;
    draw_momentum(proposal);
    const double h0 = hamiltonian(proposal, inv_metric);
    const bool ok = leapfrog(target, proposal, inv_metric, eps, cfg.leapfrog_steps);
    double h1 = ok ? hamiltonian(proposal, inv_metric) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(h1) || h1 - h0 > 1000.0) ++divergences;
    double accept = std::isfinite(h1) ? std::min(1.0, std::exp(h0 - h1)) : 0.0;
    if (std::isnan(accept)) accept = 0.0;
    if (uniform(rng) < accept) z = std::move(proposal);
    return accept;
  };

  double eps = initial_step(1.0);
  detail::DualAveraging averaging(cfg.target_acceptance);
  averaging.restart(eps);
  detail::RunningVariance variance(d);
  const detail::WarmupSchedule schedule = detail::warmup_schedule(cfg.warmup_iters);
  const std::vector<int>& windows = schedule.window_ends;
  std::size_t next_window = 0;

  auto jittered = [&](double step) {
    return cfg.step_jitter > 0 ? step * (1.0 + cfg.step_jitter * (2.0 * uniform(rng) - 1.0)) : step;
  };

  for (int it = 0; it < cfg.warmup_iters; ++it) {
    const double accept = transition(jittered(eps));
    eps = averaging.update(accept);
    if (next_window < windows.size() && it >= schedule.first) {
      variance.add(z.position);
      if (it + 1 == windows[next_window]) {
        inv_metric = variance.regularized();
        variance.reset();
        ++next_window;
        // The step-size average carries over the last metric update.
        if (next_window < windows.size()) {
          eps = initial_step(eps);
          averaging.restart(eps);
        }
      }
    }
  }
  if (cfg.warmup_iters > 0) eps = averaging.final_step();
  divergences = 0;

  ChainResult result;
  result.draws.reserve(static_cast<std::size_t>(cfg.sampling_iters) * d);
  double accept_sum = 0.0;
  for (int it = 0; it < cfg.sampling_iters; ++it) {
    accept_sum += transition(jittered(eps));
    const std::vector<double> x = target.constrain(z.position);
    result.draws.insert(result.draws.end(), x.begin(), x.end());
  }
  result.stats.step_size = eps;
  result.stats.mean_acceptance = accept_sum / cfg.sampling_iters;
  result.stats.divergences = divergences;
  result.stats.inverse_metric = inv_metric;
  return result;
}

/// Runs cfg.chains independent chains; chain c seeds its generator from
/// (cfg.seed, c), so results do not depend on cfg.threads.
template <SamplerTarget T>
PosteriorDraws run_mcmc(const T& target, const SamplerConfig& cfg) {
  cfg.validate();
  std::vector<ChainResult> results(cfg.chains);
  if (cfg.threads > 1 && cfg.chains > 1) {
    std::vector<std::exception_ptr> errors(cfg.chains);
    for (int first = 0; first < cfg.chains; first += cfg.threads) {
      std::vector<std::jthread> pool;
      for (int c = first; c < std::min(cfg.chains, first + cfg.threads); ++c) {
        pool.emplace_back([&, c] {
          try {
            results[c] = run_chain(target, cfg, c);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int c = 0; c < cfg.chains; ++c) results[c] = run_chain(target, cfg, c);
  }

  PosteriorDraws draws;
  const auto names = target.parameter_names();
  draws.names.assign(names.begin(), names.end());
  draws.draws_per_chain = static_cast<std::size_t>(cfg.sampling_iters);
  for (auto& r : results) {
    draws.chains.push_back(std::move(r.draws));
    draws.stats.push_back(std::move(r.stats));
  }
  return draws;
}

}  // namespace hh
