#pragma once

// Split R-hat and effective sample size over multiple chains.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hawkes_hurdle/hmc.hpp"

namespace hh {

inline constexpr double kRhatThreshold = 1.05;

struct ParameterDiagnostic {
  std::string name;
  double rhat = std::numeric_limits<double>::quiet_NaN();
  double ess = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  // zero within-chain variance: R-hat undefined
};

struct DiagnosticsReport {
  std::vector<ParameterDiagnostic> parameters;
  double threshold = kRhatThreshold;
  double max_rhat = std::numeric_limits<double>::quiet_NaN();
  double min_ess = std::numeric_limits<double>::quiet_NaN();
  int degenerate_count = 0;
  bool converged = true;
};

namespace detail {

struct ChainMoments {
  std::vector<double> means;
  std::vector<double> variances;  // unbiased
  double within = 0.0;            // W
  double var_plus = 0.0;          // ((n-1)/n) W + B/n
};

inline ChainMoments chain_moments(std::span<const std::vector<double>> chains) {
  ChainMoments m;
  const double n = static_cast<double>(chains.front().size());
  for (const auto& c : chains) {
    double mean = 0.0;
    for (double x : c) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : c) ss += (x - mean) * (x - mean);
    m.means.push_back(mean);
    m.variances.push_back(ss / (n - 1.0));
  }
  const double chains_n = static_cast<double>(chains.size());
  for (double v : m.variances) m.within += v;
  m.within /= chains_n;
  double grand = 0.0;
  for (double mu : m.means) grand += mu;
  grand /= chains_n;
  double b_over_n = 0.0;
  for (double mu : m.means) b_over_n += (mu - grand) * (mu - grand);
  b_over_n /= std::max(1.0, chains_n - 1.0);
  m.var_plus = (n - 1.0) / n * m.within + b_over_n;
  return m;
}

inline std::vector<std::vector<double>> split_halves(std::span<const std::vector<double>> chains) {
  std::vector<std::vector<double>> out;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + half);
    out.emplace_back(c.end() - half, c.end());
  }
  return out;
}

}  // namespace detail

/// Split R-hat; NaN when the within-chain variance is zero.
inline double split_rhat(std::span<const std::vector<double>> chains) {
  const auto halves = detail::split_halves(chains);
  if (halves.empty() || halves.front().size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto m = detail::chain_moments(halves);
  if (!(m.within > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(m.var_plus / m.within);
}

/// Multi-chain ESS on split chains with Geyer's initial monotone sequence.
inline double effective_sample_size(std::span<const std::vector<double>> chains) {
  const auto halves = detail::split_halves(chains);
  if (halves.empty() || halves.front().size() < 4) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = halves.front().size();
  const double m_chains = static_cast<double>(halves.size());
  const auto m = detail::chain_moments(halves);
  if (!(m.var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  // Mean over chains of the biased autocovariance at `lag`.
  auto mean_autocov = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t c = 0; c < halves.size(); ++c) {
      const auto& x = halves[c];
      const double mu = m.means[c];
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mu) * (x[i + lag] - mu);
      total += s / static_cast<double>(n);
    }
    return total / m_chains;
  };
  // Biased W so that rho(0) == 1.
  const double w_biased = m.within * (n - 1.0) / n;
  auto rho_scaled = [&](std::size_t lag) {
    return 1.0 - (w_biased - mean_autocov(lag)) / m.var_plus;
  };

  double tau = 0.0;
  double previous_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = rho_scaled(2 * k) + rho_scaled(2 * k + 1);
    if (k == 0) pair = 1.0 + rho_scaled(1);
    if (pair < 0.0) break;
    pair = std::min(pair, previous_pair);
    previous_pair = pair;
    tau += pair;
  }
  tau = -1.0 + 2.0 * tau;
  tau = std::max(tau, 1.0 / std::log10(m_chains * n));
  return m_chains * static_cast<double>(n) / tau;
}

/// Per-parameter R-hat and ESS; flags the run as non-converged when any R-hat
/// exceeds `threshold` or any parameter is degenerate.
inline DiagnosticsReport diagnostics(const PosteriorDraws& draws,
                                     double threshold = kRhatThreshold) {
  DiagnosticsReport report;
  report.threshold = threshold;
  double max_rhat = -std::numeric_limits<double>::infinity();
  double min_ess = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < draws.dimension(); ++k) {
    std::vector<std::vector<double>> chains;
    for (std::size_t c = 0; c < draws.chain_count(); ++c) chains.push_back(draws.chain_column(c, k));
    ParameterDiagnostic d;
    d.name = draws.names[k];
    d.rhat = split_rhat(chains);
    d.ess = effective_sample_size(chains);
    d.degenerate = std::isnan(d.rhat);
    if (d.degenerate) {
      ++report.degenerate_count;
      report.converged = false;
    } else {
      max_rhat = std::max(max_rhat, d.rhat);
      if (d.rhat > threshold) report.converged = false;
    }
    if (!std::isnan(d.ess)) min_ess = std::min(min_ess, d.ess);
    report.parameters.push_back(std::move(d));
  }
  if (std::isfinite(max_rhat)) report.max_rhat = max_rhat;
  if (std::isfinite(min_ess)) report.min_ess = min_ess;
  return report;
}

}  // namespace hh
