#pragma once

// Event indicators, excitation kernels and shot-noise sums.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkes_hurdle/distributions.hpp"
#include "hawkes_hurdle/panel.hpp"

namespace hh {

inline constexpr int kDefaultTruncation = 100;

/// Trigger constant and kernel (mean, shape) of one excitation channel.
struct ShotParams {
  double kappa = 0.0;
  double mu = 1.0;
  double tau = 1.0;
};

/// Shifted negative binomial kernel g(d | mu, tau) on lags 1..L, optionally
/// with its partial derivatives in mu and tau.
class KernelTable {
 public:
  KernelTable() = default;

  KernelTable(double mu, double tau, int lags, bool with_gradient = false) : lags_(lags) {
    if (lags < 1) throw std::domain_error("kernel truncation must be >= 1");
    if (!(mu >= 1.0) || !(tau > 0.0))
      throw std::domain_error("kernel requires mu >= 1 and tau > 0");
    pmf_.assign(lags, 0.0);
    if (with_gradient) {
      dmu_.assign(lags, 0.0);
      dtau_.assign(lags, 0.0);
    }
    if (mu == 1.0) {
      pmf_[0] = 1.0;
      return;
    }
    const double excess = mu - 1.0;
    const double total = excess + tau;
    const double log_ratio = std::log(excess / total);
    const double log_tau_share = std::log(tau / total);
    double log_g = tau * log_tau_share;
    double harmonic = 0.0;  // sum_{k=0}^{d-2} 1 / (tau + k)
    for (int d = 1; d <= lags; ++d) {
      if (d > 1) {
        log_g += std::log((tau + d - 2) / (d - 1)) + log_ratio;
        harmonic += 1.0 / (tau + d - 2);
      }
      const double g = std::exp(log_g);
      pmf_[d - 1] = g;
      if (with_gradient) {
        dmu_[d - 1] = g * ((d - 1) * (1.0 / excess - 1.0 / total) - tau / total);
        dtau_[d - 1] = g * (harmonic + log_tau_share + (excess - (d - 1)) / total);
      }
    }
  }

  int lags() const { return lags_; }
  bool has_gradient() const { return !dmu_.empty(); }

  double pmf(int lag) const { return lag >= 1 && lag <= lags_ ? pmf_[lag - 1] : 0.0; }
  double dmu(int lag) const {
    return lag >= 1 && lag <= lags_ && has_gradient() ? dmu_[lag - 1] : 0.0;
  }
  double dtau(int lag) const {
    return lag >= 1 && lag <= lags_ && has_gradient() ? dtau_[lag - 1] : 0.0;
  }

  std::span<const double> pmf_values() const { return pmf_; }
  std::span<const double> dmu_values() const { return dmu_; }
  std::span<const double> dtau_values() const { return dtau_; }

 private:
  int lags_ = 0;
  std::vector<double> pmf_;
  std::vector<double> dmu_;
  std::vector<double> dtau_;
};

/// kappa * sum_{j = max(0, t-L)}^{t-1} events[j] g(t - j) with 0-based day t.
inline double shot_sum(std::span<const std::uint8_t> events, int t, double kappa,
                       const KernelTable& kernel) {
  if (t <= 0 || kappa == 0.0) return 0.0;
  const int first = std::max(0, t - kernel.lags());
  const int last = std::min<int>(t, static_cast<int>(events.size()));
  double acc = 0.0;
  for (int j = first; j < last; ++j)
    if (events[j]) acc += kernel.pmf(t - j);
  return kappa * acc;
}

inline double shot_sum(std::span<const std::uint8_t> events, int t, const ShotParams& sp,
                       int truncation) {
  if (t <= 0 || sp.kappa == 0.0) return 0.0;
  return shot_sum(events, t, sp.kappa, KernelTable(sp.mu, sp.tau, truncation));
}

/// Element t equals shot_sum(events, t, sp, L), for t in [0, days).
inline std::vector<double> shot_sequence(std::span<const std::uint8_t> events,
                                         const ShotParams& sp, int truncation, int days) {
  std::vector<double> out(days, 0.0);
  if (sp.kappa == 0.0) return out;
  const KernelTable kernel(sp.mu, sp.tau, truncation);
  for (int t = 0; t < days; ++t) out[t] = shot_sum(events, t, sp.kappa, kernel);
  return out;
}

/// Self events E_it = [y_it >= 1] and within-brand cross events
/// Etilde_it = [sum over same-brand peers k != i of y_kt >= 1].
class HistoryState {
 public:
  HistoryState() = default;

  explicit HistoryState(std::vector<std::string> brands) : brands_(std::move(brands)) {
    self_.resize(brands_.size());
    cross_.resize(brands_.size());
    std::map<std::string, int> ids;
    for (const auto& b : brands_) ids.emplace(b, static_cast<int>(ids.size()));
    brand_id_.reserve(brands_.size());
    for (const auto& b : brands_) brand_id_.push_back(ids.at(b));
    brand_count_ = static_cast<int>(ids.size());
  }

  std::size_t product_count() const { return brands_.size(); }
  int days() const { return self_.empty() ? 0 : static_cast<int>(self_.front().size()); }
  const std::string& brand(std::size_t i) const { return brands_.at(i); }

  std::span<const std::uint8_t> self_events(std::size_t i) const { return self_.at(i); }
  std::span<const std::uint8_t> cross_events(std::size_t i) const { return cross_.at(i); }

  /// Records one more day of observed units (one entry per product).
  void append_day(std::span<const int> units) {
    if (units.size() != brands_.size())
      throw std::invalid_argument("append_day: unit vector size mismatch");
    std::vector<int> brand_events(brand_count_, 0);
    for (std::size_t i = 0; i < units.size(); ++i)
      if (units[i] >= 1) ++brand_events[brand_id_[i]];
    for (std::size_t i = 0; i < units.size(); ++i) {
      const int own = units[i] >= 1 ? 1 : 0;
      self_[i].push_back(static_cast<std::uint8_t>(own));
      cross_[i].push_back(static_cast<std::uint8_t>(brand_events[brand_id_[i]] - own >= 1));
    }
  }

 private:
  std::vector<std::string> brands_;
  std::vector<int> brand_id_;
  int brand_count_ = 0;
  std::vector<std::vector<std::uint8_t>> self_;
  std::vector<std::vector<std::uint8_t>> cross_;
};

/// Indicator histories over the whole panel grid, optionally only the first
/// `days` days.
inline HistoryState event_indicators(const SalesPanel& panel, int days = -1) {
  if (days < 0) days = panel.days;
  std::vector<std::string> brands;
  for (const auto& p : panel.products) brands.push_back(p.brand);
  HistoryState state(std::move(brands));
  std::vector<int> day_units(panel.product_count());
  for (int t = 0; t < days; ++t) {
    for (std::size_t i = 0; i < panel.product_count(); ++i) day_units[i] = panel.units[i][t];
    state.append_day(day_units);
  }
  return state;
}

}  // namespace hh
