#pragma once

// One-step-ahead posterior prediction, lppd scoring and combined forecasts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkes_hurdle/covariates.hpp"
#include "hawkes_hurdle/diagnostics.hpp"
#include "hawkes_hurdle/distributions.hpp"
#include "hawkes_hurdle/excitation.hpp"
#include "hawkes_hurdle/hmc.hpp"
#include "hawkes_hurdle/model.hpp"
#include "hawkes_hurdle/panel.hpp"
#include "hawkes_hurdle/params.hpp"
#include "hawkes_hurdle/posterior.hpp"

namespace hh {

/// Draws or data that do not belong to the requested model.
class ConfigMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unpacks every retained draw (chains in order) into model states, after
/// checking that the draws were produced by `v` on `products` products.
inline std::vector<ModelState> posterior_states(const PosteriorDraws& draws, Variant v,
                                                std::size_t products) {
  const ParameterLayout layout(v, products);
  if (draws.names != layout.names())
    throw ConfigMismatchError("posterior draws do not match variant " + to_string(v) + " on " +
                              std::to_string(products) + " products");
  std::vector<ModelState> out;
  out.reserve(draws.total_draws());
  for (std::size_t c = 0; c < draws.chain_count(); ++c)
    for (std::size_t s = 0; s < draws.draws_per_chain; ++s)
      out.push_back(layout.unpack(draws.draw(c, s)));
  return out;
}

/// Linear predictors per product, day and draw: the zero-process logit or the
/// count-process log-link value.
struct Predictions {
  Variant variant = Variant::zero_base;
  DayRange window;
  std::size_t draws = 0;
  double dispersion = 1.0;
  CountLink link = CountLink::shifted;
  std::vector<DayRange> scored;             // window restricted to availability
  std::vector<std::vector<double>> linear;  // [product][(t - window.begin) * draws + s]

  std::size_t product_count() const { return linear.size(); }
  std::span<const double> at(std::size_t i, int t) const {
    return std::span<const double>(linear[i]).subspan(
        static_cast<std::size_t>(t - window.begin) * draws, draws);
  }
  double probability(std::size_t i, int t, std::size_t s) const {
    return inverse_logit(at(i, t)[s]);
  }
  double mean(std::size_t i, int t, std::size_t s) const { return count_mean(at(i, t)[s], link); }
};

namespace detail {

inline std::vector<std::vector<int>> event_days(const HistoryState& h, bool cross) {
  std::vector<std::vector<int>> out(h.product_count());
  for (std::size_t i = 0; i < h.product_count(); ++i) {
    const auto e = cross ? h.cross_events(i) : h.self_events(i);
    for (int t = 0; t < static_cast<int>(e.size()); ++t)
      if (e[t]) out[i].push_back(t);
  }
  return out;
}

// kappa * sum of g(t - e) over events e in [t - L, t), ascending.
inline double lagged_sum(const std::vector<int>& events, int t, double kappa,
                         const KernelTable& kernel) {
  if (kappa == 0.0) return 0.0;
  const auto first = std::lower_bound(events.begin(), events.end(), t - kernel.lags());
  const auto last = std::lower_bound(first, events.end(), t);
  double acc = 0.0;
  for (auto it = first; it != last; ++it) acc += kernel.pmf(t - *it);
  return kappa * acc;
}

}  // namespace detail

/// Filters through `window` one day at a time: every prediction for day t
/// sees the observed panel through t - 1 and nothing later. Days outside a
/// product's availability are left NaN.
inline Predictions predict_window(const std::vector<ModelState>& states, const SalesPanel& panel,
                                  DayRange window, const ModelSpec& spec, Variant v) {
  if (states.empty()) throw std::invalid_argument("prediction needs at least one draw");
  if (window.begin < 0 || window.end > panel.days || window.begin > window.end)
    throw std::invalid_argument("prediction window outside the panel");
  for (const auto& st : states)
    if (st.products.size() != panel.product_count())
      throw ConfigMismatchError("draws and panel disagree on the number of products");
  const auto tr = traits(v);
  const bool zero = tr.process == Process::zero;
  const std::size_t n = panel.product_count();
  const std::size_t S = states.size();
  const int L = spec.truncation;

  Predictions out;
  out.variant = v;
  out.window = window;
  out.draws = S;
  out.dispersion = spec.dispersion;
  out.link = spec.count_link;
  out.linear.assign(n, std::vector<double>(static_cast<std::size_t>(window.size()) * S,
                                           std::nan("")));
  for (std::size_t i = 0; i < n; ++i) out.scored.push_back(window.intersect(panel.availability[i]));

  const auto design = build_design(panel.truncated(window.end), spec.seasonal);
  const HistoryState history = event_indicators(panel, window.end);
  const auto self = detail::event_days(history, false);
  const auto cross = detail::event_days(history, true);

  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const ProductParams& pp = states[s].products[i];
      KernelTable ks, kx;
      if (tr.self_excitation) {
        const ShotParams& sp = zero ? pp.shot_z : pp.shot_c;
        ks = KernelTable(sp.mu, sp.tau, L);
      }
      if (tr.cross_excitation) kx = KernelTable(pp.cross_shot_z.mu, pp.cross_shot_z.tau, L);
      double* row = out.linear[i].data();
      for (int t = out.scored[i].begin; t < out.scored[i].end; ++t) {
        const DesignRow& d = design[i][t];
        double x;
        if (zero) {
          const double sv = tr.self_excitation ? detail::lagged_sum(self[i], t, pp.shot_z.kappa, ks)
                                               : 0.0;
          const double sx = tr.cross_excitation
                                ? detail::lagged_sum(cross[i], t, pp.cross_shot_z.kappa, kx)
                                : 0.0;
          x = zero_logit(d, sv, sx, pp, v);
        } else {
          const double sv = tr.self_excitation ? detail::lagged_sum(self[i], t, pp.shot_c.kappa, ks)
                                               : 0.0;
          x = count_log_mean(d, sv, pp, v);
        }
        row[static_cast<std::size_t>(t - window.begin) * S + s] = x;
      }
    }
  }
  return out;
}

/// Predictions over the panel's test window (from its split to the end).
inline Predictions sequential_predict(const std::vector<ModelState>& states,
                                      const SalesPanel& panel, const ModelSpec& spec, Variant v) {
  if (!panel.split) throw std::invalid_argument("panel has no train/test split");
  return predict_window(states, panel, panel.test_window(), spec, v);
}

/// Joins a training panel and the test panel that must follow it without a
/// gap; the result carries the split at the first test day.
inline SalesPanel join_train_test(const SalesPanel& train, const SalesPanel& test) {
  const Date expected = add_days(train.start, train.days);
  if (test.start != expected)
    throw std::invalid_argument("test window starts " + format_iso_date(test.start) +
                                ", expected " + format_iso_date(expected) +
                                " (gap or overlap between train and test)");
  if (train.product_count() != test.product_count())
    throw std::invalid_argument("train and test panels list different products");
  SalesPanel out = make_empty_panel(train.start, train.days + test.days);
  for (std::size_t i = 0; i < train.product_count(); ++i) {
    if (train.products[i].id != test.products[i].id ||
        train.products[i].brand != test.products[i].brand)
      throw std::invalid_argument("train and test panels list different products");
    auto units = train.units[i];
    auto price = train.price[i];
    units.insert(units.end(), test.units[i].begin(), test.units[i].end());
    price.insert(price.end(), test.price[i].begin(), test.price[i].end());
    out.add_product(train.products[i], std::move(units), std::move(price));
    const DayRange a = train.availability[i];
    const DayRange b = test.availability[i];
    DayRange joined{a.size() > 0 ? a.begin : train.days + b.begin,
                    b.size() > 0 ? train.days + b.end : a.end};
    if (a.size() > 0 && b.size() > 0 && (a.end != train.days || b.begin != 0))
      throw std::invalid_argument("availability of " + train.products[i].id +
                                  " has a gap at the train/test boundary");
    out.availability[i] = joined;
  }
  out.split = train.days;
  return out;
}

inline Predictions sequential_predict(const std::vector<ModelState>& states,
                                      const SalesPanel& train, const SalesPanel& test,
                                      const ModelSpec& spec, Variant v) {
  return sequential_predict(states, join_train_test(train, test), spec, v);
}

// ---------------------------------------------------------------------------
// lppd

/// log of the draw-averaged Bernoulli probability of the outcome.
inline double log_predictive_zero(std::span<const double> logits, bool event) {
  std::vector<double> terms(logits.size());
  for (std::size_t s = 0; s < logits.size(); ++s)
    terms[s] = event ? log_inverse_logit(logits[s]) : log1m_inverse_logit(logits[s]);
  return log_mean_exp(terms);
}

/// log of the draw-averaged shifted NB density of y.
inline double log_predictive_count(std::span<const double> etas, int y, double dispersion,
                                   CountLink link) {
  const double coef = shifted_nb_log_coefficient(y, dispersion);
  std::vector<double> terms(etas.size());
  for (std::size_t s = 0; s < etas.size(); ++s)
    terms[s] = count_log_density(y, etas[s], dispersion, link, coef);
  return log_mean_exp(terms);
}

/// Sum over days of log (1/S) sum_s p^E (1-p)^(1-E). `p[t]` holds the draws
/// for day t.
inline double lppd_zero(std::span<const std::vector<double>> p, std::span<const int> events) {
  if (p.size() != events.size()) throw std::invalid_argument("lppd_zero: length mismatch");
  double total = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].empty()) throw std::invalid_argument("lppd_zero: no draws");
    std::vector<double> terms(p[t].size());
    for (std::size_t s = 0; s < p[t].size(); ++s)
      terms[s] = events[t] ? std::log(p[t][s]) : std::log1p(-p[t][s]);
    total += log_mean_exp(terms);
  }
  return total;
}

/// Sum over sale days (y > 0) of log (1/S) sum_s f(y | lambda_s, phi).
inline double lppd_count(std::span<const std::vector<double>> lambda, std::span<const int> units,
                         double dispersion) {
  if (lambda.size() != units.size()) throw std::invalid_argument("lppd_count: length mismatch");
  double total = 0.0;
  for (std::size_t t = 0; t < lambda.size(); ++t) {
    if (units[t] <= 0) continue;
    if (lambda[t].empty()) throw std::invalid_argument("lppd_count: no draws");
    std::vector<double> terms(lambda[t].size());
    for (std::size_t s = 0; s < lambda[t].size(); ++s)
      terms[s] = shifted_nb_logpmf(units[t], lambda[t][s], dispersion);
    total += log_mean_exp(terms);
  }
  return total;
}

/// Per-product zero-process lppd over the predicted window.
inline std::vector<double> lppd_zero(const Predictions& pred, const SalesPanel& panel) {
  std::vector<double> out(pred.product_count(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int t = pred.scored[i].begin; t < pred.scored[i].end; ++t)
      out[i] += log_predictive_zero(pred.at(i, t), panel.units[i][t] >= 1);
  return out;
}

/// Per-product count-process lppd over the sale days of the predicted window;
/// a product without sales there scores 0.
inline std::vector<double> lppd_count(const Predictions& pred, const SalesPanel& panel) {
  std::vector<double> out(pred.product_count(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int t = pred.scored[i].begin; t < pred.scored[i].end; ++t)
      if (panel.units[i][t] >= 1)
        out[i] += log_predictive_count(pred.at(i, t), panel.units[i][t], pred.dispersion,
                                       pred.link);
  return out;
}

// ---------------------------------------------------------------------------
// Combined forecasts

struct ForecastOptions {
  double level = 0.95;
  int replicates = 1;  // simulated outcomes per draw and day
  std::uint64_t seed = 1;
};

struct ForecastInterval {
  int lower = 0;
  int upper = 0;
  bool contains(int y) const { return y >= lower && y <= upper; }
};

/// Smallest y whose empirical CDF reaches q.
inline int empirical_percentile(std::vector<int>& sorted_samples, double q) {
  const double n = static_cast<double>(sorted_samples.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted_samples.size());
  return sorted_samples[k - 1];
}

/// One-step-ahead hurdle forecasts: for every draw, day and replicate, a
/// Bernoulli event from the zero predictions and, on events, a shifted NB
/// count. Zero draw s pairs with count draw s mod S_count. Intervals are the
/// central empirical percentiles. Indexed [product][t - window.begin].
inline std::vector<std::vector<ForecastInterval>> combined_forecast(const Predictions& zero,
                                                                    const Predictions& count,
                                                                    const ForecastOptions& opt = {}) {
  require_process(zero.variant, Process::zero);
  require_process(count.variant, Process::count);
  if (zero.window.begin != count.window.begin || zero.window.end != count.window.end ||
      zero.product_count() != count.product_count())
    throw ConfigMismatchError("zero and count predictions cover different panels");
  if (opt.replicates < 1) throw std::invalid_argument("forecast replicates must be >= 1");
  if (!(opt.level > 0.0 && opt.level < 1.0))
    throw std::invalid_argument("forecast level must lie in (0, 1)");
  const double lo_q = 0.5 * (1.0 - opt.level);
  const double hi_q = 1.0 - lo_q;

  std::seed_seq seq{opt.seed};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::vector<ForecastInterval>> out(zero.product_count());
  std::vector<int> samples;
  for (std::size_t i = 0; i < zero.product_count(); ++i) {
    out[i].resize(static_cast<std::size_t>(zero.window.size()));
    const DayRange scored = zero.scored[i];
    for (int t = scored.begin; t < scored.end; ++t) {
      const auto x = zero.at(i, t);
      const auto eta = count.at(i, t);
      samples.clear();
      for (std::size_t s = 0; s < zero.draws; ++s) {
        const double p = inverse_logit(x[s]);
        const double lambda = count_mean(eta[s % count.draws], count.link);
        for (int r = 0; r < opt.replicates; ++r)
          samples.push_back(uniform(rng) < p ? shifted_nb_sample(lambda, count.dispersion, rng)
                                             : 0);
      }
      std::sort(samples.begin(), samples.end());
      out[i][t - zero.window.begin] = {empirical_percentile(samples, lo_q),
                                       empirical_percentile(samples, hi_q)};
    }
  }
  return out;
}

/// CDF of a single hurdle predictive distribution at y.
inline double hurdle_cdf(int y, double p, double lambda, double dispersion) {
  if (y < 0) return 0.0;
  double f = 1.0 - p;
  for (int k = 1; k <= y; ++k) f += p * std::exp(shifted_nb_logpmf(k, lambda, dispersion));
  return std::min(f, 1.0);
}

// ---------------------------------------------------------------------------
// Fitting and reports

/// Runs the sampler for one process on `window` and labels the draws.
inline PosteriorDraws fit_process(const SalesPanel& panel, DayRange window, const ModelSpec& spec,
                                  const PriorSpec& priors, Variant v, const SamplerConfig& cfg) {
  const LogPosterior target(make_model_data(panel, spec, window), v, priors);
  PosteriorDraws draws = run_mcmc(target, cfg);
  draws.label = to_string(v);
  return draws;
}

struct ProductScore {
  std::string id;
  std::string brand;
  double test_zero = 0.0;
  double test_count = 0.0;
  double train_zero = 0.0;
  double train_count = 0.0;
};

struct DayTrace {
  std::size_t product = 0;
  int day = 0;
  int units = 0;
  double p_mean = 0.0, p_lower = 0.0, p_upper = 0.0;
  double lambda_mean = 0.0, lambda_lower = 0.0, lambda_upper = 0.0;
  ForecastInterval forecast;
};

struct EvalReport {
  Variant zero = Variant::zero_hbe;
  Variant count = Variant::count_hbe;
  std::vector<ProductScore> products;
  std::vector<DayTrace> traces;  // test window, product-major

  double total_test_zero() const { return total(&ProductScore::test_zero); }
  double total_test_count() const { return total(&ProductScore::test_count); }
  double total_train_zero() const { return total(&ProductScore::train_zero); }
  double total_train_count() const { return total(&ProductScore::train_count); }
  double total(double ProductScore::*field) const {
    double s = 0.0;
    for (const auto& p : products) s += p.*field;
    return s;
  }
  double coverage() const {
    if (traces.empty()) return std::nan("");
    int hit = 0;
    for (const auto& d : traces) hit += d.forecast.contains(d.units);
    return static_cast<double>(hit) / static_cast<double>(traces.size());
  }
};

/// Linear-interpolated sample quantile.
inline double sample_quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Scores both processes on the train and test windows of `panel` and traces
/// the test window. Zero and count draws must come from spec.zero and
/// spec.count.
inline EvalReport evaluate(const SalesPanel& panel, const PosteriorDraws& zero_draws,
                           const PosteriorDraws& count_draws, const ModelSpec& spec,
                           const ForecastOptions& opt = {}) {
  if (!panel.split) throw std::invalid_argument("panel has no train/test split");
  const auto zs = posterior_states(zero_draws, spec.zero, panel.product_count());
  const auto cs = posterior_states(count_draws, spec.count, panel.product_count());

  EvalReport rep;
  rep.zero = spec.zero;
  rep.count = spec.count;
  const auto zt = predict_window(zs, panel, panel.test_window(), spec, spec.zero);
  const auto ct = predict_window(cs, panel, panel.test_window(), spec, spec.count);
  const auto zr = predict_window(zs, panel, panel.train_window(), spec, spec.zero);
  const auto cr = predict_window(cs, panel, panel.train_window(), spec, spec.count);
  const auto test_z = lppd_zero(zt, panel);
  const auto test_c = lppd_count(ct, panel);
  const auto train_z = lppd_zero(zr, panel);
  const auto train_c = lppd_count(cr, panel);
  for (std::size_t i = 0; i < panel.product_count(); ++i)
    rep.products.push_back({panel.products[i].id, panel.products[i].brand, test_z[i], test_c[i],
                            train_z[i], train_c[i]});

  const auto intervals = combined_forecast(zt, ct, opt);
  const double lo_q = 0.5 * (1.0 - opt.level);
  std::vector<double> p(zt.draws), lambda(ct.draws);
  for (std::size_t i = 0; i < panel.product_count(); ++i) {
    for (int t = zt.scored[i].begin; t < zt.scored[i].end; ++t) {
      DayTrace d;
      d.product = i;
      d.day = t;
      d.units = panel.units[i][t];
      for (std::size_t s = 0; s < zt.draws; ++s) p[s] = zt.probability(i, t, s);
      for (std::size_t s = 0; s < ct.draws; ++s) lambda[s] = ct.mean(i, t, s);
      d.p_mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
      d.p_lower = sample_quantile(p, lo_q);
      d.p_upper = sample_quantile(p, 1.0 - lo_q);
      d.lambda_mean =
          std::accumulate(lambda.begin(), lambda.end(), 0.0) / static_cast<double>(lambda.size());
      d.lambda_lower = sample_quantile(lambda, lo_q);
      d.lambda_upper = sample_quantile(lambda, 1.0 - lo_q);
      d.forecast = intervals[i][t - zt.window.begin];
      rep.traces.push_back(d);
    }
  }
  return rep;
}

}  // namespace hh
