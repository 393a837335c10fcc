#pragma once

// Hurdle-model likelihoods and priors, with analytic gradients.
//
// The zero process is Bernoulli with
//   logit p_it = theta_i . x_it + S_it + Stilde_it
// and the count process, observed only on event days, is shifted negative
// binomial with mean lambda_it and log link
//   log(lambda_it - 1) = theta^c_i . x^c_it + S^c_it
// (or lambda_it = max(exp(.), 1 + eps) under CountLink::clamped_exp).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hawkes_hurdle/covariates.hpp"
#include "hawkes_hurdle/distributions.hpp"
#include "hawkes_hurdle/excitation.hpp"
#include "hawkes_hurdle/panel.hpp"
#include "hawkes_hurdle/params.hpp"
#include "hawkes_hurdle/variant.hpp"

namespace hh {

// ---------------------------------------------------------------------------
// Link functions

inline void require_process(Variant v, Process p) {
  if (process_of(v) != p)
    throw std::invalid_argument("variant " + to_string(v) + " used for the wrong process");
}

/// Linear predictor of the zero process. `s` and `s_cross` are the self and
/// cross shot values; variants without those channels ignore them.
inline double zero_logit(const DesignRow& row, double s, double s_cross, const ProductParams& pp,
                         Variant v) {
  require_process(v, Process::zero);
  const auto tr = traits(v);
  double x = pp.theta_z[0];
  if (!tr.covariates) return x;
  x += pp.theta_z[1] * row.log_price;
  for (int k = 0; k < kSeasonalFlags; ++k)
    if (row.seasonal[k]) x += pp.theta_z[k + 2];
  if (tr.self_excitation) x += s;
  if (tr.cross_excitation) x += s_cross;
  return x;
}

/// Linear predictor of the count process (before the mean link).
inline double count_log_mean(const DesignRow& row, double s, const ProductParams& pp, Variant v) {
  require_process(v, Process::count);
  const auto tr = traits(v);
  double x = pp.theta_c[0];
  if (!tr.covariates) return x;
  x += pp.theta_c[1] * row.log_price;
  if (tr.self_excitation) x += s;
  return x;
}

/// Count mean implied by the linear predictor.
inline double count_mean(double eta, CountLink link) {
  if (link == CountLink::shifted) return 1.0 + std::exp(eta);
  return std::max(std::exp(eta), 1.0 + kClampedExcess);
}

/// log f(y | lambda(eta), dispersion); writes d/d eta when `deta` is given.
inline double count_log_density(int y, double eta, double dispersion, CountLink link,
                                double log_coefficient, double* deta = nullptr) {
  if (link == CountLink::shifted) {
    const double log_total = log_add_exp(eta, std::log(dispersion));
    if (deta) {
      const double w = std::exp(eta - log_total);  // (lambda-1) / (lambda-1+phi)
      *deta = (y - 1) * (1.0 - w) - dispersion * w;
    }
    return log_coefficient + (y - 1) * (eta - log_total) +
           dispersion * (std::log(dispersion) - log_total);
  }
  const double raw = std::exp(eta);
  const bool clamped = !(raw > 1.0 + kClampedExcess);
  const double lambda = clamped ? 1.0 + kClampedExcess : raw;
  const double excess = lambda - 1.0;
  if (deta) {
    *deta = clamped ? 0.0
                    : lambda * ((y - 1) / excess - (y - 1 + dispersion) / (excess + dispersion));
  }
  return shifted_nb_logpmf_log_excess(y, std::log(excess), dispersion, log_coefficient);
}

// ---------------------------------------------------------------------------
// Prebuilt data

/// Active seasonal flags of one day (at most Christmas + weekday + month).
struct SeasonalIndex {
  std::uint8_t count = 0;
  std::array<std::uint8_t, 3> flags{};
};

struct ProductSeries {
  std::vector<DesignRow> rows;  // full grid
  std::vector<std::uint8_t> self_events;
  std::vector<std::uint8_t> cross_events;
  std::vector<int> units;
  DayRange window;                      // scored days
  std::vector<int> self_event_days;     // E = 1, grid days before window.end
  std::vector<int> cross_event_days;    // Etilde = 1, grid days before window.end
  std::vector<int> scored_events;       // E = 1 inside window
  std::vector<double> log_coefficient;  // per scored event
};

/// Everything a likelihood evaluation reads: designs, histories and the
/// scored window, per product.
struct ModelData {
  std::vector<ProductSeries> products;
  std::vector<SeasonalIndex> seasonal;  // per grid day
  int truncation = kDefaultTruncation;
  double dispersion = 1.0;
  CountLink count_link = CountLink::shifted;

  std::size_t product_count() const { return products.size(); }

  /// Products with empty windows: the posterior reduces to the prior.
  static ModelData prior_only(std::size_t products, const ModelSpec& spec) {
    ModelData d;
    d.products.resize(products);
    d.truncation = spec.truncation;
    d.dispersion = spec.dispersion;
    d.count_link = spec.count_link;
    return d;
  }
};

inline SeasonalIndex index_flags(const SeasonalFlags& flags) {
  SeasonalIndex idx;
  for (int k = 0; k < kSeasonalFlags; ++k) {
    if (!flags[k]) continue;
    if (idx.count == idx.flags.size())
      throw std::logic_error("more than three seasonal flags active on one day");
    idx.flags[idx.count++] = static_cast<std::uint8_t>(k);
  }
  return idx;
}

inline ModelData make_model_data(std::vector<std::vector<DesignRow>> design,
                                 const HistoryState& history, const SalesPanel& panel,
                                 const ModelSpec& spec, DayRange window) {
  ModelData data;
  data.truncation = spec.truncation;
  data.dispersion = spec.dispersion;
  data.count_link = spec.count_link;
  if (spec.truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  if (!(spec.dispersion > 0.0)) throw std::invalid_argument("dispersion must be > 0");
  window = window.intersect(panel.grid());

  if (!design.empty()) {
    data.seasonal.resize(panel.days);
    for (int t = 0; t < panel.days; ++t) data.seasonal[t] = index_flags(design.front()[t].seasonal);
  }

  data.products.resize(panel.product_count());
  for (std::size_t i = 0; i < panel.product_count(); ++i) {
    ProductSeries& s = data.products[i];
    s.rows = std::move(design[i]);
    const auto self = history.self_events(i);
    const auto cross = history.cross_events(i);
    s.self_events.assign(self.begin(), self.end());
    s.cross_events.assign(cross.begin(), cross.end());
    s.units = panel.units[i];
    s.window = window.intersect(panel.availability[i]);
    for (int t = 0; t < s.window.end; ++t) {
      if (s.self_events[t]) s.self_event_days.push_back(t);
      if (s.cross_events[t]) s.cross_event_days.push_back(t);
    }
    for (int t = s.window.begin; t < s.window.end; ++t) {
      if (!s.self_events[t]) continue;
      s.scored_events.push_back(t);
      s.log_coefficient.push_back(shifted_nb_log_coefficient(s.units[t], spec.dispersion));
    }
  }
  return data;
}

/// Builds design rows and histories from the panel and scores `window`.
inline ModelData make_model_data(const SalesPanel& panel, const ModelSpec& spec, DayRange window) {
  return make_model_data(build_design(panel, spec.seasonal), event_indicators(panel), panel, spec,
                         window);
}

// ---------------------------------------------------------------------------
// Likelihood

namespace detail {

// acc[t - window.begin] += g(t - e) for every event e and t in the window
// within the kernel's reach. Events are visited in increasing order, so each
// acc[t] is summed in the same order as shot_sum.
inline void accumulate_shots(std::span<const int> event_days, DayRange window,
                             const KernelTable& kernel, std::span<double> acc) {
  const int lags = kernel.lags();
  for (int e : event_days) {
    if (e + 1 >= window.end) break;
    const int lo = std::max(window.begin, e + 1);
    const int hi = std::min(window.end, e + lags + 1);
    for (int t = lo; t < hi; ++t) acc[t - window.begin] += kernel.pmf(t - e);
  }
}

// Returns (sum_e sum_t r_t dg/dmu(t-e), sum_e sum_t r_t dg/dtau(t-e)).
inline std::pair<double, double> backprop_kernel(std::span<const int> event_days, DayRange window,
                                                 const KernelTable& kernel,
                                                 std::span<const double> resid) {
  const int lags = kernel.lags();
  double dmu = 0.0, dtau = 0.0;
  for (int e : event_days) {
    if (e + 1 >= window.end) break;
    const int lo = std::max(window.begin, e + 1);
    const int hi = std::min(window.end, e + lags + 1);
    for (int t = lo; t < hi; ++t) {
      const double r = resid[t - window.begin];
      dmu += r * kernel.dmu(t - e);
      dtau += r * kernel.dtau(t - e);
    }
  }
  return {dmu, dtau};
}

}  // namespace detail

/// Zero-process log-likelihood of one product; accumulates the gradient with
/// respect to the constrained parameters into `grad` when given.
inline double loglik_zero_product(const ModelData& data, const ProductSeries& s,
                                  const ProductParams& pp, Variant v,
                                  ProductParams* grad = nullptr) {
  const auto tr = traits(v);
  const DayRange w = s.window;
  const int n = w.size();
  if (n == 0) return 0.0;

  std::vector<double> self_acc, cross_acc;
  KernelTable self_kernel, cross_kernel;
  const bool use_self = tr.self_excitation;
  const bool use_cross = tr.cross_excitation;
  if (use_self) {
    self_kernel = KernelTable(pp.shot_z.mu, pp.shot_z.tau, data.truncation, grad != nullptr);
    self_acc.assign(n, 0.0);
    detail::accumulate_shots(s.self_event_days, w, self_kernel, self_acc);
  }
  if (use_cross) {
    cross_kernel =
        KernelTable(pp.cross_shot_z.mu, pp.cross_shot_z.tau, data.truncation, grad != nullptr);
    cross_acc.assign(n, 0.0);
    detail::accumulate_shots(s.cross_event_days, w, cross_kernel, cross_acc);
  }

  const auto& th = pp.theta_z;
  std::vector<double> resid(grad ? n : 0);
  double total = 0.0;
  for (int t = w.begin; t < w.end; ++t) {
    const int k = t - w.begin;
    double x = th[0];
    if (tr.covariates) {
      x += th[1] * s.rows[t].log_price;
      const SeasonalIndex& idx = data.seasonal[t];
      for (int f = 0; f < idx.count; ++f) x += th[idx.flags[f] + 2];
    }
    if (use_self) x += (t > 0 && pp.shot_z.kappa != 0.0) ? pp.shot_z.kappa * self_acc[k] : 0.0;
    if (use_cross)
      x += (t > 0 && pp.cross_shot_z.kappa != 0.0) ? pp.cross_shot_z.kappa * cross_acc[k] : 0.0;
    const bool event = s.self_events[t] != 0;
    total += event ? log_inverse_logit(x) : log1m_inverse_logit(x);
    if (grad) resid[k] = (event ? 1.0 : 0.0) - inverse_logit(x);
  }

  if (grad) {
    auto& g = grad->theta_z;
    for (int t = w.begin; t < w.end; ++t) {
      const double r = resid[t - w.begin];
      g[0] += r;
      if (!tr.covariates) continue;
      g[1] += r * s.rows[t].log_price;
      const SeasonalIndex& idx = data.seasonal[t];
      for (int f = 0; f < idx.count; ++f) g[idx.flags[f] + 2] += r;
    }
    auto shot_grad = [&](const ShotParams& sp, ShotParams& gs, std::span<const int> days,
                         const KernelTable& kernel, const std::vector<double>& acc) {
      double dk = 0.0;
      for (int k = 0; k < n; ++k) dk += resid[k] * acc[k];
      gs.kappa += dk;
      const auto [dmu, dtau] = detail::backprop_kernel(days, w, kernel, resid);
      gs.mu += sp.kappa * dmu;
      gs.tau += sp.kappa * dtau;
    };
    if (use_self) shot_grad(pp.shot_z, grad->shot_z, s.self_event_days, self_kernel, self_acc);
    if (use_cross)
      shot_grad(pp.cross_shot_z, grad->cross_shot_z, s.cross_event_days, cross_kernel, cross_acc);
  }
  return total;
}

/// Count-process log-likelihood of one product over its scored event days.
inline double loglik_count_product(const ModelData& data, const ProductSeries& s,
                                   const ProductParams& pp, Variant v,
                                   ProductParams* grad = nullptr) {
  const auto tr = traits(v);
  if (s.scored_events.empty()) return 0.0;
  const ShotParams& sp = pp.shot_c;
  KernelTable kernel;
  if (tr.self_excitation) kernel = KernelTable(sp.mu, sp.tau, data.truncation, grad != nullptr);

  const auto& th = pp.theta_c;
  const auto& past = s.self_event_days;
  std::size_t first = 0;  // first past event within reach of t
  double total = 0.0;
  for (std::size_t m = 0; m < s.scored_events.size(); ++m) {
    const int t = s.scored_events[m];
    const int y = s.units[t];
    double acc = 0.0, acc_mu = 0.0, acc_tau = 0.0;
    double x = th[0];
    if (tr.covariates) x += th[1] * s.rows[t].log_price;
    if (tr.self_excitation) {
      while (first < past.size() && past[first] < t - data.truncation) ++first;
      for (std::size_t e = first; e < past.size() && past[e] < t; ++e) {
        acc += kernel.pmf(t - past[e]);
        if (grad) {
          acc_mu += kernel.dmu(t - past[e]);
          acc_tau += kernel.dtau(t - past[e]);
        }
      }
      x += (t > 0 && sp.kappa != 0.0) ? sp.kappa * acc : 0.0;
    }
    double r = 0.0;
    total += count_log_density(y, x, data.dispersion, data.count_link, s.log_coefficient[m],
                               grad ? &r : nullptr);
    if (grad) {
      grad->theta_c[0] += r;
      if (tr.covariates) grad->theta_c[1] += r * s.rows[t].log_price;
      if (tr.self_excitation) {
        grad->shot_c.kappa += r * acc;
        grad->shot_c.mu += r * sp.kappa * acc_mu;
        grad->shot_c.tau += r * sp.kappa * acc_tau;
      }
    }
  }
  return total;
}

/// Sum over products and scored days of E log p + (1 - E) log(1 - p).
inline double loglik_zero(const ModelData& data, std::span<const ProductParams> params, Variant v,
                          std::span<ProductParams> grad = {}) {
  require_process(v, Process::zero);
  double total = 0.0;
  for (std::size_t i = 0; i < data.product_count(); ++i)
    total += loglik_zero_product(data, data.products[i], params[i], v,
                                 grad.empty() ? nullptr : &grad[i]);
  return total;
}

/// Sum over products and scored event days of the shifted-NB log density.
inline double loglik_count(const ModelData& data, std::span<const ProductParams> params, Variant v,
                           std::span<ProductParams> grad = {}) {
  require_process(v, Process::count);
  double total = 0.0;
  for (std::size_t i = 0; i < data.product_count(); ++i)
    total += loglik_count_product(data, data.products[i], params[i], v,
                                  grad.empty() ? nullptr : &grad[i]);
  return total;
}

inline double loglik(const ModelData& data, std::span<const ProductParams> params, Variant v,
                     std::span<ProductParams> grad = {}) {
  return process_of(v) == Process::zero ? loglik_zero(data, params, v, grad)
                                        : loglik_count(data, params, v, grad);
}

// ---------------------------------------------------------------------------
// Priors

namespace detail {

inline double normal_term(double x, double mean, double variance, double* dx, double* dmean) {
  const double z = (x - mean) / variance;
  if (dx) *dx -= z;
  if (dmean) *dmean += z;
  return normal_logpdf(x, mean, variance);
}

// Gamma prior on each of (kappa, mu - shift, tau). Flat mode reads `flat`;
// hierarchical mode uses shape eta[k] and rate `rate[k]`.
inline double shot_logprior(const ShotParams& sp, ShotParams* g, bool hierarchical,
                            const std::array<GammaPrior, 3>& flat, const std::array<double, 3>& rate,
                            const std::array<double, 3>& eta, std::array<double, 3>* geta) {
  double lp = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double shape = hierarchical ? eta[k] : flat[k].shape;
    const double r = hierarchical ? rate[k] : flat[k].rate;
    const double shift = hierarchical ? kShotShift[k] : flat[k].shift;
    const double x = shot_component(sp, k) - shift;
    if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
    lp += gamma_logpdf(x, shape, r);
    if (g) shot_component(*g, k) += gamma_logpdf_dx(x, shape, r);
    if (geta) (*geta)[k] += gamma_logpdf_dshape(x, shape, r);
  }
  return lp;
}

inline double hyper_gamma_logprior(const std::array<double, 3>& eta,
                                   const std::array<GammaPrior, 3>& prior,
                                   std::array<double, 3>* geta) {
  double lp = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double x = eta[k] - prior[k].shift;
    if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
    lp += gamma_logpdf(x, prior[k].shape, prior[k].rate);
    if (geta) (*geta)[k] += gamma_logpdf_dx(x, prior[k].shape, prior[k].rate);
  }
  return lp;
}

}  // namespace detail

/// Fixed scales and hyper-prior of the regression coefficients for a
/// hierarchical variant.
struct CoefficientHierarchy {
  std::span<const double> sigma2;
  std::span<const NormalPrior> rho;
};

inline CoefficientHierarchy coefficient_hierarchy(const PriorSpec& ps, Variant v) {
  if (process_of(v) == Process::zero) return {ps.zero.sigma2, ps.zero.rho};
  if (v == Variant::count_hb) return {ps.count.sigma2_hb, ps.count.rho_hb};
  return {ps.count.sigma2, ps.count.rho};
}

/// Log prior density of every parameter the variant uses. Hierarchical
/// variants include both the product-level terms given (rho, eta) and the
/// hyper-prior terms. Returns -inf outside the support.
inline double logprior(const ModelState& st, const PriorSpec& ps, Variant v,
                       ModelState* grad = nullptr) {
  const auto tr = traits(v);
  const bool zero = tr.process == Process::zero;
  const int nc = coefficient_count(v);
  const CoefficientHierarchy hier = coefficient_hierarchy(ps, v);
  double lp = 0.0;

  const double* rho = zero ? st.hyper.rho_z.data() : st.hyper.rho_c.data();
  double* grho = grad ? (zero ? grad->hyper.rho_z.data() : grad->hyper.rho_c.data()) : nullptr;

  for (std::size_t i = 0; i < st.products.size(); ++i) {
    const ProductParams& pp = st.products[i];
    ProductParams* g = grad ? &grad->products[i] : nullptr;
    const double* theta = zero ? pp.theta_z.data() : pp.theta_c.data();
    double* gtheta = g ? (zero ? g->theta_z.data() : g->theta_c.data()) : nullptr;

    if (!tr.covariates) {
      const NormalPrior& np = zero ? ps.zero.base : ps.count.base;
      lp += detail::normal_term(theta[0], np.mean, np.variance, gtheta, nullptr);
    } else if (!tr.hierarchical) {
      for (int j = 0; j < nc; ++j) {
        const NormalPrior& np = zero ? ps.zero.flat_theta[j] : ps.count.flat_theta[j];
        lp += detail::normal_term(theta[j], np.mean, np.variance, gtheta ? gtheta + j : nullptr,
                                  nullptr);
      }
    } else {
      for (int j = 0; j < nc; ++j)
        lp += detail::normal_term(theta[j], rho[j], hier.sigma2[j], gtheta ? gtheta + j : nullptr,
                                  grho ? grho + j : nullptr);
    }

    if (tr.self_excitation) {
      const ShotParams& sp = zero ? pp.shot_z : pp.shot_c;
      ShotParams* gs = g ? (zero ? &g->shot_z : &g->shot_c) : nullptr;
      const auto& flat = zero ? ps.zero.flat_shot : ps.count.flat_shot;
      const auto& rate = zero ? ps.zero.shot_rate : ps.count.shot_rate;
      const auto& eta = zero ? st.hyper.eta_z : st.hyper.eta_c;
      auto* geta = grad && tr.hierarchical ? (zero ? &grad->hyper.eta_z : &grad->hyper.eta_c)
                                           : nullptr;
      lp += detail::shot_logprior(sp, gs, tr.hierarchical, flat, rate, eta, geta);
    }
    if (tr.cross_excitation) {
      auto* geta = grad && tr.hierarchical ? &grad->hyper.eta_z_cross : nullptr;
      lp += detail::shot_logprior(pp.cross_shot_z, g ? &g->cross_shot_z : nullptr,
                                  tr.hierarchical, ps.zero.flat_cross, ps.zero.cross_rate,
                                  st.hyper.eta_z_cross, geta);
    }
    if (lp == kNegInf) return kNegInf;
  }

  if (tr.hierarchical) {
    for (int j = 0; j < nc; ++j)
      lp += detail::normal_term(rho[j], hier.rho[j].mean, hier.rho[j].variance,
                                grho ? grho + j : nullptr, nullptr);
    if (tr.self_excitation) {
      const auto& eta = zero ? st.hyper.eta_z : st.hyper.eta_c;
      const auto& prior = zero ? ps.zero.eta : ps.count.eta;
      lp += detail::hyper_gamma_logprior(
          eta, prior, grad ? (zero ? &grad->hyper.eta_z : &grad->hyper.eta_c) : nullptr);
    }
    if (tr.cross_excitation)
      lp += detail::hyper_gamma_logprior(st.hyper.eta_z_cross, ps.zero.eta_cross,
                                         grad ? &grad->hyper.eta_z_cross : nullptr);
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Prior sampling

namespace detail {
template <class Rng>
double draw_gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}
template <class Rng>
double draw_normal(double mean, double variance, Rng& rng) {
  std::normal_distribution<double> dist(mean, std::sqrt(variance));
  return dist(rng);
}
}  // namespace detail

/// Draws product-level parameters given the hyper-parameters (hierarchical
/// variants) or from the flat priors.
template <class Rng>
std::vector<ProductParams> draw_products(const HierarchyParams& hyper, const PriorSpec& ps,
                                         Variant v, std::size_t products, Rng& rng) {
  const auto tr = traits(v);
  const bool zero = tr.process == Process::zero;
  const int nc = coefficient_count(v);
  const CoefficientHierarchy hier = coefficient_hierarchy(ps, v);
  std::vector<ProductParams> out(products);
  auto draw_shot = [&](ShotParams& sp, const std::array<GammaPrior, 3>& flat,
                       const std::array<double, 3>& rate, const std::array<double, 3>& eta) {
    for (int k = 0; k < 3; ++k) {
      double x;
      do {
        x = tr.hierarchical ? detail::draw_gamma(eta[k], rate[k], rng)
                            : detail::draw_gamma(flat[k].shape, flat[k].rate, rng);
      } while (!(x > 0.0));
      shot_component(sp, k) = x + (tr.hierarchical ? kShotShift[k] : flat[k].shift);
    }
  };
  for (auto& pp : out) {
    double* theta = zero ? pp.theta_z.data() : pp.theta_c.data();
    const double* rho = zero ? hyper.rho_z.data() : hyper.rho_c.data();
    if (!tr.covariates) {
      const NormalPrior& np = zero ? ps.zero.base : ps.count.base;
      theta[0] = detail::draw_normal(np.mean, np.variance, rng);
    } else {
      for (int j = 0; j < nc; ++j) {
        if (tr.hierarchical) {
          theta[j] = detail::draw_normal(rho[j], hier.sigma2[j], rng);
        } else {
          const NormalPrior& np = zero ? ps.zero.flat_theta[j] : ps.count.flat_theta[j];
          theta[j] = detail::draw_normal(np.mean, np.variance, rng);
        }
      }
    }
    if (tr.self_excitation) {
      if (zero)
        draw_shot(pp.shot_z, ps.zero.flat_shot, ps.zero.shot_rate, hyper.eta_z);
      else
        draw_shot(pp.shot_c, ps.count.flat_shot, ps.count.shot_rate, hyper.eta_c);
    }
    if (tr.cross_excitation)
      draw_shot(pp.cross_shot_z, ps.zero.flat_cross, ps.zero.cross_rate, hyper.eta_z_cross);
  }
  return out;
}

/// Draws hyper-parameters from their hyper-priors (the fields the variant
/// does not use keep their defaults).
template <class Rng>
HierarchyParams draw_hyper(const PriorSpec& ps, Variant v, Rng& rng) {
  const auto tr = traits(v);
  HierarchyParams h;
  if (!tr.hierarchical) return h;
  const bool zero = tr.process == Process::zero;
  const CoefficientHierarchy hier = coefficient_hierarchy(ps, v);
  double* rho = zero ? h.rho_z.data() : h.rho_c.data();
  for (int j = 0; j < coefficient_count(v); ++j)
    rho[j] = detail::draw_normal(hier.rho[j].mean, hier.rho[j].variance, rng);
  auto draw_eta = [&](std::array<double, 3>& eta, const std::array<GammaPrior, 3>& prior) {
    for (int k = 0; k < 3; ++k) {
      do {
        eta[k] = detail::draw_gamma(prior[k].shape, prior[k].rate, rng) + prior[k].shift;
      } while (!(eta[k] > 0.0));
    }
  };
  if (tr.self_excitation) draw_eta(zero ? h.eta_z : h.eta_c, zero ? ps.zero.eta : ps.count.eta);
  if (tr.cross_excitation) draw_eta(h.eta_z_cross, ps.zero.eta_cross);
  return h;
}

template <class Rng>
ModelState draw_prior(const PriorSpec& ps, Variant v, std::size_t products, Rng& rng) {
  ModelState st;
  st.hyper = draw_hyper(ps, v, rng);
  st.products = draw_products(st.hyper, ps, v, products, rng);
  return st;
}

}  // namespace hh
