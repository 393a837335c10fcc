#pragma once

// Synthetic hurdle panels generated day by day from known parameters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkes_hurdle/covariates.hpp"
#include "hawkes_hurdle/excitation.hpp"
#include "hawkes_hurdle/model.hpp"
#include "hawkes_hurdle/panel.hpp"
#include "hawkes_hurdle/params.hpp"

namespace hh {

struct ScenarioSpec {
  Date start = std::chrono::year{2013} / std::chrono::October / 1;
  int days = 364;
  std::vector<Product> products;
  std::vector<std::vector<double>> prices;  // [product][day], > 0
  std::vector<ProductParams> truths;        // used by simulate_panel
  HierarchyParams hyper;                    // used by simulate_hierarchical
  PriorSpec priors;                         // fixed hierarchy scales
  ModelSpec model;
  std::optional<int> split;
  std::uint64_t seed = 1;

  void validate() const {
    if (days < 1) throw std::invalid_argument("scenario: days must be >= 1");
    if (products.empty()) throw std::invalid_argument("scenario: no products");
    if (prices.size() != products.size())
      throw std::invalid_argument("scenario: one price path per product required");
    for (const auto& p : products)
      if (p.brand.empty()) throw std::invalid_argument("scenario: empty brand for " + p.id);
    for (const auto& path : prices) {
      if (static_cast<int>(path.size()) != days)
        throw std::invalid_argument("scenario: price path length differs from days");
      for (double x : path)
        if (!(x > 0.0) || !std::isfinite(x))
          throw std::invalid_argument("scenario: prices must be positive");
    }
    if (split && (*split < 0 || *split > days))
      throw std::invalid_argument("scenario: split outside the horizon");
  }
};

/// Panel plus the latent quantities drawn along the way.
struct SimulationResult {
  SalesPanel panel;
  std::vector<ProductParams> truths;
  std::vector<std::vector<double>> p;       // P(E_it = 1)
  std::vector<std::vector<double>> lambda;  // count mean on every day
  // Log densities of the realised outcomes: Bernoulli every day, shifted NB
  // on event days (0 otherwise).
  std::vector<std::vector<double>> log_density_zero;
  std::vector<std::vector<double>> log_density_count;
};

/// Runs the generative model forward: day t uses only histories up to t - 1,
/// then the realised outcomes of day t enter the self and cross histories.
inline SimulationResult simulate_panel(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.truths.size() != spec.products.size())
    throw std::invalid_argument("scenario: one truth per product required");
  const Variant zv = spec.model.zero;
  const Variant cv = spec.model.count;
  require_process(zv, Process::zero);
  require_process(cv, Process::count);
  const auto tz = traits(zv);
  const auto tc = traits(cv);
  const std::size_t n = spec.products.size();
  const int L = spec.model.truncation;
  const double phi = spec.model.dispersion;

  SimulationResult out;
  out.truths = spec.truths;
  out.panel = make_empty_panel(spec.start, spec.days);
  out.panel.split = spec.split;
  for (std::size_t i = 0; i < n; ++i)
    out.panel.add_product(spec.products[i], std::vector<int>(spec.days, 0), spec.prices[i]);
  out.p.assign(n, std::vector<double>(spec.days, 0.0));
  out.lambda.assign(n, std::vector<double>(spec.days, 0.0));
  out.log_density_zero.assign(n, std::vector<double>(spec.days, 0.0));
  out.log_density_count.assign(n, std::vector<double>(spec.days, 0.0));

  std::vector<KernelTable> self_z(n), cross_z(n), self_c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pp = spec.truths[i];
    if (tz.self_excitation) self_z[i] = KernelTable(pp.shot_z.mu, pp.shot_z.tau, L);
    if (tz.cross_excitation) cross_z[i] = KernelTable(pp.cross_shot_z.mu, pp.cross_shot_z.tau, L);
    if (tc.self_excitation) self_c[i] = KernelTable(pp.shot_c.mu, pp.shot_c.tau, L);
  }

  std::vector<std::string> brands;
  for (const auto& p : spec.products) brands.push_back(p.brand);
  HistoryState history(brands);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<int> today(n);

  for (int t = 0; t < spec.days; ++t) {
    const SeasonalFlags seasonal = seasonalize(out.panel.date_at(t), spec.model.seasonal);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pp = spec.truths[i];
      const DesignRow row{std::log(spec.prices[i][t]), seasonal};
      const double s = tz.self_excitation
                           ? shot_sum(history.self_events(i), t, pp.shot_z.kappa, self_z[i])
                           : 0.0;
      const double sx = tz.cross_excitation
                            ? shot_sum(history.cross_events(i), t, pp.cross_shot_z.kappa,
                                       cross_z[i])
                            : 0.0;
      const double x = zero_logit(row, s, sx, pp, zv);
      const double sc =
          tc.self_excitation ? shot_sum(history.self_events(i), t, pp.shot_c.kappa, self_c[i])
                             : 0.0;
      const double eta = count_log_mean(row, sc, pp, cv);
      out.p[i][t] = inverse_logit(x);
      out.lambda[i][t] = count_mean(eta, spec.model.count_link);

      const bool event = uniform(rng) < out.p[i][t];
      out.log_density_zero[i][t] = event ? log_inverse_logit(x) : log1m_inverse_logit(x);
      today[i] = 0;
      if (event) {
        const int y = shifted_nb_sample(out.lambda[i][t], phi, rng);
        today[i] = y;
        out.log_density_count[i][t] = count_log_density(y, eta, phi, spec.model.count_link,
                                                        shifted_nb_log_coefficient(y, phi));
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.panel.units[i][t] = today[i];
    history.append_day(today);
  }
  return out;
}

/// Draws product-level truths from `spec.hyper` under the hierarchy scales in
/// `spec.priors`, then simulates with them.
inline SimulationResult simulate_hierarchical(ScenarioSpec spec) {
  spec.validate();
  const std::size_t n = spec.products.size();
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto zero = draw_products(spec.hyper, spec.priors, spec.model.zero, n, rng);
  const auto count = draw_products(spec.hyper, spec.priors, spec.model.count, n, rng);
  spec.truths.assign(n, ProductParams{});
  for (std::size_t i = 0; i < n; ++i) {
    spec.truths[i].theta_z = zero[i].theta_z;
    spec.truths[i].shot_z = zero[i].shot_z;
    spec.truths[i].cross_shot_z = zero[i].cross_shot_z;
    spec.truths[i].theta_c = count[i].theta_c;
    spec.truths[i].shot_c = count[i].shot_c;
  }
  return simulate_panel(spec);
}

/// Piecewise-constant price paths: each product starts uniform in [lo, hi]
/// and redraws its price with probability `change_rate` per day.
inline std::vector<std::vector<double>> random_price_paths(std::size_t products, int days,
                                                           double lo, double hi,
                                                           double change_rate,
                                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(lo, hi);
  std::bernoulli_distribution change(change_rate);
  std::vector<std::vector<double>> out(products, std::vector<double>(days));
  for (auto& path : out) {
    double price = level(rng);
    for (int t = 0; t < days; ++t) {
      if (t > 0 && change(rng)) price = level(rng);
      path[t] = price;
    }
  }
  return out;
}

/// Hierarchical HBE/HBE scenario with retail-like sparsity: brands of three
/// products, prices in [0.7, 1.4] and a zero-process intercept mean of -4.5,
/// which puts the median share of sale days near 1-3%.
inline ScenarioSpec sparse_retail_scenario(std::size_t products, int days, std::uint64_t seed) {
  ScenarioSpec s;
  s.days = days;
  for (std::size_t i = 0; i < products; ++i)
    s.products.push_back({"p" + std::to_string(i + 1), "brand" + std::to_string(i / 3 + 1)});
  s.prices = random_price_paths(products, days, 0.7, 1.4, 0.02, seed * 7919 + 1);
  s.hyper.rho_z[0] = -4.5;
  s.hyper.eta_z = {5.0, 1.0, 10.0};
  s.hyper.eta_z_cross = {2.0, 1.0, 10.0};
  s.hyper.rho_c = {1.0, -1.0};
  s.hyper.eta_c = {1.0, 3.0, 4.0};
  s.model.zero = Variant::zero_hbe;
  s.model.count = Variant::count_hbe;
  s.seed = seed;
  return s;
}

/// Mean length of maximal runs of consecutive event days; 0 without events.
inline double mean_run_length(std::span<const int> units) {
  int runs = 0, total = 0, current = 0;
  for (int y : units) {
    if (y >= 1) {
      ++current;
    } else if (current > 0) {
      ++runs;
      total += current;
      current = 0;
    }
  }
  if (current > 0) {
    ++runs;
    total += current;
  }
  return runs == 0 ? 0.0 : static_cast<double>(total) / runs;
}

}  // namespace hh
