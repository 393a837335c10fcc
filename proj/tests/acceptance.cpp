// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [--report FILE] [criterion ...]   (default: all of 1..9)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hawkes_hurdle/diagnostics.hpp"
#include "hawkes_hurdle/evaluation.hpp"
#include "hawkes_hurdle/hmc.hpp"
#include "hawkes_hurdle/io.hpp"
#include "hawkes_hurdle/simulation.hpp"
#include "test_support.hpp"

using namespace hh;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double var_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

std::vector<std::vector<double>> chains_of(const PosteriorDraws& d, std::size_t k) {
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < d.chain_count(); ++c) out.push_back(d.chain_column(c, k));
  return out;
}

// 1 --------------------------------------------------------------------------

Outcome distributions() {
  Outcome o;
  double worst_nb = 0.0;
  for (double mean : {1.5, 3.0, 10.0})
    for (double shape : {0.5, 1.0, 5.0}) {
      // Ratio of successive terms tends to (mean-1)/(mean-1+shape) <= 0.95 here,
      // so 20000 terms leave a tail far below 1e-9.
      double mass = 0.0;
      for (int y = 1; y <= 20000; ++y) mass += std::exp(shifted_nb_logpmf(y, mean, shape));
      worst_nb = std::max(worst_nb, std::abs(1.0 - mass));
      o.require(mass >= 1.0 - 1e-8 && mass <= 1.0 + 1e-12,
                "shifted NB mass " + fmt(mass, 12) + " at (" + fmt(mean) + ", " + fmt(shape) + ")");
    }

  double worst_kernel = 0.0;
  int grid = 0;
  for (double mu = 1.0; mu <= 8.0; mu += 0.25)
    for (double tau : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0}) {
      const KernelTable k(mu, tau, kDefaultTruncation);
      double mass = 0.0;
      for (double g : k.pmf_values()) mass += g;
      if (mu > 1.0) {
        const double ratio = (mu - 1.0) / (mu - 1.0 + tau);
        for (int d = kDefaultTruncation + 1;; ++d) {
          const double g = std::exp(shifted_nb_logpmf(d, mu, tau));
          mass += g;
          if (d > mu + 10.0 * tau && g / (1.0 - ratio) < 1e-17) break;
        }
      }
      worst_kernel = std::max(worst_kernel, std::abs(1.0 - mass));
      ++grid;
      o.require(std::abs(1.0 - mass) <= 1e-8,
                "kernel mass " + fmt(mass, 12) + " at (" + fmt(mu) + ", " + fmt(tau) + ")");
    }
  o.detail = "max |1 - mass| NB " + fmt(worst_nb, 3) + ", kernel " + fmt(worst_kernel, 3) +
             " over " + std::to_string(grid) + " kernel settings" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 2 --------------------------------------------------------------------------

Outcome gradients() {
  Outcome o;
  std::mt19937_64 rng(5);
  const SalesPanel panel =
      fixtures::random_panel(rng, {"a", "a", "b"}, 30, std::chrono::year{2014} / 11 / 20, 0.25);
  const ModelSpec spec;
  const PriorSpec priors;
  double worst = 0.0;
  int checked = 0;
  for (Variant v : kAllVariants) {
    const LogPosterior target(make_model_data(panel, spec, panel.grid()), v, priors);
    for (std::uint64_t s = 0; s < 20; ++s) {
      std::mt19937_64 r(1000 + 17 * s);
      const ModelState st = draw_prior(priors, v, panel.product_count(), r);
      const auto u = to_unconstrained(target.layout(), st);
      const auto check = fixtures::check_gradient(target, u);
      worst = std::max(worst, check.max_rel_error);
      ++checked;
      o.require(check.max_rel_error < 1e-5,
                to_string(v) + " draw " + std::to_string(s) + " " +
                    target.parameter_names()[check.worst] + " rel " + fmt(check.max_rel_error));
    }
  }
  o.detail = std::to_string(checked) + " prior draws, max relative error " + fmt(worst, 3) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 3 --------------------------------------------------------------------------

Outcome oracle() {
  Outcome o;
  const ModelSpec spec;
  const std::pair<Variant, Variant> pairs[] = {
      {Variant::zero_base, Variant::count_base}, {Variant::zero_hb, Variant::count_hb},
      {Variant::zero_be, Variant::count_be},     {Variant::zero_hbe, Variant::count_hbe},
      {Variant::zero_bec, Variant::count_hbe},   {Variant::zero_hbec, Variant::count_be}};
  double worst = 0.0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    std::mt19937_64 rng(100 + rep);
    const SalesPanel panel = fixtures::random_panel(
        rng, {"a", "a", "b"}, 30, add_days(std::chrono::year{2014} / 11 / 20, 3 * static_cast<int>(rep)));
    const ModelData data = make_model_data(panel, spec, panel.grid());
    for (auto [zv, cv] : pairs) {
      std::mt19937_64 r(rep * 31 + 1);
      const ModelState z = draw_prior(PriorSpec{}, zv, 3, r);
      const ModelState c = draw_prior(PriorSpec{}, cv, 3, r);
      std::vector<ProductParams> params = z.products;
      for (std::size_t i = 0; i < 3; ++i) {
        params[i].theta_c = c.products[i].theta_c;
        params[i].shot_c = c.products[i].shot_c;
      }
      const auto [nz, nc] = fixtures::naive_loglik(panel, panel.grid(), params, zv, cv, spec);
      const double ez = std::abs(loglik_zero(data, params, zv) - nz) / std::max(1.0, std::abs(nz));
      const double ec = std::abs(loglik_count(data, params, cv) - nc) / std::max(1.0, std::abs(nc));
      worst = std::max({worst, ez, ec});
      o.require(ez <= 1e-10, to_string(zv) + " panel " + std::to_string(rep) + " error " + fmt(ez));
      o.require(ec <= 1e-10, to_string(cv) + " panel " + std::to_string(rep) + " error " + fmt(ec));
    }
  }
  o.detail = "10 panels x 6 variant pairs, max relative error " + fmt(worst, 3) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 4 --------------------------------------------------------------------------

struct ShiftedNormal {
  std::vector<double> mu{1.0, -2.0, 0.5, 3.0, 0.0};
  std::vector<double> sd{1.0, 0.5, 2.0, 0.1, 3.0};
  std::vector<std::string> names{"x1", "x2", "x3", "x4", "x5"};

  std::size_t dimension() const { return mu.size(); }
  double log_density(std::span<const double> u, std::span<double> g = {}) const {
    double lp = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double z = (u[k] - mu[k]) / sd[k];
      lp -= 0.5 * z * z;
      if (!g.empty()) g[k] = -z / sd[k];
    }
    return lp;
  }
  template <class Rng>
  std::vector<double> initial_point(Rng& rng) const {
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<double> u(mu.size());
    for (auto& x : u) x = unif(rng);
    return u;
  }
  std::vector<double> constrain(std::span<const double> u) const { return {u.begin(), u.end()}; }
  const std::vector<std::string>& parameter_names() const { return names; }
};

Outcome sampler() {
  Outcome o;
  {
    const ShiftedNormal target;
    SamplerConfig cfg;
    const PosteriorDraws draws = run_mcmc(target, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const auto col = draws.column(k);
      const double ess = effective_sample_size(chains_of(draws, k));
      const double m = mean_of(col);
      const double z_mean = std::abs(m - target.mu[k]) / std::sqrt(var_of(col) / ess);
      // MC error of the variance from the spread of squared deviations.
      std::vector<std::vector<double>> sq = chains_of(draws, k);
      for (auto& ch : sq)
        for (auto& x : ch) x = (x - m) * (x - m);
      std::vector<double> sq_all;
      for (const auto& ch : sq) sq_all.insert(sq_all.end(), ch.begin(), ch.end());
      const double v = var_of(col);
      const double z_var = std::abs(v - target.sd[k] * target.sd[k]) /
                           std::sqrt(var_of(sq_all) / effective_sample_size(sq));
      worst = std::max({worst, z_mean, z_var});
      o.require(z_mean < 3.0, target.names[k] + " mean off by " + fmt(z_mean) + " MCSE");
      o.require(z_var < 3.0, target.names[k] + " variance off by " + fmt(z_var) + " MCSE");
    }
    for (const auto& s : draws.stats)
      o.require(std::abs(s.mean_acceptance - cfg.target_acceptance) <= 0.1,
                "acceptance " + fmt(s.mean_acceptance));
    o.detail = "normal moments within " + fmt(worst, 3) + " MCSE";
  }
  {
    const PriorSpec ps;
    const LogPosterior target(ModelData::prior_only(1, ModelSpec{}), Variant::zero_be, ps);
    SamplerConfig cfg;
    cfg.sampling_iters = 1500;
    const PosteriorDraws draws = run_mcmc(target, cfg);
    std::vector<double> mean(23), var(23);
    for (int j = 0; j < 20; ++j) {
      mean[j] = ps.zero.flat_theta[j].mean;
      var[j] = ps.zero.flat_theta[j].variance;
    }
    for (int k = 0; k < 3; ++k) {
      const auto& g = ps.zero.flat_shot[k];
      mean[20 + k] = g.shift + g.shape / g.rate;
      var[20 + k] = g.shape / (g.rate * g.rate);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < 23; ++k) {
      const auto col = draws.column(k);
      const double z =
          std::abs(mean_of(col) - mean[k]) / std::sqrt(var[k] / effective_sample_size(chains_of(draws, k)));
      worst = std::max(worst, z);
      o.require(z < 3.52, draws.names[k] + " prior mean off by " + fmt(z) + " MCSE");
      o.require(std::abs(var_of(col) / var[k] - 1.0) < 0.15,
                draws.names[k] + " prior variance ratio " + fmt(var_of(col) / var[k]));
    }
    o.detail += ", prior-only means within " + fmt(worst, 3) + " MCSE";
  }
  {
    std::mt19937_64 rng(4);
    const SalesPanel panel =
        fixtures::random_panel(rng, {"a", "a", "b"}, 40, std::chrono::year{2014} / 3 / 1, 0.2);
    const LogPosterior target(make_model_data(panel, ModelSpec{}, panel.grid()), Variant::zero_hbec,
                              PriorSpec{});
    PhasePoint z;
    z.position = target.initial_point(rng);
    z.gradient.assign(target.dimension(), 0.0);
    z.log_density = target.log_density(z.position, z.gradient);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < target.dimension(); ++k) z.momentum.push_back(normal(rng));
    const std::vector<double> inv(target.dimension(), 1.0);
    const PhasePoint start = z;
    bool ok = leapfrog(target, z, inv, 1e-3, 32);
    for (double& p : z.momentum) p = -p;
    ok = ok && leapfrog(target, z, inv, 1e-3, 32);
    double err = 0.0;
    for (std::size_t k = 0; k < start.position.size(); ++k)
      err = std::max(err, std::abs(z.position[k] - start.position[k]));
    o.require(ok && err < 1e-8, "leapfrog round trip error " + fmt(err));
    o.detail += ", leapfrog round trip " + fmt(err, 3);
  }
  return o;
}

// 5 --------------------------------------------------------------------------

struct Recovery {
  std::string name;
  double truth;
  int covered = 0;
};

Outcome recovery() {
  Outcome o;
  constexpr int kReplicates = 10;
  std::vector<Recovery> params;
  const HierarchyParams hyper = sparse_retail_scenario(1, 1, 1).hyper;
  for (int j = 0; j < kZeroCoefficients; ++j)
    params.push_back({"rho_z[" + std::to_string(j + 1) + "]", hyper.rho_z[j]});
  for (int k = 0; k < 3; ++k) params.push_back({"eta_z[" + std::to_string(k + 1) + "]", hyper.eta_z[k]});
  for (int j = 0; j < kCountCoefficients; ++j)
    params.push_back({"rho_c[" + std::to_string(j + 1) + "]", hyper.rho_c[j]});
  for (int k = 0; k < 3; ++k) params.push_back({"eta_c[" + std::to_string(k + 1) + "]", hyper.eta_c[k]});

  double share = 0.0;
  for (int rep = 0; rep < kReplicates; ++rep) {
    const ScenarioSpec spec = sparse_retail_scenario(17, 364, 500 + rep);
    const SalesPanel panel = simulate_hierarchical(spec).panel;
    std::vector<double> shares;
    for (const auto& row : summarize(panel)) shares.push_back(row.percent_sale_days());
    std::nth_element(shares.begin(), shares.begin() + 8, shares.end());
    share += shares[8] / kReplicates;

    SamplerConfig cfg;
    cfg.seed = 9000 + rep;
    for (Variant v : {Variant::zero_hbe, Variant::count_hbe}) {
      const PosteriorDraws draws = fit_process(panel, panel.grid(), spec.model, PriorSpec{}, v, cfg);
      const DiagnosticsReport diag = diagnostics(draws);
      progress("replicate " + std::to_string(rep + 1) + " " + to_string(v) + " max rhat " +
               fmt(diag.max_rhat));
      for (auto& p : params) {
        const auto it = std::find(draws.names.begin(), draws.names.end(), p.name);
        if (it == draws.names.end()) continue;
        const auto col = draws.column(static_cast<std::size_t>(it - draws.names.begin()));
        const double lo = sample_quantile(col, 0.05), hi = sample_quantile(col, 0.95);
        p.covered += lo <= p.truth && p.truth <= hi;
      }
    }
  }
  int worst = kReplicates;
  std::string worst_name;
  for (const auto& p : params) {
    if (p.covered < worst) {
      worst = p.covered;
      worst_name = p.name;
    }
    o.require(p.covered >= 7, p.name + " covered " + std::to_string(p.covered) + "/10");
  }
  o.detail = std::to_string(params.size()) + " hyper-parameters, lowest coverage " +
             std::to_string(worst) + "/10 (" + worst_name + "), median sale-day share " +
             fmt(share, 3) + "%" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 6 --------------------------------------------------------------------------

SamplerConfig ordering_sampler(std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.warmup_iters = 500;
  cfg.sampling_iters = 500;
  cfg.seed = seed;
  return cfg;
}

double test_lppd(const SalesPanel& panel, const ModelSpec& spec, Variant v, std::uint64_t seed) {
  const PosteriorDraws draws =
      fit_process(panel, panel.train_window(), spec, PriorSpec{}, v, ordering_sampler(seed));
  const auto states = posterior_states(draws, v, panel.product_count());
  const Predictions pred = sequential_predict(states, panel, spec, v);
  const auto scores =
      process_of(v) == Process::zero ? lppd_zero(pred, panel) : lppd_count(pred, panel);
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

Outcome ordering() {
  Outcome o;
  constexpr int kReplicates = 10;
  double hb_z = 0, hbe_z = 0, hb_c = 0, hbe_c = 0, hbe_x = 0, hbec_x = 0;
  int wins_z = 0, wins_c = 0, wins_x = 0;
  for (int rep = 0; rep < kReplicates; ++rep) {
    ScenarioSpec spec = sparse_retail_scenario(17, 464, 700 + rep);
    SalesPanel panel = simulate_hierarchical(spec).panel;
    panel.split = 364;
    const std::uint64_t seed = 7100 + rep;
    const double a = test_lppd(panel, spec.model, Variant::zero_hb, seed);
    const double b = test_lppd(panel, spec.model, Variant::zero_hbe, seed);
    const double c = test_lppd(panel, spec.model, Variant::count_hb, seed);
    const double d = test_lppd(panel, spec.model, Variant::count_hbe, seed);
    hb_z += a / kReplicates;
    hbe_z += b / kReplicates;
    hb_c += c / kReplicates;
    hbe_c += d / kReplicates;
    wins_z += b > a;
    wins_c += d > c;
    progress("self replicate " + std::to_string(rep + 1) + ": zero HB " + fmt(a) + " HBE " +
             fmt(b) + ", count HB " + fmt(c) + " HBE " + fmt(d));
  }
  for (int rep = 0; rep < kReplicates; ++rep) {
    ScenarioSpec spec = sparse_retail_scenario(17, 464, 800 + rep);
    spec.model.zero = Variant::zero_hbec;
    spec.hyper.eta_z_cross = {8.0, 1.0, 10.0};
    SalesPanel panel = simulate_hierarchical(spec).panel;
    panel.split = 364;
    const std::uint64_t seed = 8100 + rep;
    const double a = test_lppd(panel, spec.model, Variant::zero_hbe, seed);
    const double b = test_lppd(panel, spec.model, Variant::zero_hbec, seed);
    hbe_x += a / kReplicates;
    hbec_x += b / kReplicates;
    wins_x += b > a;
    progress("cross replicate " + std::to_string(rep + 1) + ": zero HBE " + fmt(a) + " HBEC " +
             fmt(b));
  }
  o.require(hbe_z > hb_z, "zero HBE does not beat HB");
  o.require(hbe_c > hb_c, "count HBE does not beat HB");
  o.require(hbec_x > hbe_x, "zero HBEC does not beat HBE on cross data");
  o.detail = "mean test lppd zero HB " + fmt(hb_z, 5) + " < HBE " + fmt(hbe_z, 5) + " (" +
             std::to_string(wins_z) + "/10), count HB " + fmt(hb_c, 5) + " < HBE " +
             fmt(hbe_c, 5) + " (" + std::to_string(wins_c) + "/10), cross HBE " + fmt(hbe_x, 5) +
             " < HBEC " + fmt(hbec_x, 5) + " (" + std::to_string(wins_x) + "/10)" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 7 --------------------------------------------------------------------------

ScenarioSpec clustering_path(double theta, ShotParams shot, std::uint64_t seed) {
  ScenarioSpec s;
  s.days = 364;
  s.products = {{"p1", "b1"}};
  s.prices = {std::vector<double>(364, 1.0)};
  ProductParams pp;
  pp.theta_z[0] = theta;
  pp.shot_z = shot;
  s.truths = {pp};
  s.model.zero = Variant::zero_be;
  s.model.count = Variant::count_base;
  s.seed = seed;
  return s;
}

Outcome clustering() {
  Outcome o;
  std::vector<double> first, second;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    first.push_back(mean_run_length(
        simulate_panel(clustering_path(-3.2, {3.1, 1.0, 5.0}, seed)).panel.units[0]));
    second.push_back(mean_run_length(
        simulate_panel(clustering_path(-2.5, {5.0, 5.0, 60.0}, seed)).panel.units[0]));
  }
  const double m1 = mean_of(first), m2 = mean_of(second);
  const double se = std::sqrt(var_of(first) / 100 + var_of(second) / 100);
  o.require(m1 != m2, "mean run lengths tie");
  o.require(std::abs(m2 - m1) > 3.0 * se, "difference within 3 standard errors");
  o.detail = "mean run length (-3.2, 3.1, 1, 5) " + fmt(m1) + " vs (-2.5, 5, 5, 60) " + fmt(m2) +
             ", gap " + fmt(std::abs(m2 - m1) / se, 3) + " SE";
  return o;
}

// 8 --------------------------------------------------------------------------

// Near-continuous outcomes: sales almost every day with large counts, so the
// nominal level is not swamped by the discreteness of the predictive.
ScenarioSpec calibration_scenario(std::uint64_t seed) {
  ScenarioSpec s = sparse_retail_scenario(6, 220, seed);
  s.hyper.rho_z[0] = 3.0;
  s.hyper.rho_c = {4.5, -1.0};
  s.split = 160;
  return s;
}

Outcome calibration() {
  Outcome o;
  constexpr int kReplicates = 20;
  std::size_t hits = 0, total = 0;
  for (int rep = 0; rep < kReplicates; ++rep) {
    const ScenarioSpec spec = calibration_scenario(900 + rep);
    SalesPanel panel = simulate_hierarchical(spec).panel;
    panel.split = 160;
    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.warmup_iters = 400;
    cfg.sampling_iters = 400;
    cfg.seed = 9900 + rep;
    const auto zero = fit_process(panel, panel.train_window(), spec.model, PriorSpec{},
                                  spec.model.zero, cfg);
    const auto count = fit_process(panel, panel.train_window(), spec.model, PriorSpec{},
                                   spec.model.count, cfg);
    ForecastOptions opt;
    opt.replicates = 5;
    opt.seed = 99 + rep;
    const EvalReport rep_eval = evaluate(panel, zero, count, spec.model, opt);
    for (const auto& d : rep_eval.traces) hits += d.forecast.contains(d.units);
    total += rep_eval.traces.size();
    progress("calibration replicate " + std::to_string(rep + 1) + " coverage " +
             fmt(rep_eval.coverage()));
  }
  const double coverage = static_cast<double>(hits) / static_cast<double>(total);
  o.require(std::abs(coverage - 0.95) <= 0.03, "coverage outside 95% +- 3%");
  o.detail = "coverage " + fmt(100.0 * coverage) + "% over " + std::to_string(total) +
             " product-days";
  return o;
}

// 9 --------------------------------------------------------------------------

Outcome summary_check() {
  Outcome o;
  std::vector<int> units(364, 0);
  for (int t = 0; t < 195; ++t) units[t * 364 / 195] = 2;
  units[0] = 21;  // 194 * 2 + 21 = 409
  SalesPanel panel = make_empty_panel(std::chrono::year{2013} / 10 / 1, 364);
  panel.add_product({"p1", "b1"}, units, std::vector<double>(364, 1.0));
  std::ostringstream out;
  write_summary_csv(out, summarize(panel));
  const std::string text = out.str();
  o.require(text.find("p1,b1,409,53.57\n") != std::string::npos, "summary row: " + text);
  o.detail = "summary row p1,b1,409,53.57";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "distribution normalization", 1.0, distributions},
      {2, "gradient finite differences", 60.0, gradients},
      {3, "likelihood oracle", 10.0, oracle},
      {4, "sampler validity", 120.0, sampler},
      {5, "parameter recovery", 1800.0, recovery},
      {6, "model ordering", 3600.0, ordering},
      {7, "clustering mechanism", 60.0, clustering},
      {8, "predictive calibration", 900.0, calibration},
      {9, "summary pipeline", 1.0, summary_check},
  };
  std::set<int> selected;
  std::ofstream report;
  for (int a = 1; a < argc; ++a) {
    if (std::string(argv[a]) == "--report" && a + 1 < argc)
      report.open(argv[++a]);
    else
      selected.insert(std::atoi(argv[a]));
  }

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) o.require(false, "runtime over budget");
    failures += !o.pass;
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name
         << "): " << o.detail << " [" << fmt(secs, 3) << " s, budget " << fmt(c.budget_seconds)
         << " s]\n";
    std::cout << line.str() << std::flush;
    if (report.is_open()) report << line.str() << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
