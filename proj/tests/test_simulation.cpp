#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hawkes_hurdle/model.hpp"
#include "hawkes_hurdle/simulation.hpp"

using namespace hh;

namespace {

ScenarioSpec single_product(int days, double theta, ShotParams shot, std::uint64_t seed,
                            Variant zero = Variant::zero_be) {
  ScenarioSpec s;
  s.days = days;
  s.products = {{"p1", "b1"}};
  s.prices = {std::vector<double>(days, 1.0)};
  ProductParams pp;
  pp.theta_z[0] = theta;
  pp.shot_z = shot;
  s.truths = {pp};
  s.model.zero = zero;
  s.model.count = Variant::count_base;
  s.seed = seed;
  return s;
}

int total_events(const SalesPanel& panel) {
  int n = 0;
  for (const auto& u : panel.units)
    for (int y : u) n += y >= 1;
  return n;
}

}  // namespace

TEST(Simulate, IidBernoulliFrequency) {
  const double theta = -1.3;
  auto spec = single_product(100000, theta, ShotParams{}, 5, Variant::zero_base);
  const auto r = simulate_panel(spec);
  const double p = inverse_logit(theta);
  const double freq = static_cast<double>(total_events(r.panel)) / spec.days;
  EXPECT_NEAR(freq, p, 3.0 * std::sqrt(p * (1 - p) / spec.days));
}

TEST(Simulate, ClusteredSetHasLongerRuns) {
  double run1 = 0.0, run2 = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto a = simulate_panel(single_product(364, -3.2, {3.1, 1.0, 5.0}, seed));
    const auto b = simulate_panel(single_product(364, -2.5, {5.0, 5.0, 60.0}, seed));
    run1 += mean_run_length(a.panel.units[0]);
    run2 += mean_run_length(b.panel.units[0]);
  }
  EXPECT_GT(run2 / 100, run1 / 100);
}

TEST(Simulate, LatentTracesFollowTheLinks) {
  const auto r = simulate_panel(single_product(50, -3.2, {3.1, 1.0, 5.0}, 9));
  const auto& u = r.panel.units[0];
  for (int t = 1; t < 50; ++t) {
    const double expected = inverse_logit(-3.2 + (u[t - 1] >= 1 ? 3.1 : 0.0));
    EXPECT_NEAR(r.p[0][t], expected, 1e-15);
  }
  EXPECT_NEAR(r.p[0][0], inverse_logit(-3.2), 1e-15);
}

TEST(Simulate, SingleProductBrandHasNoCrossEffect) {
  auto be = single_product(364, -2.0, {2.0, 2.0, 3.0}, 21, Variant::zero_be);
  auto bec = be;
  bec.model.zero = Variant::zero_bec;
  bec.truths[0].cross_shot_z = {4.0, 2.0, 3.0};
  const auto a = simulate_panel(be);
  const auto b = simulate_panel(bec);
  EXPECT_EQ(a.panel.units, b.panel.units);
  EXPECT_EQ(a.p, b.p);
  const auto hist = event_indicators(b.panel);
  for (auto x : hist.cross_events(0)) EXPECT_EQ(x, 0);
}

TEST(Simulate, LoglikAgreesExactly) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ScenarioSpec s = sparse_retail_scenario(5, 200, seed);
    s.hyper.rho_z[0] = -2.0;
    s.model.zero = Variant::zero_hbec;
    s.model.count = Variant::count_hbe;
    const auto r = simulate_hierarchical(s);
    const ModelData data = make_model_data(r.panel, s.model, r.panel.grid());

    double zero = 0.0, count = 0.0;
    for (std::size_t i = 0; i < r.truths.size(); ++i) {
      double zi = 0.0, ci = 0.0;
      for (int t = 0; t < s.days; ++t) {
        zi += r.log_density_zero[i][t];
        if (r.panel.units[i][t] >= 1) ci += r.log_density_count[i][t];
      }
      zero += zi;
      count += ci;
    }
    EXPECT_EQ(loglik_zero(data, r.truths, s.model.zero), zero);
    EXPECT_EQ(loglik_count(data, r.truths, s.model.count), count);
    EXPECT_GT(total_events(r.panel), 0);
  }
}

TEST(Simulate, MoreEventsWithExcitation) {
  double with = 0.0, without = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    with += total_events(simulate_panel(single_product(364, -3.2, {5.0, 1.0, 5.0}, seed)).panel);
    without += total_events(simulate_panel(single_product(364, -3.2, {0.0, 1.0, 5.0}, seed)).panel);
  }
  EXPECT_GT(with / 200, without / 200);
}

TEST(Simulate, CrossExcitationRaisesPeerEvents) {
  double with = 0.0, without = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ScenarioSpec s;
    s.days = 364;
    s.products = {{"p1", "b"}, {"p2", "b"}};
    s.prices.assign(2, std::vector<double>(364, 1.0));
    ProductParams pp;
    pp.theta_z[0] = -3.0;
    pp.cross_shot_z = {3.0, 2.0, 3.0};
    s.truths = {pp, pp};
    s.model.zero = Variant::zero_bec;
    s.model.count = Variant::count_base;
    s.seed = seed;
    with += total_events(simulate_panel(s).panel);
    for (auto& t : s.truths) t.cross_shot_z.kappa = 0.0;
    s.model.zero = Variant::zero_be;
    without += total_events(simulate_panel(s).panel);
  }
  EXPECT_GT(with, without);
}

TEST(Simulate, DegenerateHierarchySharesCoefficients) {
  ScenarioSpec s = sparse_retail_scenario(6, 30, 4);
  s.priors.zero.sigma2.fill(1e-12);
  s.priors.count.sigma2.fill(1e-12);
  const auto r = simulate_hierarchical(s);
  for (std::size_t i = 1; i < r.truths.size(); ++i) {
    for (int j = 0; j < kZeroCoefficients; ++j)
      EXPECT_NEAR(r.truths[i].theta_z[j], r.truths[0].theta_z[j], 1e-4);
    for (int j = 0; j < kCountCoefficients; ++j)
      EXPECT_NEAR(r.truths[i].theta_c[j], r.truths[0].theta_c[j], 1e-4);
  }
}

TEST(Simulate, RetailSparsity) {
  const auto r = simulate_hierarchical(sparse_retail_scenario(17, 364, 1));
  std::vector<double> share;
  for (const auto& u : r.panel.units) {
    int e = 0;
    for (int y : u) e += y >= 1;
    share.push_back(static_cast<double>(e) / 364.0);
  }
  std::sort(share.begin(), share.end());
  EXPECT_GE(share[8], 0.005);
  EXPECT_LE(share[8], 0.05);
  EXPECT_EQ(r.panel.product_count(), 17u);
  EXPECT_EQ(r.panel.days, 364);
}

TEST(Simulate, Reproducible) {
  const auto spec = sparse_retail_scenario(4, 100, 11);
  const auto a = simulate_hierarchical(spec);
  const auto b = simulate_hierarchical(spec);
  EXPECT_EQ(a.panel.units, b.panel.units);
  EXPECT_EQ(a.p, b.p);
  auto other = spec;
  other.seed = 12;
  EXPECT_NE(simulate_hierarchical(other).panel.units, a.panel.units);
}

TEST(Simulate, RejectsBadScenarios) {
  auto s = single_product(10, -1.0, {}, 1);
  s.prices[0][3] = 0.0;
  EXPECT_THROW(simulate_panel(s), std::invalid_argument);
  s = single_product(10, -1.0, {}, 1);
  s.products[0].brand.clear();
  EXPECT_THROW(simulate_panel(s), std::invalid_argument);
  s = single_product(10, -1.0, {}, 1);
  s.prices[0].pop_back();
  EXPECT_THROW(simulate_panel(s), std::invalid_argument);
}

TEST(RunLength, Basics) {
  EXPECT_EQ(mean_run_length(std::vector<int>{0, 0, 0}), 0.0);
  EXPECT_EQ(mean_run_length(std::vector<int>{1, 1, 0, 2, 0, 0, 1, 1, 1}), 2.0);
}
