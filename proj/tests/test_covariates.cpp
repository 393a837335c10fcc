#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numeric>

#include "hawkes_hurdle/covariates.hpp"

using namespace hh;
using namespace std::chrono;

namespace {

Date ymd(int y, unsigned m, unsigned d) { return year{y} / month{m} / day{d}; }

int sum_range(const SeasonalFlags& f, int begin, int end) {
  return std::accumulate(f.begin() + begin, f.begin() + end, 0);
}

SalesPanel constant_panel(Date start, int days, double price) {
  SalesPanel panel = make_empty_panel(start, days);
  panel.add_product({"p1", "b1"}, std::vector<int>(days, 0), std::vector<double>(days, price));
  return panel;
}

}  // namespace

TEST(Seasonalize, DoubleBaselineIsAllZero) {
  const SeasonalConfig cfg;
  // 2013-12-29 is a Sunday after the default window.
  const auto f = seasonalize(ymd(2013, 12, 29), cfg);
  EXPECT_EQ(sum_range(f, 0, kSeasonalFlags), 0);
}

TEST(Seasonalize, TuesdayInJuly) {
  const auto f = seasonalize(ymd(2014, 7, 15), SeasonalConfig{});
  const auto names = seasonal_names(SeasonalConfig{});
  for (int k = 0; k < kSeasonalFlags; ++k) {
    const bool expected = names[k] == "tue" || names[k] == "jul";
    EXPECT_EQ(f[k], expected ? 1 : 0) << names[k];
  }
  EXPECT_EQ(f[2], 1);   // Tue
  EXPECT_EQ(f[13], 1);  // Jul
}

TEST(Seasonalize, ChristmasSaturday) {
  const auto f = seasonalize(ymd(2014, 12, 20), SeasonalConfig{});
  EXPECT_EQ(weekday{sys_days{ymd(2014, 12, 20)}}, Saturday);
  EXPECT_EQ(f[0], 1);
  EXPECT_EQ(f[6], 1);
  EXPECT_EQ(sum_range(f, 7, 18), 0);
  EXPECT_EQ(sum_range(f, 0, 18), 2);
}

TEST(Seasonalize, ChristmasWindowEdges) {
  const SeasonalConfig cfg;
  EXPECT_EQ(seasonalize(ymd(2014, 11, 30), cfg)[0], 0);
  EXPECT_EQ(seasonalize(ymd(2014, 12, 1), cfg)[0], 1);
  EXPECT_EQ(seasonalize(ymd(2014, 12, 26), cfg)[0], 1);
  EXPECT_EQ(seasonalize(ymd(2014, 12, 27), cfg)[0], 0);
}

TEST(Seasonalize, WrappingWindowAndCustomBaselines) {
  SeasonalConfig cfg;
  cfg.christmas_begin = December / 20;
  cfg.christmas_end = January / 6;
  cfg.weekday_baseline = Monday;
  cfg.month_baseline = January;
  EXPECT_EQ(seasonalize(ymd(2015, 1, 3), cfg)[0], 1);
  EXPECT_EQ(seasonalize(ymd(2014, 12, 22), cfg)[0], 1);
  EXPECT_EQ(seasonalize(ymd(2015, 1, 7), cfg)[0], 0);
  EXPECT_EQ(seasonalize(ymd(2014, 12, 19), cfg)[0], 0);
  // 2015-01-05 is a Monday in January: both baselines.
  EXPECT_EQ(sum_range(seasonalize(ymd(2015, 1, 5), cfg), 1, 18), 0);
  const auto names = seasonal_names(cfg);
  EXPECT_EQ(names[1], "tue");
  EXPECT_EQ(names[6], "sun");
  EXPECT_EQ(names[7], "feb");
  EXPECT_EQ(names[17], "dec");
}

TEST(Seasonalize, BlockSumsOverAYear) {
  const SeasonalConfig cfg;
  std::array<int, kSeasonalFlags> totals{};
  for (int t = 0; t < 365; ++t) {
    const auto f = seasonalize(add_days(ymd(2014, 1, 1), t), cfg);
    EXPECT_LE(sum_range(f, 1, 7), 1);
    EXPECT_LE(sum_range(f, 7, 18), 1);
    for (int k = 0; k < kSeasonalFlags; ++k) totals[k] += f[k];
  }
  const int month_days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30};
  for (int m = 0; m < 11; ++m) EXPECT_EQ(totals[7 + m], month_days[m]);
  EXPECT_EQ(totals[0], 26);
}

TEST(BuildDesign, ConstantPrice) {
  const auto panel = constant_panel(ymd(2014, 1, 1), 10, 10.0);
  const auto design = build_design(panel, SeasonalConfig{});
  ASSERT_EQ(design.size(), 1u);
  ASSERT_EQ(design[0].size(), 10u);
  for (const auto& row : design[0]) EXPECT_DOUBLE_EQ(row.log_price, std::log(10.0));
}

TEST(BuildDesign, TwoDatesAscending) {
  const auto panel = constant_panel(ymd(2014, 7, 14), 2, 1.0);
  const auto design = build_design(panel, SeasonalConfig{});
  ASSERT_EQ(design[0].size(), 2u);
  EXPECT_EQ(design[0][0].seasonal, seasonalize(ymd(2014, 7, 14), SeasonalConfig{}));
  EXPECT_EQ(design[0][1].seasonal, seasonalize(ymd(2014, 7, 15), SeasonalConfig{}));
}

TEST(BuildDesign, FiftyTwoMondays) {
  const auto panel = constant_panel(ymd(2013, 10, 1), 364, 2.0);
  const auto design = build_design(panel, SeasonalConfig{});
  int mondays = 0;
  for (const auto& row : design[0]) mondays += row.seasonal[1];
  EXPECT_EQ(mondays, 52);
}

TEST(BuildDesign, SharedSeasonalAcrossProducts) {
  SalesPanel panel = constant_panel(ymd(2014, 3, 1), 40, 2.0);
  panel.add_product({"p2", "b2"}, std::vector<int>(40, 0), std::vector<double>(40, 3.0));
  const auto design = build_design(panel, SeasonalConfig{});
  for (int t = 0; t < 40; ++t) EXPECT_EQ(design[0][t].seasonal, design[1][t].seasonal);
}

TEST(BuildDesign, MissingPriceNamesProductAndDate) {
  SalesPanel panel = constant_panel(ymd(2014, 3, 1), 5, 2.0);
  panel.price[0][3] = std::nan("");
  try {
    build_design(panel, SeasonalConfig{});
    FAIL() << "expected MissingPriceError";
  } catch (const MissingPriceError& e) {
    EXPECT_EQ(e.product(), "p1");
    EXPECT_EQ(e.date(), ymd(2014, 3, 4));
    EXPECT_NE(std::string(e.what()).find("2014-03-04"), std::string::npos);
  }
  panel.price[0][3] = 0.0;
  EXPECT_THROW(build_design(panel, SeasonalConfig{}), MissingPriceError);
}

TEST(BuildDesign, OutsideAvailabilityIsNan) {
  SalesPanel panel = constant_panel(ymd(2014, 3, 1), 6, 2.0);
  panel.availability[0] = {2, 6};
  panel.price[0][0] = panel.price[0][1] = std::nan("");
  const auto design = build_design(panel, SeasonalConfig{});
  EXPECT_TRUE(std::isnan(design[0][0].log_price));
  EXPECT_DOUBLE_EQ(design[0][2].log_price, std::log(2.0));
}

TEST(Dates, ParseAndFormat) {
  EXPECT_EQ(parse_iso_date("2014-12-20"), ymd(2014, 12, 20));
  EXPECT_FALSE(parse_iso_date("2014-13-01"));
  EXPECT_FALSE(parse_iso_date("2014-02-30"));
  EXPECT_FALSE(parse_iso_date("14-12-20"));
  EXPECT_FALSE(parse_iso_date("2014-12-20x"));
  EXPECT_EQ(format_iso_date(ymd(2014, 1, 5)), "2014-01-05");
  EXPECT_EQ(days_between(ymd(2013, 10, 1), ymd(2014, 9, 30)), 364);
}
