#pragma once

// Seasonal indicators and per-product design rows.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkes_hurdle/panel.hpp"

namespace hh {

inline constexpr int kSeasonalFlags = 18;  // Christmas + 6 weekdays + 11 months
inline constexpr int kZeroCoefficients = 2 + kSeasonalFlags;
inline constexpr int kCountCoefficients = 2;

using SeasonalFlags = std::array<std::uint8_t, kSeasonalFlags>;

struct SeasonalConfig {
  std::chrono::month_day christmas_begin{std::chrono::December, std::chrono::day{1}};
  std::chrono::month_day christmas_end{std::chrono::December, std::chrono::day{26}};
  std::chrono::weekday weekday_baseline = std::chrono::Sunday;
  std::chrono::month month_baseline = std::chrono::December;

  /// Inclusive window; may wrap over the new year.
  bool in_christmas(Date date) const {
    const std::chrono::month_day md{date.month(), date.day()};
    if (christmas_begin <= christmas_end) return md >= christmas_begin && md <= christmas_end;
    return md >= christmas_begin || md <= christmas_end;
  }
};

namespace detail {
// Monday-first ordinal: Mon=0 .. Sun=6.
inline int monday_index(std::chrono::weekday wd) { return static_cast<int>(wd.iso_encoding()) - 1; }
}  // namespace detail

/// Flags ordered (Christmas, non-baseline weekdays Mon..Sun, non-baseline
/// months Jan..Dec). With the default baselines that is (Christmas, Mon..Sat,
/// Jan..Nov).
inline SeasonalFlags seasonalize(Date date, const SeasonalConfig& cfg) {
  SeasonalFlags flags{};
  flags[0] = cfg.in_christmas(date) ? 1 : 0;

  const int wd = detail::monday_index(std::chrono::weekday{std::chrono::sys_days{date}});
  const int wd_base = detail::monday_index(cfg.weekday_baseline);
  if (wd != wd_base) flags[1 + wd - (wd > wd_base ? 1 : 0)] = 1;

  const int mo = static_cast<int>(static_cast<unsigned>(date.month())) - 1;
  const int mo_base = static_cast<int>(static_cast<unsigned>(cfg.month_baseline)) - 1;
  if (mo != mo_base) flags[7 + mo - (mo > mo_base ? 1 : 0)] = 1;
  return flags;
}

/// Column labels matching seasonalize's ordering.
inline std::array<std::string, kSeasonalFlags> seasonal_names(const SeasonalConfig& cfg) {
  static constexpr const char* kDays[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  static constexpr const char* kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                            "jul", "aug", "sep", "oct", "nov", "dec"};
  std::array<std::string, kSeasonalFlags> names;
  names[0] = "christmas";
  int k = 1;
  const int wd_base = detail::monday_index(cfg.weekday_baseline);
  for (int d = 0; d < 7; ++d)
    if (d != wd_base) names[k++] = kDays[d];
  const int mo_base = static_cast<int>(static_cast<unsigned>(cfg.month_baseline)) - 1;
  for (int m = 0; m < 12; ++m)
    if (m != mo_base) names[k++] = kMonths[m];
  return names;
}

struct DesignRow {
  double log_price = 0.0;
  SeasonalFlags seasonal{};
};

class MissingPriceError : public std::runtime_error {
 public:
  MissingPriceError(const std::string& product, Date date)
      : std::runtime_error("missing or nonpositive price for product '" + product + "' on " +
                           format_iso_date(date)),
        product_(product),
        date_(date) {}
  const std::string& product() const { return product_; }
  Date date() const { return date_; }

 private:
  std::string product_;
  Date date_;
};

/// One row per grid day for every product. Rows outside a product's
/// availability carry a NaN log price.
inline std::vector<std::vector<DesignRow>> build_design(const SalesPanel& panel,
                                                        const SeasonalConfig& cfg) {
  std::vector<SeasonalFlags> seasonal(panel.days);
  for (int t = 0; t < panel.days; ++t) seasonal[t] = seasonalize(panel.date_at(t), cfg);

  std::vector<std::vector<DesignRow>> design(panel.product_count());
  for (std::size_t i = 0; i < panel.product_count(); ++i) {
    auto& rows = design[i];
    rows.resize(panel.days);
    const DayRange avail = panel.availability[i];
    for (int t = 0; t < panel.days; ++t) {
      rows[t].seasonal = seasonal[t];
      if (!avail.contains(t)) {
        rows[t].log_price = std::nan("");
        continue;
      }
      const double price = panel.price[i][t];
      if (!(price > 0.0) || !std::isfinite(price))
        throw MissingPriceError(panel.products[i].id, panel.date_at(t));
      rows[t].log_price = std::log(price);
    }
  }
  return design;
}

}  // namespace hh
