#pragma once

// Daily sales panel on a shared calendar grid.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hh {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO 8601 calendar date (YYYY-MM-DD).
inline std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto field = [&](std::size_t pos, std::size_t len, auto& out) {
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
  };
  if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_iso_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

inline Date add_days(Date date, int days) {
  return Date{std::chrono::sys_days{date} + std::chrono::days{days}};
}

inline int days_between(Date from, Date to) {
  return static_cast<int>((std::chrono::sys_days{to} - std::chrono::sys_days{from}).count());
}

struct Product {
  std::string id;
  std::string brand;
};

/// Half-open range of grid day indices.
struct DayRange {
  int begin = 0;
  int end = 0;

  int size() const { return end > begin ? end - begin : 0; }
  bool contains(int t) const { return t >= begin && t < end; }
  DayRange intersect(DayRange other) const {
    return {std::max(begin, other.begin), std::min(end, other.end)};
  }
};

/// Dense product x day panel. Cells outside a product's availability range
/// carry zero units and a NaN price and never enter a likelihood.
struct SalesPanel {
  Date start{};
  int days = 0;
  std::vector<Product> products;
  std::vector<std::vector<int>> units;     // [product][day]
  std::vector<std::vector<double>> price;  // [product][day]
  std::vector<DayRange> availability;      // per product
  std::optional<int> split;                // first test-window day index

  std::size_t product_count() const { return products.size(); }
  Date date_at(int t) const { return add_days(start, t); }
  DayRange grid() const { return {0, days}; }
  DayRange train_window() const { return {0, split.value_or(days)}; }
  DayRange test_window() const { return {split.value_or(days), days}; }

  std::optional<int> day_index(Date date) const {
    const int t = days_between(start, date);
    if (t < 0 || t >= days) return std::nullopt;
    return t;
  }

  std::optional<std::size_t> product_index(std::string_view id) const {
    for (std::size_t i = 0; i < products.size(); ++i)
      if (products[i].id == id) return i;
    return std::nullopt;
  }

  /// Appends a product available on every grid day.
  void add_product(Product product, std::vector<int> product_units,
                   std::vector<double> product_price) {
    if (static_cast<int>(product_units.size()) != days ||
        static_cast<int>(product_price.size()) != days)
      throw std::invalid_argument("product series length does not match the panel grid");
    products.push_back(std::move(product));
    units.push_back(std::move(product_units));
    price.push_back(std::move(product_price));
    availability.push_back(grid());
  }

  /// Panel restricted to grid days [0, end); the split is kept if it still
  /// lies inside.
  SalesPanel truncated(int end) const {
    SalesPanel out = *this;
    out.days = end;
    for (auto& u : out.units) u.resize(end);
    for (auto& p : out.price) p.resize(end);
    for (auto& a : out.availability) a = a.intersect({0, end});
    if (out.split && *out.split > end) out.split.reset();
    return out;
  }
};

inline SalesPanel make_empty_panel(Date start, int days) {
  SalesPanel panel;
  panel.start = start;
  panel.days = days;
  return panel;
}

}  // namespace hh
