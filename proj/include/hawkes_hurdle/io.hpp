#pragma once

// Long-format panel CSV, summaries, posterior-draw files and report tables.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hawkes_hurdle/diagnostics.hpp"
#include "hawkes_hurdle/evaluation.hpp"
#include "hawkes_hurdle/hmc.hpp"
#include "hawkes_hurdle/panel.hpp"
#include "hawkes_hurdle/params.hpp"
#include "hawkes_hurdle/posterior.hpp"
#include "hawkes_hurdle/variant.hpp"

namespace hh {

inline constexpr std::string_view kPanelHeader = "date,product_id,brand,units,price";

/// Malformed input data. `row()` is the 1-based line number (0 when the
/// problem is not tied to one line).
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& source, std::size_t row, const std::string& what)
      : std::runtime_error(source + (row ? ":" + std::to_string(row) : std::string()) + ": " +
                           what),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path, 0, "cannot open file");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Panel CSV

/// Reads the long-format panel. Products keep their order of first
/// appearance; each product is available from its first to its last date and
/// needs one row per day in between. An empty units field means 0.
inline SalesPanel read_panel_csv(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  if (line != kPanelHeader)
    throw DataError(source, row, "expected header '" + std::string(kPanelHeader) + "'");

  struct Cell {
    int units;
    double price;
  };
  struct Series {
    std::string brand;
    std::map<int, Cell> cells;  // day offset from the first date seen
  };
  std::vector<std::string> order;
  std::map<std::string, Series> series;
  std::optional<Date> origin;
  int lo = 0, hi = 0;

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) throw DataError(source, row, "expected 5 fields, found " + std::to_string(f.size()));
    const auto date = parse_iso_date(f[0]);
    if (!date) throw DataError(source, row, "malformed date '" + std::string(f[0]) + "'");
    const std::string id(f[1]);
    const std::string brand(f[2]);
    if (id.empty()) throw DataError(source, row, "empty product_id");
    if (brand.empty()) throw DataError(source, row, "empty brand");
    long long units = 0;
    if (!f[3].empty()) {
      const auto u = parse_integer(f[3]);
      if (!u) throw DataError(source, row, "units must be an integer, got '" + std::string(f[3]) + "'");
      if (*u < 0) throw DataError(source, row, "negative units");
      if (*u > 1'000'000'000) throw DataError(source, row, "units out of range");
      units = *u;
    }
    const auto price = parse_double(f[4]);
    if (f[4].empty()) throw DataError(source, row, "missing price");
    if (!price || !std::isfinite(*price)) throw DataError(source, row, "malformed price '" + std::string(f[4]) + "'");
    if (!(*price > 0.0)) throw DataError(source, row, "price must be > 0");

    if (!origin) origin = *date;
    const int t = days_between(*origin, *date);
    auto [it, fresh] = series.try_emplace(id);
    if (fresh) {
      order.push_back(id);
      it->second.brand = brand;
    } else if (it->second.brand != brand) {
      throw DataError(source, row, "product " + id + " changes brand from " + it->second.brand +
                                       " to " + brand);
    }
    if (!it->second.cells.emplace(t, Cell{static_cast<int>(units), *price}).second)
      throw DataError(source, row, "duplicate row for product " + id + " on " +
                                       format_iso_date(*date));
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (order.empty()) throw DataError(source, 0, "no data rows");

  const Date start = add_days(*origin, lo);
  const int days = hi - lo + 1;
  SalesPanel panel = make_empty_panel(start, days);
  std::vector<int> covered(days, 0);
  for (const auto& id : order) {
    const Series& s = series.at(id);
    const int first = s.cells.begin()->first - lo;
    const int last = s.cells.rbegin()->first - lo;
    std::vector<int> units(days, 0);
    std::vector<double> price(days, std::nan(""));
    int expect = first;
    for (const auto& [t0, cell] : s.cells) {
      const int t = t0 - lo;
      if (t != expect)
        throw DataError(source, 0, "product " + id + " has no row for " +
                                       format_iso_date(add_days(start, expect)) +
                                       " inside its availability range");
      units[t] = cell.units;
      price[t] = cell.price;
      covered[t] = 1;
      ++expect;
    }
    panel.add_product({id, s.brand}, std::move(units), std::move(price));
    panel.availability.back() = {first, last + 1};
  }
  for (int t = 0; t < days; ++t)
    if (!covered[t])
      throw DataError(source, 0, "date gap: no rows for " + format_iso_date(add_days(start, t)));
  return panel;
}

inline SalesPanel ingest_csv(const std::string& path) {
  auto in = open_input(path);
  return read_panel_csv(in, path);
}

/// Writes every available (product, day) cell, product by product.
inline void write_panel_csv(std::ostream& out, const SalesPanel& panel) {
  out << kPanelHeader << '\n';
  for (std::size_t i = 0; i < panel.product_count(); ++i) {
    const auto& p = panel.products[i];
    for (int t = panel.availability[i].begin; t < panel.availability[i].end; ++t)
      out << format_iso_date(panel.date_at(t)) << ',' << p.id << ',' << p.brand << ','
          << panel.units[i][t] << ',' << format_double(panel.price[i][t]) << '\n';
  }
}

/// Sets the split to the day index of `date`; it must lie inside the grid
/// (the end of the grid means an empty test window).
inline void apply_split(SalesPanel& panel, Date date) {
  const int t = days_between(panel.start, date);
  if (t < 0 || t > panel.days)
    throw DataError("split", 0, "split date " + format_iso_date(date) + " outside the panel range " +
                                    format_iso_date(panel.start) + " to " +
                                    format_iso_date(panel.date_at(panel.days - 1)));
  panel.split = t;
}

// ---------------------------------------------------------------------------
// Summary

struct SummaryRow {
  std::string id;
  std::string brand;
  long long total_sales = 0;
  int sale_days = 0;
  int days = 0;
  double percent_sale_days() const { return days > 0 ? 100.0 * sale_days / days : 0.0; }
};

/// Per-product totals over the training window (the whole grid without a
/// split), restricted to each product's availability.
inline std::vector<SummaryRow> summarize(const SalesPanel& panel) {
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < panel.product_count(); ++i) {
    SummaryRow r{panel.products[i].id, panel.products[i].brand};
    const DayRange w = panel.train_window().intersect(panel.availability[i]);
    for (int t = w.begin; t < w.end; ++t) {
      r.total_sales += panel.units[i][t];
      r.sale_days += panel.units[i][t] >= 1;
    }
    r.days = w.size();
    rows.push_back(r);
  }
  return rows;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "product_id,brand,total_sales,pct_nonzero_days\n";
  for (const auto& r : rows)
    out << r.id << ',' << r.brand << ',' << r.total_sales << ','
        << format_fixed(r.percent_sale_days(), 2) << '\n';
}

// ---------------------------------------------------------------------------
// Posterior draws

/// Draws of one variant as CSV: a "# variant=... products=..." line, then
/// chain,iteration,<parameter names>.
inline void write_draws_csv(std::ostream& out, const PosteriorDraws& draws, Variant v,
                            std::size_t products) {
  out << "# variant=" << to_string(v) << " products=" << products
      << " chains=" << draws.chain_count() << " draws_per_chain=" << draws.draws_per_chain
      << '\n';
  out << "chain,iteration";
  for (const auto& n : draws.names) out << ',' << n;
  out << '\n';
  for (std::size_t c = 0; c < draws.chain_count(); ++c)
    for (std::size_t s = 0; s < draws.draws_per_chain; ++s) {
      out << c + 1 << ',' << s + 1;
      for (double x : draws.draw(c, s)) out << ',' << format_double(x);
      out << '\n';
    }
}

struct DrawsFile {
  Variant variant = Variant::zero_base;
  std::size_t products = 0;
  PosteriorDraws draws;
};

inline DrawsFile read_draws_csv(std::istream& in, const std::string& source = "<draws>") {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw DataError(source, row, "missing '# variant=' header line");
  DrawsFile f;
  std::optional<Variant> variant;
  std::optional<long long> products;
  std::istringstream meta(line.substr(2));
  std::string token;
  while (meta >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "variant") variant = parse_qualified_variant(value);
    if (key == "products") products = parse_integer(value);
  }
  if (!variant) throw DataError(source, row, "unknown or missing variant in header");
  if (!products || *products < 1) throw DataError(source, row, "missing products count in header");
  f.variant = *variant;
  f.products = static_cast<std::size_t>(*products);

  ++row;
  if (!std::getline(in, line)) throw DataError(source, row, "missing column header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split_fields(line);
  if (head.size() < 3 || head[0] != "chain" || head[1] != "iteration")
    throw DataError(source, row, "column header must start with chain,iteration");
  for (std::size_t k = 2; k < head.size(); ++k) f.draws.names.emplace_back(head[k]);
  const ParameterLayout layout(f.variant, f.products);
  if (f.draws.names != layout.names())
    throw DataError(source, row, "parameter columns do not match " + to_string(f.variant));

  const std::size_t dim = f.draws.names.size();
  std::vector<std::size_t> per_chain;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != dim + 2) throw DataError(source, row, "wrong number of fields");
    const auto chain = parse_integer(fields[0]);
    const auto iter = parse_integer(fields[1]);
    if (!chain || *chain < 1) throw DataError(source, row, "bad chain index");
    const auto c = static_cast<std::size_t>(*chain - 1);
    if (c > f.draws.chains.size()) throw DataError(source, row, "chains out of order");
    if (c == f.draws.chains.size()) {
      f.draws.chains.emplace_back();
      per_chain.push_back(0);
    }
    if (!iter || static_cast<std::size_t>(*iter) != per_chain[c] + 1)
      throw DataError(source, row, "iterations out of order");
    ++per_chain[c];
    for (std::size_t k = 0; k < dim; ++k) {
      const auto x = parse_double(fields[k + 2]);
      if (!x) throw DataError(source, row, "malformed value in column " + f.draws.names[k]);
      f.draws.chains[c].push_back(*x);
    }
  }
  if (per_chain.empty()) throw DataError(source, 0, "no draws");
  for (auto n : per_chain)
    if (n != per_chain.front()) throw DataError(source, 0, "chains have different lengths");
  f.draws.draws_per_chain = per_chain.front();
  f.draws.label = to_string(f.variant);
  return f;
}

inline DrawsFile read_draws_file(const std::string& path) {
  auto in = open_input(path);
  return read_draws_csv(in, path);
}

inline void write_diagnostics_csv(std::ostream& out, const DiagnosticsReport& rep) {
  out << "parameter,rhat,ess,degenerate\n";
  for (const auto& p : rep.parameters)
    out << p.name << ',' << format_double(p.rhat) << ',' << format_double(p.ess) << ','
        << (p.degenerate ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Truth and reports

/// parameter,value rows for the zero then the count process, named as in the
/// draw files.
inline void write_truth_csv(std::ostream& out, const std::vector<ProductParams>& truths,
                            const HierarchyParams& hyper, Variant zero, Variant count) {
  out << "parameter,value\n";
  const ModelState st{truths, hyper};
  for (Variant v : {zero, count}) {
    const ParameterLayout layout(v, truths.size());
    const auto values = layout.pack(st);
    for (std::size_t k = 0; k < values.size(); ++k)
      out << layout.names()[k] << ',' << format_double(values[k]) << '\n';
  }
}

inline std::map<std::string, double> read_truth_csv(std::istream& in,
                                                    const std::string& source = "<truth>") {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line) || line.rfind("parameter,value", 0) != 0)
    throw DataError(source, row, "expected header 'parameter,value'");
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    const auto x = f.size() == 2 ? parse_double(f[1]) : std::nullopt;
    if (!x) throw DataError(source, row, "malformed row");
    out[std::string(f[0])] = *x;
  }
  return out;
}

/// Rows are products, columns the test and train lppd of each process, final
/// rows the totals.
inline void write_lppd_csv(std::ostream& out, const EvalReport& rep) {
  const std::string z = to_string(rep.zero), c = to_string(rep.count);
  out << "product_id,brand,test " << z << ",test " << c << ",train " << z << ",train " << c
      << '\n';
  for (const auto& p : rep.products)
    out << p.id << ',' << p.brand << ',' << format_double(p.test_zero) << ','
        << format_double(p.test_count) << ',' << format_double(p.train_zero) << ','
        << format_double(p.train_count) << '\n';
  out << "total,," << format_double(rep.total_test_zero()) << ','
      << format_double(rep.total_test_count()) << ',' << format_double(rep.total_train_zero())
      << ',' << format_double(rep.total_train_count()) << '\n';
}

inline void write_traces_csv(std::ostream& out, const EvalReport& rep, const SalesPanel& panel) {
  out << "product_id,date,units,p_mean,p_lower,p_upper,lambda_mean,lambda_lower,lambda_upper,"
         "forecast_lower,forecast_upper\n";
  for (const auto& d : rep.traces)
    out << panel.products[d.product].id << ',' << format_iso_date(panel.date_at(d.day)) << ','
        << d.units << ',' << format_double(d.p_mean) << ',' << format_double(d.p_lower) << ','
        << format_double(d.p_upper) << ',' << format_double(d.lambda_mean) << ','
        << format_double(d.lambda_lower) << ',' << format_double(d.lambda_upper) << ','
        << d.forecast.lower << ',' << d.forecast.upper << '\n';
}

}  // namespace hh
