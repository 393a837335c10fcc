#pragma once

// Run configuration: a flat key = value file with dotted keys ("sampler.chains
// = 4"), '#' comments and optional [section] headers.

#include <array>
#include <chrono>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/program_options/parsers.hpp>

#include "hawkes_hurdle/covariates.hpp"
#include "hawkes_hurdle/evaluation.hpp"
#include "hawkes_hurdle/hmc.hpp"
#include "hawkes_hurdle/io.hpp"
#include "hawkes_hurdle/panel.hpp"
#include "hawkes_hurdle/params.hpp"
#include "hawkes_hurdle/simulation.hpp"
#include "hawkes_hurdle/variant.hpp"

namespace hh {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Synthetic-data settings read by `simulate`.
struct ScenarioSettings {
  std::size_t products = 17;
  int days = 364;
  Date start = std::chrono::year{2013} / std::chrono::October / 1;
  std::size_t brand_size = 3;
  double price_low = 0.7;
  double price_high = 1.4;
  double price_change_rate = 0.02;
  std::optional<Date> split;
  std::uint64_t seed = 1;
  HierarchyParams hyper = sparse_retail_scenario(1, 1, 1).hyper;
};

struct RunConfig {
  ModelSpec model;
  PriorSpec priors;
  SamplerConfig sampler;
  std::optional<Date> split;
  ForecastOptions forecast;
  double rhat_threshold = kRhatThreshold;
  ScenarioSettings scenario;

  void validate() const {
    require_process(model.zero, Process::zero);
    require_process(model.count, Process::count);
    if (model.truncation < 1) throw ConfigError("model.truncation must be >= 1");
    if (!(model.dispersion > 0.0)) throw ConfigError("model.dispersion must be > 0");
    try {
      sampler.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (forecast.replicates < 1) throw ConfigError("forecast.replicates must be >= 1");
    if (!(forecast.level > 0.0 && forecast.level < 1.0))
      throw ConfigError("forecast.level must lie in (0, 1)");
    if (!(rhat_threshold > 1.0)) throw ConfigError("diagnostics.rhat_threshold must be > 1");
    if (scenario.products < 1 || scenario.days < 1 || scenario.brand_size < 1)
      throw ConfigError("scenario sizes must be >= 1");
    if (!(scenario.price_low > 0.0 && scenario.price_high >= scenario.price_low))
      throw ConfigError("scenario prices must satisfy 0 < price_low <= price_high");
  }
};

namespace detail {

struct ConfigKey {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline double to_double(const std::string& key, const std::string& v) {
  const auto x = parse_double(v);
  if (!x || !std::isfinite(*x)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return *x;
}

inline long long to_integer(const std::string& key, const std::string& v) {
  const auto x = parse_integer(v);
  if (!x) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return *x;
}

template <std::size_t N>
std::array<double, N> to_tuple(const std::string& key, const std::string& v) {
  const auto f = split_fields(v);
  if (f.size() != N)
    throw ConfigError(key + ": expected " + std::to_string(N) + " comma-separated numbers");
  std::array<double, N> out;
  for (std::size_t k = 0; k < N; ++k) out[k] = to_double(key, std::string(f[k]));
  return out;
}

template <std::size_t N>
std::string join(const std::array<double, N>& x) {
  std::string s;
  for (std::size_t k = 0; k < N; ++k) s += (k ? "," : "") + format_double(x[k]);
  return s;
}

inline Date to_date(const std::string& key, const std::string& v) {
  const auto d = parse_iso_date(v);
  if (!d) throw ConfigError(key + ": expected an ISO date, got '" + v + "'");
  return *d;
}

inline std::chrono::month_day to_month_day(const std::string& key, const std::string& v) {
  const auto d = parse_iso_date("2000-" + v);
  if (!d) throw ConfigError(key + ": expected MM-DD, got '" + v + "'");
  return {d->month(), d->day()};
}

inline std::string from_month_day(std::chrono::month_day md) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02u-%02u", static_cast<unsigned>(md.month()),
                static_cast<unsigned>(md.day()));
  return buf;
}

inline constexpr std::array<const char*, 7> kWeekdays{"sun", "mon", "tue", "wed",
                                                      "thu", "fri", "sat"};
inline constexpr std::array<const char*, 12> kMonths{"jan", "feb", "mar", "apr", "may", "jun",
                                                     "jul", "aug", "sep", "oct", "nov", "dec"};

inline Variant to_variant(const std::string& key, Process p, const std::string& v) {
  auto parsed = parse_variant(p, v);
  if (!parsed) parsed = parse_qualified_variant(v);
  if (!parsed || process_of(*parsed) != p) throw ConfigError(key + ": unknown variant '" + v + "'");
  return *parsed;
}

inline std::vector<ConfigKey> build_registry() {
  std::vector<ConfigKey> r;
  auto add = [&](std::string name, auto set, auto get) {
    r.push_back({std::move(name), set, get});
  };
  auto real = [&](std::string name, auto field) {
    add(name, [=](RunConfig& c, const std::string& v) { field(c) = to_double(name, v); },
        [=](const RunConfig& c) { return format_double(field(const_cast<RunConfig&>(c))); });
  };
  auto integer = [&](std::string name, auto field) {
    add(name,
        [=](RunConfig& c, const std::string& v) {
          using T = std::remove_reference_t<decltype(field(c))>;
          const long long x = to_integer(name, v);
          if constexpr (std::is_unsigned_v<T>)
            if (x < 0) throw ConfigError(name + ": must be >= 0");
          field(c) = static_cast<T>(x);
        },
        [=](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); });
  };
  auto normal = [&](std::string name, auto field) {
    add(name,
        [=](RunConfig& c, const std::string& v) {
          const auto t = to_tuple<2>(name, v);
          if (!(t[1] > 0.0)) throw ConfigError(name + ": variance must be > 0");
          field(c) = NormalPrior{t[0], t[1]};
        },
        [=](const RunConfig& c) {
          const NormalPrior& p = field(const_cast<RunConfig&>(c));
          return join<2>({p.mean, p.variance});
        });
  };
  auto gamma = [&](std::string name, auto field) {
    add(name,
        [=](RunConfig& c, const std::string& v) {
          const auto t = to_tuple<3>(name, v);
          if (!(t[0] > 0.0 && t[1] > 0.0)) throw ConfigError(name + ": shape and rate must be > 0");
          field(c) = GammaPrior{t[0], t[1], t[2]};
        },
        [=](const RunConfig& c) {
          const GammaPrior& p = field(const_cast<RunConfig&>(c));
          return join<3>({p.shape, p.rate, p.shift});
        });
  };
  auto triple = [&](std::string name, auto field) {
    add(name, [=](RunConfig& c, const std::string& v) { field(c) = to_tuple<3>(name, v); },
        [=](const RunConfig& c) { return join<3>(field(const_cast<RunConfig&>(c))); });
  };
  auto date = [&](std::string name, auto field) {
    add(name,
        [=](RunConfig& c, const std::string& v) {
          if (v.empty() || v == "none")
            field(c).reset();
          else
            field(c) = to_date(name, v);
        },
        [=](const RunConfig& c) {
          const auto& d = field(const_cast<RunConfig&>(c));
          return d ? format_iso_date(*d) : std::string("none");
        });
  };
  static const char* kShot[] = {"kappa", "mu", "tau"};

  add("model.zero", [](RunConfig& c, const std::string& v) {
        c.model.zero = to_variant("model.zero", Process::zero, v);
      },
      [](const RunConfig& c) { return short_name(c.model.zero); });
  add("model.count", [](RunConfig& c, const std::string& v) {
        c.model.count = to_variant("model.count", Process::count, v);
      },
      [](const RunConfig& c) { return short_name(c.model.count); });
  integer("model.truncation", [](RunConfig& c) -> int& { return c.model.truncation; });
  real("model.dispersion", [](RunConfig& c) -> double& { return c.model.dispersion; });
  add("model.count_link",
      [](RunConfig& c, const std::string& v) {
        if (v == "shifted") c.model.count_link = CountLink::shifted;
        else if (v == "clamped_exp") c.model.count_link = CountLink::clamped_exp;
        else throw ConfigError("model.count_link: expected shifted or clamped_exp");
      },
      [](const RunConfig& c) {
        return std::string(c.model.count_link == CountLink::shifted ? "shifted" : "clamped_exp");
      });

  add("seasonal.christmas_begin",
      [](RunConfig& c, const std::string& v) {
        c.model.seasonal.christmas_begin = to_month_day("seasonal.christmas_begin", v);
      },
      [](const RunConfig& c) { return from_month_day(c.model.seasonal.christmas_begin); });
  add("seasonal.christmas_end",
      [](RunConfig& c, const std::string& v) {
        c.model.seasonal.christmas_end = to_month_day("seasonal.christmas_end", v);
      },
      [](const RunConfig& c) { return from_month_day(c.model.seasonal.christmas_end); });
  add("seasonal.weekday_baseline",
      [](RunConfig& c, const std::string& v) {
        for (unsigned d = 0; d < 7; ++d)
          if (v == kWeekdays[d]) {
            c.model.seasonal.weekday_baseline = std::chrono::weekday{d};
            return;
          }
        throw ConfigError("seasonal.weekday_baseline: expected sun..sat");
      },
      [](const RunConfig& c) {
        return std::string(kWeekdays[c.model.seasonal.weekday_baseline.c_encoding()]);
      });
  add("seasonal.month_baseline",
      [](RunConfig& c, const std::string& v) {
        for (unsigned m = 0; m < 12; ++m)
          if (v == kMonths[m]) {
            c.model.seasonal.month_baseline = std::chrono::month{m + 1};
            return;
          }
        throw ConfigError("seasonal.month_baseline: expected jan..dec");
      },
      [](const RunConfig& c) {
        return std::string(kMonths[static_cast<unsigned>(c.model.seasonal.month_baseline) - 1]);
      });

  integer("sampler.chains", [](RunConfig& c) -> int& { return c.sampler.chains; });
  integer("sampler.warmup", [](RunConfig& c) -> int& { return c.sampler.warmup_iters; });
  integer("sampler.sampling", [](RunConfig& c) -> int& { return c.sampler.sampling_iters; });
  integer("sampler.leapfrog_steps", [](RunConfig& c) -> int& { return c.sampler.leapfrog_steps; });
  real("sampler.target_acceptance",
       [](RunConfig& c) -> double& { return c.sampler.target_acceptance; });
  integer("sampler.seed", [](RunConfig& c) -> std::uint64_t& { return c.sampler.seed; });
  real("sampler.step_jitter", [](RunConfig& c) -> double& { return c.sampler.step_jitter; });
  integer("sampler.threads", [](RunConfig& c) -> int& { return c.sampler.threads; });

  date("data.split", [](RunConfig& c) -> std::optional<Date>& { return c.split; });
  real("forecast.level", [](RunConfig& c) -> double& { return c.forecast.level; });
  integer("forecast.replicates", [](RunConfig& c) -> int& { return c.forecast.replicates; });
  integer("forecast.seed", [](RunConfig& c) -> std::uint64_t& { return c.forecast.seed; });
  real("diagnostics.rhat_threshold", [](RunConfig& c) -> double& { return c.rhat_threshold; });

  // Priors, zero process.
  normal("priors.zero.base", [](RunConfig& c) -> NormalPrior& { return c.priors.zero.base; });
  for (int j = 0; j < kZeroCoefficients; ++j) {
    const std::string n = std::to_string(j + 1);
    normal("priors.zero.flat_theta." + n,
           [j](RunConfig& c) -> NormalPrior& { return c.priors.zero.flat_theta[j]; });
    real("priors.zero.sigma2." + n, [j](RunConfig& c) -> double& { return c.priors.zero.sigma2[j]; });
    normal("priors.zero.rho." + n, [j](RunConfig& c) -> NormalPrior& { return c.priors.zero.rho[j]; });
  }
  for (int k = 0; k < 3; ++k) {
    const std::string n = kShot[k];
    gamma("priors.zero.flat_shot." + n,
          [k](RunConfig& c) -> GammaPrior& { return c.priors.zero.flat_shot[k]; });
    gamma("priors.zero.flat_cross." + n,
          [k](RunConfig& c) -> GammaPrior& { return c.priors.zero.flat_cross[k]; });
    gamma("priors.zero.eta." + n, [k](RunConfig& c) -> GammaPrior& { return c.priors.zero.eta[k]; });
    gamma("priors.zero.eta_cross." + n,
          [k](RunConfig& c) -> GammaPrior& { return c.priors.zero.eta_cross[k]; });
    gamma("priors.count.flat_shot." + n,
          [k](RunConfig& c) -> GammaPrior& { return c.priors.count.flat_shot[k]; });
    gamma("priors.count.eta." + n, [k](RunConfig& c) -> GammaPrior& { return c.priors.count.eta[k]; });
  }
  triple("priors.zero.shot_rate",
         [](RunConfig& c) -> std::array<double, 3>& { return c.priors.zero.shot_rate; });
  triple("priors.zero.cross_rate",
         [](RunConfig& c) -> std::array<double, 3>& { return c.priors.zero.cross_rate; });

  // Priors, count process.
  normal("priors.count.base", [](RunConfig& c) -> NormalPrior& { return c.priors.count.base; });
  for (int j = 0; j < kCountCoefficients; ++j) {
    const std::string n = std::to_string(j + 1);
    normal("priors.count.flat_theta." + n,
           [j](RunConfig& c) -> NormalPrior& { return c.priors.count.flat_theta[j]; });
    real("priors.count.sigma2_hb." + n,
         [j](RunConfig& c) -> double& { return c.priors.count.sigma2_hb[j]; });
    normal("priors.count.rho_hb." + n,
           [j](RunConfig& c) -> NormalPrior& { return c.priors.count.rho_hb[j]; });
    real("priors.count.sigma2." + n, [j](RunConfig& c) -> double& { return c.priors.count.sigma2[j]; });
    normal("priors.count.rho." + n,
           [j](RunConfig& c) -> NormalPrior& { return c.priors.count.rho[j]; });
  }
  triple("priors.count.shot_rate",
         [](RunConfig& c) -> std::array<double, 3>& { return c.priors.count.shot_rate; });

  // Simulation scenario.
  integer("scenario.products", [](RunConfig& c) -> std::size_t& { return c.scenario.products; });
  integer("scenario.days", [](RunConfig& c) -> int& { return c.scenario.days; });
  add("scenario.start",
      [](RunConfig& c, const std::string& v) { c.scenario.start = to_date("scenario.start", v); },
      [](const RunConfig& c) { return format_iso_date(c.scenario.start); });
  integer("scenario.brand_size", [](RunConfig& c) -> std::size_t& { return c.scenario.brand_size; });
  real("scenario.price_low", [](RunConfig& c) -> double& { return c.scenario.price_low; });
  real("scenario.price_high", [](RunConfig& c) -> double& { return c.scenario.price_high; });
  real("scenario.price_change_rate",
       [](RunConfig& c) -> double& { return c.scenario.price_change_rate; });
  date("scenario.split", [](RunConfig& c) -> std::optional<Date>& { return c.scenario.split; });
  integer("scenario.seed", [](RunConfig& c) -> std::uint64_t& { return c.scenario.seed; });
  for (int j = 0; j < kZeroCoefficients; ++j)
    real("hyper.rho_z." + std::to_string(j + 1),
         [j](RunConfig& c) -> double& { return c.scenario.hyper.rho_z[j]; });
  for (int j = 0; j < kCountCoefficients; ++j)
    real("hyper.rho_c." + std::to_string(j + 1),
         [j](RunConfig& c) -> double& { return c.scenario.hyper.rho_c[j]; });
  triple("hyper.eta_z", [](RunConfig& c) -> std::array<double, 3>& { return c.scenario.hyper.eta_z; });
  triple("hyper.eta_z_cross",
         [](RunConfig& c) -> std::array<double, 3>& { return c.scenario.hyper.eta_z_cross; });
  triple("hyper.eta_c", [](RunConfig& c) -> std::array<double, 3>& { return c.scenario.hyper.eta_c; });
  return r;
}

inline const std::vector<ConfigKey>& registry() {
  static const std::vector<ConfigKey> r = build_registry();
  return r;
}

}  // namespace detail

/// All accepted keys, in documentation order.
inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : detail::registry()) out.push_back(k.name);
  return out;
}

/// Applies one key; unknown keys and malformed values throw ConfigError.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : detail::registry())
    if (k.name == key) return k.set(cfg, value);
  throw ConfigError("unknown configuration key '" + key + "'");
}

inline std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  for (const auto& k : detail::registry())
    if (k.name == key) return k.get(cfg);
  throw ConfigError("unknown configuration key '" + key + "'");
}

/// Reads key = value lines on top of `base` (defaults when omitted).
inline RunConfig read_config(std::istream& in, RunConfig base = {}) {
  namespace po = boost::program_options;
  po::options_description none;
  po::parsed_options parsed(&none);
  try {
    parsed = po::parse_config_file(in, none, true);
  } catch (const po::error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& opt : parsed.options) {
    std::string value;
    for (const auto& v : opt.value) value += v;
    set_config_value(base, opt.string_key, value);
  }
  base.validate();
  return base;
}

inline RunConfig read_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return read_config(in, std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Every key with its current value; read_config reproduces `cfg`.
inline void write_config(std::ostream& out, const RunConfig& cfg) {
  std::string section;
  for (const auto& k : detail::registry()) {
    const std::string head = k.name.substr(0, k.name.find('.'));
    if (head != section) {
      if (!section.empty()) out << '\n';
      section = head;
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
}

/// Scenario for `simulate`: products in brands of `brand_size`, piecewise
/// constant prices, and the configured variants, priors and hyper-parameters.
inline ScenarioSpec scenario_from_config(const RunConfig& cfg) {
  const ScenarioSettings& sc = cfg.scenario;
  ScenarioSpec s;
  s.start = sc.start;
  s.days = sc.days;
  for (std::size_t i = 0; i < sc.products; ++i)
    s.products.push_back(
        {"p" + std::to_string(i + 1), "brand" + std::to_string(i / sc.brand_size + 1)});
  s.prices = random_price_paths(sc.products, sc.days, sc.price_low, sc.price_high,
                                sc.price_change_rate, sc.seed * 7919 + 1);
  s.hyper = sc.hyper;
  s.priors = cfg.priors;
  s.model = cfg.model;
  if (sc.split) {
    const int t = days_between(sc.start, *sc.split);
    if (t < 0 || t > sc.days) throw ConfigError("scenario.split outside the simulated range");
    s.split = t;
  }
  s.seed = sc.seed;
  return s;
}

}  // namespace hh
