// hawkes-hurdle: simulate | fit | predict | evaluate | summarize

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hawkes_hurdle/config.hpp"
#include "hawkes_hurdle/diagnostics.hpp"
#include "hawkes_hurdle/evaluation.hpp"
#include "hawkes_hurdle/io.hpp"
#include "hawkes_hurdle/simulation.hpp"

namespace fs = std::filesystem;
using namespace hh;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kConfig = 3, kData = 4, kConvergence = 5 };

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string data;
  std::string scenario;
  std::string out = ".";
  std::string fit;
  std::optional<std::uint64_t> seed;
  bool allow_nonconverged = false;
};

bool verbose() {
  const char* v = std::getenv("HAWKES_HURDLE_VERBOSE");
  return v && *v && std::string(v) != "0";
}

void note(const std::string& msg) {
  if (verbose()) std::cerr << msg << '\n';
}

RunConfig load_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : read_config_file(o.config);
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const auto& writer) {
  auto out = open_output(path.string());
  writer(out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SalesPanel load_panel(const Options& o, const RunConfig& cfg) {
  if (o.data.empty()) throw ConfigError("--data is required");
  SalesPanel panel = ingest_csv(o.data);
  if (cfg.split) apply_split(panel, *cfg.split);
  return panel;
}

int run_simulate(const Options& o) {
  if (o.scenario.empty()) throw ConfigError("--scenario is required");
  RunConfig cfg = read_config_file(o.scenario, load_config(o));
  if (o.seed) cfg.scenario.seed = *o.seed;
  const auto result = simulate_hierarchical(scenario_from_config(cfg));
  const fs::path dir = out_dir(o);
  write_file(dir / "panel.csv", [&](std::ostream& s) { write_panel_csv(s, result.panel); });
  write_file(dir / "truth.csv", [&](std::ostream& s) {
    write_truth_csv(s, result.truths, cfg.scenario.hyper, cfg.model.zero, cfg.model.count);
  });
  write_file(dir / "scenario.cfg", [&](std::ostream& s) { write_config(s, cfg); });
  std::cout << "simulated " << result.panel.product_count() << " products x "
            << result.panel.days << " days -> " << (dir / "panel.csv").string() << '\n';
  return kOk;
}

int run_fit(const Options& o) {
  RunConfig cfg = load_config(o);
  if (o.seed) cfg.sampler.seed = *o.seed;
  const SalesPanel panel = load_panel(o, cfg);
  const fs::path dir = out_dir(o);
  bool converged = true;
  std::string worst;
  for (Variant v : {cfg.model.zero, cfg.model.count}) {
    note("fitting " + to_string(v));
    const PosteriorDraws draws =
        fit_process(panel, panel.train_window(), cfg.model, cfg.priors, v, cfg.sampler);
    const std::string tag = process_of(v) == Process::zero ? "zero" : "count";
    write_file(dir / ("draws_" + tag + ".csv"),
               [&](std::ostream& s) { write_draws_csv(s, draws, v, panel.product_count()); });
    const DiagnosticsReport rep = diagnostics(draws, cfg.rhat_threshold);
    write_file(dir / ("diagnostics_" + tag + ".csv"),
               [&](std::ostream& s) { write_diagnostics_csv(s, rep); });
    std::cout << to_string(v) << ": " << draws.total_draws() << " draws, max rhat "
              << format_fixed(rep.max_rhat, 4) << ", min ess " << format_fixed(rep.min_ess, 1)
              << ", divergences " << draws.divergences() << '\n';
    if (!rep.converged) {
      converged = false;
      worst += (worst.empty() ? "" : "; ") + to_string(v) + " max rhat " +
               format_fixed(rep.max_rhat, 4) + ", degenerate " +
               std::to_string(rep.degenerate_count);
    }
  }
  write_file(dir / "run.cfg", [&](std::ostream& s) { write_config(s, cfg); });
  if (!converged && !o.allow_nonconverged)
    throw ConvergenceError(worst + " (threshold " + format_double(cfg.rhat_threshold) + ")");
  return kOk;
}

struct FittedDraws {
  DrawsFile zero;
  DrawsFile count;
};

FittedDraws load_fit(const Options& o, const RunConfig& cfg, const SalesPanel& panel) {
  const fs::path dir(o.fit.empty() ? o.out : o.fit);
  FittedDraws f{read_draws_file((dir / "draws_zero.csv").string()),
                read_draws_file((dir / "draws_count.csv").string())};
  if (f.zero.variant != cfg.model.zero || f.count.variant != cfg.model.count)
    throw ConfigMismatchError("fit holds " + to_string(f.zero.variant) + " / " +
                              to_string(f.count.variant) + " but the config asks for " +
                              to_string(cfg.model.zero) + " / " + to_string(cfg.model.count));
  if (f.zero.products != panel.product_count() || f.count.products != panel.product_count())
    throw ConfigMismatchError("fit has " + std::to_string(f.zero.products) +
                              " products, data has " + std::to_string(panel.product_count()));
  return f;
}

int run_evaluate(const Options& o, bool with_scores) {
  RunConfig cfg = load_config(o);
  if (o.seed) cfg.forecast.seed = *o.seed;
  const SalesPanel panel = load_panel(o, cfg);
  if (!panel.split) throw ConfigError("data.split is required to define the test window");
  const FittedDraws fit = load_fit(o, cfg, panel);
  const EvalReport rep = evaluate(panel, fit.zero.draws, fit.count.draws, cfg.model, cfg.forecast);
  const fs::path dir = out_dir(o);
  write_file(dir / "traces.csv", [&](std::ostream& s) { write_traces_csv(s, rep, panel); });
  if (with_scores) {
    write_file(dir / "lppd.csv", [&](std::ostream& s) { write_lppd_csv(s, rep); });
    std::cout << "test lppd " << to_string(rep.zero) << " "
              << format_fixed(rep.total_test_zero(), 2) << ", " << to_string(rep.count) << " "
              << format_fixed(rep.total_test_count(), 2) << '\n';
  }
  std::cout << "interval coverage " << format_fixed(100.0 * rep.coverage(), 2) << "% over "
            << rep.traces.size() << " product-days\n";
  return kOk;
}

int run_summarize(const Options& o) {
  const RunConfig cfg = load_config(o);
  const SalesPanel panel = load_panel(o, cfg);
  const auto rows = summarize(panel);
  write_summary_csv(std::cout, rows);
  if (o.out != ".") {
    const fs::path dir = out_dir(o);
    write_file(dir / "summary.csv", [&](std::ostream& s) { write_summary_csv(s, rows); });
  }
  return kOk;
}

int fail(Exit code, const char* kind, const std::string& what) {
  std::string line = what;
  for (char& c : line)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "error: " << kind << ": " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical hurdle model with self- and cross-excitation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd, bool data) {
    cmd->add_option("--config", o.config, "run configuration file");
    if (data) cmd->add_option("--data", o.data, "panel CSV (date,product_id,brand,units,price)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "override the seed used by this command");
  };
  auto* simulate = app.add_subcommand("simulate", "simulate a panel and its true parameters");
  simulate->add_option("--scenario", o.scenario, "scenario configuration file")->required();
  common(simulate, false);
  auto* fit = app.add_subcommand("fit", "sample the zero and count posteriors");
  common(fit, true);
  fit->add_flag("--allow-nonconverged", o.allow_nonconverged, "exit 0 even if R-hat fails");
  auto* predict = app.add_subcommand("predict", "one-step-ahead predictive traces");
  common(predict, true);
  predict->add_option("--fit", o.fit, "directory holding draws_zero.csv and draws_count.csv");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "lppd scores and predictive traces");
  common(evaluate_cmd, true);
  evaluate_cmd->add_option("--fit", o.fit, "directory holding draws_zero.csv and draws_count.csv");
  auto* summarize_cmd = app.add_subcommand("summarize", "per-product sales summary");
  common(summarize_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*fit) return run_fit(o);
    if (*predict) return run_evaluate(o, false);
    if (*evaluate_cmd) return run_evaluate(o, true);
    if (*summarize_cmd) return run_summarize(o);
  } catch (const ConfigMismatchError& e) {
    return fail(kConfig, "config-mismatch", e.what());
  } catch (const ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const DataError& e) {
    return fail(kData, "data", e.what());
  } catch (const MissingPriceError& e) {
    return fail(kData, "data", e.what());
  } catch (const ConvergenceError& e) {
    return fail(kConvergence, "nonconverged", e.what());
  } catch (const SamplerError& e) {
    return fail(kFailure, "sampler", e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, "internal", e.what());
  }
  return kUsage;
}
