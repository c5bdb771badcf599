// lpinit: command-line front end for the forecasting benchmark.
//
//   lpinit gen     --t-end 1 --dt 0.01 -o series.csv
//   lpinit fit-lpc --horizon 5 -o coeffs.csv
//   lpinit train   --init lpc-improved --horizon 5 --out-dir run/
//   lpinit table   --config experiment.json
//   lpinit plot    --horizon 15 --methods linear,nn-lpc -o fig.svg
//
// Exit status: 0 success, 1 usage or input error, 2 numeric failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpinit/bench.hpp"
#include "lpinit/errors.hpp"
#include "lpinit/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace lpinit;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> t_end, dt, t_skip, rel_tol;
  std::optional<int> p, epochs;
  std::optional<double> bound;
  std::optional<std::string> objective, ortho, damping;
  std::optional<int> iters;
  std::optional<std::string> out_dir, cache_dir;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app->add_option("--t-end", t_end, "integration end time (s)");
    app->add_option("--dt", dt, "sampling step (s)");
    app->add_option("--t-skip", t_skip, "transient to drop (s)");
    app->add_option("--rel-tol", rel_tol, "integrator relative tolerance");
    app->add_option("--p", p, "window length");
    app->add_option("--epochs", epochs, "LM epoch budget");
    app->add_option("--bound", bound, "linearity bound for LPC initialisation");
    app->add_option("--objective", objective, "improved-init objective")
        ->check(CLI::IsMember({"grad-norm", "first-epoch", "full-training"}));
    app->add_option("--ortho", ortho, "orthogonal parameterization")->check(CLI::IsMember({"exp", "cayley"}));
    app->add_option("--damping", damping, "LM damping term")->check(CLI::IsMember({"identity", "marquardt"}));
    app->add_option("--iters", iters, "improved-init search iterations");
    app->add_option("--cache-dir", cache_dir, "series cache directory");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      cfg = config_from_json(nlohmann::json::parse(in));
    }
    if (t_end) cfg.lorenz.t_end = *t_end;
    if (dt) cfg.lorenz.dt = *dt;
    if (t_skip) cfg.lorenz.t_skip = *t_skip;
    if (rel_tol) cfg.lorenz.rel_tol = *rel_tol;
    if (p) cfg.p = *p;
    if (epochs) cfg.train.max_epochs = *epochs;
    if (bound) cfg.linearity_bound = *bound;
    if (objective) cfg.improved.objective = objective_from_string(*objective);
    if (ortho) cfg.improved.parameterization = orthogonalization_from_string(*ortho);
    if (damping) cfg.train.damping = damping_from_string(*damping);
    if (iters) cfg.improved.iters = *iters;
    if (out_dir) cfg.output_dir = *out_dir;
    if (cache_dir) cfg.cache_dir = *cache_dir;
    cfg.validate();
    return cfg;
  }
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

Experiment make_experiment(ExperimentConfig cfg, const std::string& series_path) {
  if (series_path.empty()) return Experiment(std::move(cfg));
  std::ifstream in(series_path);
  if (!in) throw std::runtime_error("cannot read " + series_path);
  return Experiment(std::move(cfg), read_series_csv(in));
}

int cmd_gen(const Overrides& ov, const std::string& out_path, bool explicit_skip) {
  ExperimentConfig cfg = ov.resolve();
  // Without a config or --t-skip, gen writes the raw trajectory from t = 0.
  if (ov.config_path.empty() && !explicit_skip) cfg.lorenz.t_skip = 0.0;
  const TimeSeries ts = generate_series(cfg.lorenz);
  if (out_path.empty() || out_path == "-") {
    write_series_csv(std::cout, ts);
  } else {
    auto out = open_output(out_path);
    write_series_csv(out, ts);
  }
  return 0;
}

int cmd_fit_lpc(Experiment& exp, int horizon, const std::string& out_path) {
  const CellOutcome cell = exp.run_cell(Method::Linear, horizon, 0);
  std::cout << to_csv_line(*cell.model) << '\n';
  std::cout << "train_rmse=" << cell.row.train_rmse << " test_rmse=" << cell.row.test_rmse
            << (cell.model->ridge_regularized ? " (ridge)" : "") << '\n';
  if (!out_path.empty()) open_output(out_path) << to_csv_line(*cell.model) << '\n';
  return 0;
}

int cmd_train(Experiment& exp, const std::string& init, int horizon, std::uint64_t seed) {
  const Method method = init == "nw" ? Method::NnNguyenWidrow : init == "lpc" ? Method::NnLpc : Method::NnLpcImproved;
  const CellOutcome cell = exp.run_cell(method, horizon, seed);
  const fs::path dir = exp.config().output_dir;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "trace.csv");
    write_trace_csv(out, *cell.trace);
  }
  open_output(dir / "model.json") << to_json(*cell.net).dump(2) << '\n';
  if (cell.rotation) open_output(dir / "rotation.csv") << to_csv_line(*cell.rotation) << '\n';
  std::cout << to_string(method) << " horizon=" << cell.row.horizon_s << "s epochs=" << cell.trace->epochs_run
            << " train_rmse=" << cell.row.train_rmse << " test_rmse=" << cell.row.test_rmse
            << " wall_s=" << cell.row.wall_s << '\n'
            << "wrote " << (dir / "trace.csv").string() << ", " << (dir / "model.json").string() << '\n';
  return 0;
}

int cmd_table(Experiment& exp) {
  const ExperimentReport report = exp.run_table(&std::cerr);
  const fs::path dir = exp.config().output_dir;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "report.csv");
    write_report_csv(out, report, exp.config().report_wall_time);
  }
  const std::string table = render_table(report, exp.config());
  open_output(dir / "table.txt") << table;
  std::cout << table;
  for (const auto& r : report.rows) {
    if (!r.error.empty()) return 2;
  }
  return 0;
}

int cmd_plot(Experiment& exp, int horizon, const std::vector<std::string>& methods, std::uint64_t seed,
             std::optional<double> t_begin, std::optional<double> t_end, const std::string& out_path) {
  const TimeSeries& ts = exp.series();
  const std::size_t first = exp.first_test_target(horizon);
  std::vector<ForecastTrace> traces;
  for (const auto& name : methods) {
    const CellOutcome cell = exp.run_cell(method_from_string(name), horizon, seed);
    ForecastTrace trace{name, std::vector<double>(ts.size(), std::nan(""))};
    for (Eigen::Index i = 0; i < cell.test_predictions.size(); ++i) {
      trace.values[first + static_cast<std::size_t>(i)] = cell.test_predictions(i);
    }
    traces.push_back(std::move(trace));
  }
  const double begin = t_begin.value_or(ts.time_at(first));
  const double end = t_end.value_or(begin + 2.0);
  const std::string svg = plot_forecast(ts, traces, begin, end);
  if (out_path.empty() || out_path == "-") {
    std::cout << svg;
  } else {
    open_output(out_path) << svg;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-prediction initialisation of forecasting networks: Lorenz benchmark"};
  app.require_subcommand(1);

  Overrides ov;
  std::string out_path, series_path, init = "lpc";
  int horizon = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"linear", "nn-lpc"};
  std::vector<std::uint64_t> seeds;
  std::vector<int> horizons;
  std::vector<std::string> table_methods;
  std::optional<double> t_begin, t_end_plot;

  auto* gen = app.add_subcommand("gen", "write the Lorenz x series as CSV");
  ov.add_to(gen);
  gen->add_option("-o,--output", out_path, "output CSV (default stdout)");

  auto* fit = app.add_subcommand("fit-lpc", "fit the linear prediction filter");
  ov.add_to(fit);
  fit->add_option("--series", series_path, "input series CSV (default: generate)")->check(CLI::ExistingFile);
  fit->add_option("--horizon", horizon, "horizon in steps")->check(CLI::PositiveNumber);
  fit->add_option("-o,--output", out_path, "write coefficients CSV");

  auto* trn = app.add_subcommand("train", "initialise and train one network");
  ov.add_to(trn);
  trn->add_option("--series", series_path, "input series CSV (default: generate)")->check(CLI::ExistingFile);
  trn->add_option("--init", init, "initialisation scheme")->check(CLI::IsMember({"nw", "lpc", "lpc-improved"}));
  trn->add_option("--horizon", horizon, "horizon in steps")->check(CLI::PositiveNumber);
  trn->add_option("--seed", seed, "seed for stochastic initialisation");
  trn->add_option("--out-dir", ov.out_dir, "directory for trace.csv and model.json");

  auto* tab = app.add_subcommand("table", "run the full method x horizon x seed benchmark");
  ov.add_to(tab);
  tab->add_option("--out-dir", ov.out_dir, "directory for report.csv and table.txt");
  tab->add_option("--seeds", seeds, "override the seed list");
  tab->add_option("--seed", seeds, "single seed (same as --seeds)");
  tab->add_option("--horizons", horizons, "override the horizon list (steps)");
  tab->add_option("--methods", table_methods, "override the method list")->delimiter(',');

  auto* plt = app.add_subcommand("plot", "SVG of test-set forecasts against the series");
  ov.add_to(plt);
  plt->add_option("--series", series_path, "input series CSV (default: generate)")->check(CLI::ExistingFile);
  plt->add_option("--horizon", horizon, "horizon in steps")->check(CLI::PositiveNumber);
  plt->add_option("--methods", methods, "methods to overlay")->delimiter(',');
  plt->add_option("--seed", seed, "seed for stochastic methods");
  plt->add_option("--t-begin", t_begin, "window start (s)");
  plt->add_option("--t-stop", t_end_plot, "window end (s)");
  plt->add_option("-o,--output", out_path, "output SVG (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(ov, out_path, gen->count("--t-skip") > 0);
    ExperimentConfig cfg = ov.resolve();
    if (tab->parsed()) {
      if (!seeds.empty()) cfg.seeds = seeds;
      if (!horizons.empty()) cfg.horizons = horizons;
      if (!table_methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : table_methods) cfg.methods.push_back(method_from_string(m));
      }
      Experiment exp(std::move(cfg));
      return cmd_table(exp);
    }
    Experiment exp = make_experiment(std::move(cfg), series_path);
    if (fit->parsed()) return cmd_fit_lpc(exp, horizon, out_path);
    if (trn->parsed()) return cmd_train(exp, init, horizon, seed);
    if (plt->parsed()) return cmd_plot(exp, horizon, methods, seed, t_begin, t_end_plot, out_path);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
