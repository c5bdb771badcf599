#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "lpinit/dynamics.hpp"
#include "lpinit/init_schemes.hpp"
#include "lpinit/linear_forecast.hpp"
#include "lpinit/lm_trainer.hpp"
#include "lpinit/mlp.hpp"

namespace lpinit {

enum class Method { Linear, NnNguyenWidrow, NnLpc, NnLpcImproved };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
/// Only the Nguyen-Widrow baseline draws random numbers.
inline bool uses_seed(Method m) { return m == Method::NnNguyenWidrow; }

/// How the benchmark series is produced: integrate, then drop the transient.
struct GenerationRecipe {
  LorenzParams lorenz;
  State3 s0{1.0, 1.0, 1.0};
  double t_end = 140.0;
  double dt = 0.01;
  double rel_tol = 1e-9;
  double t_skip = 20.0;

  /// Canonical text form; also the disk-cache key.
  std::string key() const;
};

TimeSeries generate_series(const GenerationRecipe& recipe);

/// generate_series with an on-disk cache under `cache_dir` (no caching when
/// the directory is empty).
TimeSeries cached_series(const GenerationRecipe& recipe, const std::string& cache_dir);

struct ExperimentConfig {
  GenerationRecipe lorenz;
  int p = 5;
  std::vector<int> horizons{1, 2, 5, 10, 100};
  std::vector<Method> methods{Method::Linear, Method::NnNguyenWidrow, Method::NnLpc, Method::NnLpcImproved};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t n_train = 10000;
  std::size_t n_test = 2000;
  TrainConfig train;
  double linearity_bound = 0.05;
  ImprovedInitOptions improved;
  std::string output_dir = "out";
  std::string cache_dir;
  /// Wall times are not reproducible, so report.csv leaves the wall_s
  /// column empty unless this is set.
  bool report_wall_time = false;

  void validate() const;
};

/// Missing keys keep the values of `defaults`; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig defaults = {});
nlohmann::json to_json(const ExperimentConfig& cfg);

struct ReportRow {
  Method method = Method::Linear;
  int horizon_steps = 1;
  double horizon_s = 0.0;
  std::optional<std::uint64_t> seed;  // empty for seed-free methods run once
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double wall_s = 0.0;
  std::string error;  // non-empty when the cell failed
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
};

/// Everything one (method, horizon, seed) cell produced.
struct CellOutcome {
  ReportRow row;
  Eigen::VectorXd test_predictions;
  std::optional<ARModel> model;
  std::optional<Mlp> net;
  std::optional<TrainTrace> trace;
  std::optional<RotationParams> rotation;
  std::vector<double> search_trace;
};

/// Runs benchmark cells against one generated series; the series and the
/// per-horizon datasets are built once and shared by all cells.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);
  /// Uses `series` instead of generating one from cfg.lorenz.
  Experiment(ExperimentConfig cfg, TimeSeries series);

  const ExperimentConfig& config() const { return cfg_; }
  const TimeSeries& series();
  /// (train, test) rows for a horizon: the first n_train windows and up to
  /// n_test windows after them.
  const std::pair<Dataset, Dataset>& datasets(int horizon_steps);
  /// Index into series() of the target of test row 0.
  std::size_t first_test_target(int horizon_steps) const;

  CellOutcome run_cell(Method method, int horizon_steps, std::uint64_t seed);

  /// All configured cells, ordered by method, horizon, seed. Seed-free
  /// methods other than `linear` are computed once per horizon and repeated
  /// for every seed; `linear` gets a single row per horizon. Failures are
  /// recorded in the row and the run continues.
  ExperimentReport run_table(std::ostream* progress = nullptr);

 private:
  ExperimentConfig cfg_;
  std::optional<TimeSeries> series_;
  std::map<int, std::pair<Dataset, Dataset>> datasets_;
};

/// Median test RMSE per (method, horizon_steps) over the rows without errors.
std::map<std::pair<Method, int>, double> median_test_rmse(const ExperimentReport& report);

/// Methods as rows, horizons as columns, median test RMSE in the cells.
std::string render_table(const ExperimentReport& report, const ExperimentConfig& cfg);

/// `method,horizon_s,seed,train_rmse,test_rmse,wall_s`, RMSE at 6 significant digits.
void write_report_csv(std::ostream& os, const ExperimentReport& report, bool with_wall_time);

}  // namespace lpinit
