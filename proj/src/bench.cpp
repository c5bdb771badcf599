#include "lpinit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lpinit/errors.hpp"

namespace lpinit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument("config: unknown key '" + where + k + "'");
  }
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Linear: return "linear";
    case Method::NnNguyenWidrow: return "nn-nw";
    case Method::NnLpc: return "nn-lpc";
    case Method::NnLpcImproved: return "nn-lpc-improved";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::Linear, Method::NnNguyenWidrow, Method::NnLpc, Method::NnLpcImproved}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::string GenerationRecipe::key() const {
  std::ostringstream os;
  os << std::setprecision(17) << "lorenz sigma=" << lorenz.sigma << " r=" << lorenz.r << " b=" << lorenz.b
     << " s0=" << s0.x << ',' << s0.y << ',' << s0.z << " t_end=" << t_end << " dt=" << dt << " rel_tol=" << rel_tol
     << " t_skip=" << t_skip;
  return os.str();
}

TimeSeries generate_series(const GenerationRecipe& recipe) {
  const Trajectory traj = integrate_lorenz(recipe.lorenz, recipe.s0, recipe.t_end, recipe.dt, recipe.rel_tol);
  return recipe.t_skip > 0.0 ? drop_transient(traj.x, recipe.t_skip) : traj.x;
}

TimeSeries cached_series(const GenerationRecipe& recipe, const std::string& cache_dir) {
  if (cache_dir.empty()) return generate_series(recipe);
  char name[64];
  std::snprintf(name, sizeof name, "lorenz_%016" PRIx64 ".csv", fnv1a(recipe.key()));
  const std::filesystem::path path = std::filesystem::path(cache_dir) / name;
  if (std::ifstream in(path); in) {
    TimeSeries ts = read_series_csv(in);
    // The time column only carries dt up to rounding; the recipe is exact.
    ts.dt = recipe.dt;
    return ts;
  }
  TimeSeries ts = generate_series(recipe);
  std::filesystem::create_directories(cache_dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    write_series_csv(out, ts);
    if (!out) throw std::runtime_error("cannot write series cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return ts;
}

void ExperimentConfig::validate() const {
  lorenz.lorenz.validate();
  if (p < 1) throw std::invalid_argument("config: p must be >= 1");
  for (int h : horizons) {
    if (h < 1) throw std::invalid_argument("config: horizons must be positive");
  }
  const bool stochastic = std::any_of(methods.begin(), methods.end(), uses_seed);
  if (stochastic && seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty for nn-nw");
  if (n_train == 0 || n_test == 0) throw std::invalid_argument("config: n_train and n_test must be positive");
  train.validate();
  if (!(linearity_bound > 0.0 && linearity_bound <= 0.5)) {
    throw std::invalid_argument("config: linearity_bound must lie in (0, 0.5]");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig cfg) {
  reject_unknown_keys(j,
                      {"lorenz", "p", "horizons", "methods", "seeds", "n_train", "n_test", "train", "init",
                       "output_dir", "cache_dir", "report_wall_time"},
                      "");
  if (j.contains("lorenz")) {
    const auto& l = j.at("lorenz");
    reject_unknown_keys(l, {"sigma", "r", "b", "s0", "t_end", "dt", "rel_tol", "t_skip"}, "lorenz.");
    GenerationRecipe& g = cfg.lorenz;
    read_key(l, "sigma", g.lorenz.sigma);
    read_key(l, "r", g.lorenz.r);
    read_key(l, "b", g.lorenz.b);
    if (l.contains("s0")) {
      const auto s0 = l.at("s0").get<std::vector<double>>();
      if (s0.size() != 3) throw std::invalid_argument("config: lorenz.s0 needs three values");
      g.s0 = {s0[0], s0[1], s0[2]};
    }
    read_key(l, "t_end", g.t_end);
    read_key(l, "dt", g.dt);
    read_key(l, "rel_tol", g.rel_tol);
    read_key(l, "t_skip", g.t_skip);
  }
  read_key(j, "p", cfg.p);
  read_key(j, "horizons", cfg.horizons);
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(method_from_string(m.get<std::string>()));
  }
  read_key(j, "seeds", cfg.seeds);
  read_key(j, "n_train", cfg.n_train);
  read_key(j, "n_test", cfg.n_test);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown_keys(t,
                        {"max_epochs", "lambda0", "lambda_up", "lambda_down", "lambda_max", "min_sse_decrease",
                         "grad_tol", "damping"},
                        "train.");
    read_key(t, "max_epochs", cfg.train.max_epochs);
    read_key(t, "lambda0", cfg.train.lambda0);
    read_key(t, "lambda_up", cfg.train.lambda_up);
    read_key(t, "lambda_down", cfg.train.lambda_down);
    read_key(t, "lambda_max", cfg.train.lambda_max);
    read_key(t, "min_sse_decrease", cfg.train.min_sse_decrease);
    read_key(t, "grad_tol", cfg.train.grad_tol);
    if (t.contains("damping")) cfg.train.damping = damping_from_string(t.at("damping").get<std::string>());
  }
  if (j.contains("init")) {
    const auto& i = j.at("init");
    reject_unknown_keys(
        i, {"linearity_bound", "parameterization", "objective", "iters", "step", "fd_step", "max_halvings"}, "init.");
    read_key(i, "linearity_bound", cfg.linearity_bound);
    if (i.contains("parameterization")) {
      cfg.improved.parameterization = orthogonalization_from_string(i.at("parameterization").get<std::string>());
    }
    if (i.contains("objective")) cfg.improved.objective = objective_from_string(i.at("objective").get<std::string>());
    read_key(i, "iters", cfg.improved.iters);
    read_key(i, "step", cfg.improved.step);
    read_key(i, "fd_step", cfg.improved.fd_step);
    read_key(i, "max_halvings", cfg.improved.max_halvings);
  }
  read_key(j, "output_dir", cfg.output_dir);
  read_key(j, "cache_dir", cfg.cache_dir);
  read_key(j, "report_wall_time", cfg.report_wall_time);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  const GenerationRecipe& g = cfg.lorenz;
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  return {
      {"lorenz",
       {{"sigma", g.lorenz.sigma},
        {"r", g.lorenz.r},
        {"b", g.lorenz.b},
        {"s0", {g.s0.x, g.s0.y, g.s0.z}},
        {"t_end", g.t_end},
        {"dt", g.dt},
        {"rel_tol", g.rel_tol},
        {"t_skip", g.t_skip}}},
      {"p", cfg.p},
      {"horizons", cfg.horizons},
      {"methods", methods},
      {"seeds", cfg.seeds},
      {"n_train", cfg.n_train},
      {"n_test", cfg.n_test},
      {"train",
       {{"max_epochs", cfg.train.max_epochs},
        {"lambda0", cfg.train.lambda0},
        {"lambda_up", cfg.train.lambda_up},
        {"lambda_down", cfg.train.lambda_down},
        {"lambda_max", cfg.train.lambda_max},
        {"min_sse_decrease", cfg.train.min_sse_decrease},
        {"grad_tol", cfg.train.grad_tol},
        {"damping", to_string(cfg.train.damping)}}},
      {"init",
       {{"linearity_bound", cfg.linearity_bound},
        {"parameterization", to_string(cfg.improved.parameterization)},
        {"objective", to_string(cfg.improved.objective)},
        {"iters", cfg.improved.iters},
        {"step", cfg.improved.step},
        {"fd_step", cfg.improved.fd_step},
        {"max_halvings", cfg.improved.max_halvings}}},
      {"output_dir", cfg.output_dir},
      {"cache_dir", cfg.cache_dir},
      {"report_wall_time", cfg.report_wall_time},
  };
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Experiment::Experiment(ExperimentConfig cfg, TimeSeries series) : cfg_(std::move(cfg)), series_(std::move(series)) {
  cfg_.validate();
  series_->validate();
  cfg_.lorenz.dt = series_->dt;
}

const TimeSeries& Experiment::series() {
  if (!series_) series_ = cached_series(cfg_.lorenz, cfg_.cache_dir);
  return *series_;
}

const std::pair<Dataset, Dataset>& Experiment::datasets(int horizon_steps) {
  auto it = datasets_.find(horizon_steps);
  if (it == datasets_.end()) {
    const Dataset all = make_dataset(series(), cfg_.p, horizon_steps);
    it = datasets_.emplace(horizon_steps, split_rows(all, cfg_.n_train, cfg_.n_test)).first;
  }
  return it->second;
}

std::size_t Experiment::first_test_target(int horizon_steps) const {
  return cfg_.n_train + static_cast<std::size_t>(cfg_.p - 1 + horizon_steps);
}

CellOutcome Experiment::run_cell(Method method, int horizon_steps, std::uint64_t seed) {
  const auto& [train_set, test_set] = datasets(horizon_steps);
  CellOutcome out;
  ReportRow& row = out.row;
  row.method = method;
  row.horizon_steps = horizon_steps;
  row.horizon_s = horizon_steps * cfg_.lorenz.dt;
  if (method != Method::Linear) row.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  Mlp initial;
  switch (method) {
    case Method::Linear: {
      out.model = fit_lpc(train_set);
      row.wall_s = seconds_since(start);
      row.train_rmse = std::sqrt(ar_sse(*out.model, train_set) / static_cast<double>(train_set.rows()));
      out.test_predictions = ar_predict_batch(*out.model, test_set);
      row.test_rmse = rmse(out.test_predictions, test_set.targets);
      return out;
    }
    case Method::NnNguyenWidrow: {
      const std::vector<int> hidden{cfg_.p, cfg_.p};
      initial = rescale_io(nguyen_widrow_init(cfg_.p, hidden, seed), train_set.inputs.cwiseAbs().maxCoeff(),
                           train_set.targets.cwiseAbs().maxCoeff());
      break;
    }
    case Method::NnLpc:
    case Method::NnLpcImproved: {
      out.model = fit_lpc(train_set);
      InitConfig init;
      init.linearity_bound = cfg_.linearity_bound;
      init.alpha = choose_alpha(train_set, cfg_.linearity_bound);
      init.parameterization = cfg_.improved.parameterization;
      initial = lpc_simple_init(*out.model, init);
      if (method == Method::NnLpcImproved) {
        ImprovedInitOptions opts = cfg_.improved;
        opts.train = cfg_.train;
        ImprovedInitResult search = improved_init(initial, train_set, opts);
        initial = std::move(search.net);
        out.rotation = std::move(search.params);
        out.search_trace = std::move(search.trace);
      }
      break;
    }
  }
  TrainResult trained = train(initial, train_set, cfg_.train);
  row.wall_s = seconds_since(start);
  if (trained.trace.numeric_failure) throw NumericError("training diverged");
  row.train_rmse = std::sqrt(trained.trace.final_sse / static_cast<double>(train_set.rows()));
  out.test_predictions = forward_batch(trained.net, test_set.inputs);
  row.test_rmse = rmse(out.test_predictions, test_set.targets);
  out.net = std::move(trained.net);
  out.trace = std::move(trained.trace);
  return out;
}

ExperimentReport Experiment::run_table(std::ostream* progress) {
  ExperimentReport report;
  for (Method method : cfg_.methods) {
    for (int h : cfg_.horizons) {
      std::optional<ReportRow> shared;
      const std::vector<std::uint64_t> seeds =
          method == Method::Linear || cfg_.seeds.empty() ? std::vector<std::uint64_t>{0} : cfg_.seeds;
      for (std::uint64_t seed : seeds) {
        ReportRow row;
        if (shared) {
          row = *shared;
        } else {
          try {
            row = run_cell(method, h, seed).row;
          } catch (const std::exception& e) {
            row.method = method;
            row.horizon_steps = h;
            row.horizon_s = h * cfg_.lorenz.dt;
            row.train_rmse = row.test_rmse = row.wall_s = kNaN;
            row.error = e.what();
          }
          if (!uses_seed(method)) shared = row;
        }
        if (method != Method::Linear) row.seed = seed;
        if (progress) {
          *progress << to_string(method) << " h=" << h;
          if (row.seed) *progress << " seed=" << *row.seed;
          if (row.error.empty()) {
            *progress << " test_rmse=" << format_g(row.test_rmse, 6) << " (" << format_g(row.wall_s, 3) << " s)\n";
          } else {
            *progress << " FAILED: " << row.error << '\n';
          }
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

std::map<std::pair<Method, int>, double> median_test_rmse(const ExperimentReport& report) {
  std::map<std::pair<Method, int>, std::vector<double>> groups;
  for (const auto& r : report.rows) {
    if (r.error.empty()) groups[{r.method, r.horizon_steps}].push_back(r.test_rmse);
  }
  std::map<std::pair<Method, int>, double> out;
  for (auto& [key, v] : groups) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out[key] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  return out;
}

std::string render_table(const ExperimentReport& report, const ExperimentConfig& cfg) {
  const auto medians = median_test_rmse(report);
  std::ostringstream os;
  os << std::left << std::setw(18) << "method";
  for (int h : cfg.horizons) os << std::right << std::setw(14) << ("s(" + format_g(h * cfg.lorenz.dt, 6) + " s)");
  os << '\n';
  for (Method m : cfg.methods) {
    os << std::left << std::setw(18) << to_string(m);
    for (int h : cfg.horizons) {
      const auto it = medians.find({m, h});
      os << std::right << std::setw(14) << (it == medians.end() ? std::string("-") : format_g(it->second, 4));
    }
    os << '\n';
  }
  return os.str();
}

void write_report_csv(std::ostream& os, const ExperimentReport& report, bool with_wall_time) {
  os << "method,horizon_s,seed,train_rmse,test_rmse,wall_s\n";
  for (const auto& r : report.rows) {
    os << to_string(r.method) << ',' << format_g(r.horizon_s, 6) << ',';
    if (r.seed) os << *r.seed;
    os << ',' << format_g(r.train_rmse, 6) << ',' << format_g(r.test_rmse, 6) << ',';
    if (with_wall_time) os << format_g(r.wall_s, 4);
    os << '\n';
  }
}

}  // namespace lpinit
