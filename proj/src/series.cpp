#include "lpinit/series.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lpinit/errors.hpp"

namespace lpinit {

double TimeSeries::duration() const {
  return values.empty() ? 0.0 : static_cast<double>(values.size() - 1) * dt;
}

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time series: dt must be positive");
  if (values.empty()) throw std::invalid_argument("time series: no samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("time series: non-finite sample");
  }
}

TimeSeries drop_transient(const TimeSeries& ts, double t_skip) {
  if (!(t_skip >= 0.0)) throw std::invalid_argument("drop_transient: t_skip must be >= 0");
  if (t_skip >= ts.duration()) {
    throw InsufficientData("drop_transient: t_skip covers the whole series");
  }
  // Small slack so that t_skip = k * dt maps to index k despite rounding.
  const auto first = static_cast<std::size_t>(std::ceil(t_skip / ts.dt - 1e-9));
  TimeSeries out;
  out.dt = ts.dt;
  out.t0 = ts.time_at(first);
  out.values.assign(ts.values.begin() + static_cast<std::ptrdiff_t>(first), ts.values.end());
  return out;
}

Dataset make_dataset(const TimeSeries& ts, int p, int horizon_steps) {
  if (p < 1) throw std::invalid_argument("make_dataset: p must be >= 1");
  if (horizon_steps < 1) throw std::invalid_argument("make_dataset: horizon must be >= 1");
  const auto len = static_cast<Eigen::Index>(ts.size());
  if (len < p + horizon_steps) {
    throw InsufficientData("make_dataset: series of length " + std::to_string(len) + " needs at least " +
                           std::to_string(p + horizon_steps) + " samples");
  }
  const Eigen::Index n = len - p - horizon_steps + 1;
  Dataset d;
  d.p = p;
  d.horizon_steps = horizon_steps;
  d.dt = ts.dt;
  d.inputs.resize(n, p);
  d.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) d.inputs(i, k) = ts.values[static_cast<std::size_t>(i + k)];
    d.targets(i) = ts.values[static_cast<std::size_t>(i + p - 1 + horizon_steps)];
  }
  return d;
}

Dataset slice_rows(const Dataset& d, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > d.rows()) throw std::out_of_range("slice_rows: range");
  Dataset out;
  out.p = d.p;
  out.horizon_steps = d.horizon_steps;
  out.dt = d.dt;
  out.inputs = d.inputs.middleRows(begin, count);
  out.targets = d.targets.segment(begin, count);
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<Eigen::Index>(std::floor(static_cast<double>(d.rows()) * train_fraction));
  if (n_train == 0 || n_train == d.rows()) throw InsufficientData("split_dataset: empty part");
  return {slice_rows(d, 0, n_train), slice_rows(d, n_train, d.rows() - n_train)};
}

std::pair<Dataset, Dataset> split_rows(const Dataset& d, std::size_t n_train, std::size_t n_test) {
  const auto train = static_cast<Eigen::Index>(n_train);
  if (train == 0 || n_test == 0 || train >= d.rows()) throw InsufficientData("split_rows: empty part");
  const Eigen::Index test = std::min<Eigen::Index>(static_cast<Eigen::Index>(n_test), d.rows() - train);
  return {slice_rows(d, 0, train), slice_rows(d, train, test)};
}

void write_series_csv(std::ostream& os, const TimeSeries& ts) {
  os << "t,x\n" << std::setprecision(17);
  for (std::size_t k = 0; k < ts.size(); ++k) os << ts.time_at(k) << ',' << ts.values[k] << '\n';
}

TimeSeries read_series_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x", 0) != 0) {
    throw std::invalid_argument("series csv: expected header 't,x'");
  }
  std::vector<double> times;
  TimeSeries ts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("series csv: malformed row '" + line + "'");
    times.push_back(std::stod(line.substr(0, comma)));
    ts.values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (times.size() < 2) throw InsufficientData("series csv: need at least two samples");
  ts.t0 = times.front();
  ts.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  ts.validate();
  return ts;
}

void write_dataset_csv(std::ostream& os, const Dataset& d) {
  for (int k = 1; k <= d.p; ++k) os << 'x' << k << ',';
  os << "target\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (int k = 0; k < d.p; ++k) os << d.inputs(i, k) << ',';
    os << d.targets(i) << '\n';
  }
}

}  // namespace lpinit
