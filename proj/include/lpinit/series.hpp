#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lpinit {

/// Uniformly sampled scalar sequence. Sample k sits at time t0 + k * dt.
struct TimeSeries {
  std::vector<double> values;
  double dt = 0.01;
  double t0 = 0.0;

  std::size_t size() const { return values.size(); }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  /// Time span covered by the samples, (size - 1) * dt.
  double duration() const;
  void validate() const;
};

/// Windowed supervised pairs. Row i of `inputs` holds p consecutive samples,
/// oldest first; `targets[i]` lies horizon_steps samples after the newest.
struct Dataset {
  Eigen::MatrixXd inputs;  // rows x p
  Eigen::VectorXd targets;
  int p = 0;
  int horizon_steps = 1;
  double dt = 0.01;

  Eigen::Index rows() const { return targets.size(); }
  bool empty() const { return targets.size() == 0; }
};

/// Suffix of `ts` starting at the first sample with time >= t0 + t_skip.
TimeSeries drop_transient(const TimeSeries& ts, double t_skip);

/// Direct-horizon windowing: row for target x_n is (x_{n-h-p+1}, ..., x_{n-h}).
Dataset make_dataset(const TimeSeries& ts, int p, int horizon_steps);

/// Chronological split; the first floor(rows * train_fraction) rows train.
std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double train_fraction);

/// Chronological split by row counts: rows [0, n_train) and the next
/// min(n_test, rows - n_train) rows.
std::pair<Dataset, Dataset> split_rows(const Dataset& d, std::size_t n_train, std::size_t n_test);

/// Contiguous row range [begin, begin + count).
Dataset slice_rows(const Dataset& d, Eigen::Index begin, Eigen::Index count);

// CSV formats: series as `t,x`, datasets as `x1,...,xp,target`, 17 significant digits.
void write_series_csv(std::ostream& os, const TimeSeries& ts);
TimeSeries read_series_csv(std::istream& is);
void write_dataset_csv(std::ostream& os, const Dataset& d);

}  // namespace lpinit
