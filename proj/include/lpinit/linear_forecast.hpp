#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpinit/series.hpp"

namespace lpinit {

/// Order-p linear prediction filter. coefficients[0] (a_1) multiplies the
/// most recent sample of a window.
struct ARModel {
  std::vector<double> coefficients;
  /// Set when the regressors were rank deficient and a tiny ridge term was
  /// added to pick a unique solution.
  bool ridge_regularized = false;

  int order() const { return static_cast<int>(coefficients.size()); }
};

/// Least-squares fit of the filter on the rows of `train` (no intercept).
ARModel fit_lpc(const Dataset& train);

/// a_1 * w[p-1] + a_2 * w[p-2] + ... + a_p * w[0].
double ar_predict(const ARModel& model, std::span<const double> window);

Eigen::VectorXd ar_predict_batch(const ARModel& model, const Dataset& data);

double ar_sse(const ARModel& model, const Dataset& data);

double rmse(std::span<const double> predicted, std::span<const double> actual);
double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// `a1,...,ap` with 17 significant digits.
std::string to_csv_line(const ARModel& model);
ARModel ar_model_from_csv(const std::string& line);

}  // namespace lpinit
