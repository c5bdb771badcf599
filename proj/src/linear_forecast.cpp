#include "lpinit/linear_forecast.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>

#include "lpinit/errors.hpp"

namespace lpinit {
namespace {

// Column k of the regressor matrix holds the sample multiplied by a_{k+1},
// i.e. window position p-1-k.
Eigen::MatrixXd regressors(const Dataset& d) { return d.inputs.rowwise().reverse(); }

}  // namespace

ARModel fit_lpc(const Dataset& train) {
  if (train.p < 1) throw std::invalid_argument("fit_lpc: p must be >= 1");
  if (train.rows() < train.p) throw InsufficientData("fit_lpc: need at least p rows");

  const Eigen::MatrixXd x = regressors(train);
  const Eigen::VectorXd& y = train.targets;
  ARModel model;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::VectorXd a;
  if (qr.rank() == x.cols()) {
    a = qr.solve(y);
  } else {
    model.ridge_regularized = true;
    const double mean_sq = x.squaredNorm() / static_cast<double>(x.size());
    if (mean_sq == 0.0) {
      a = Eigen::VectorXd::Zero(x.cols());
    } else {
      const double mu = 1e-10 * mean_sq;
      Eigen::MatrixXd aug(x.rows() + x.cols(), x.cols());
      aug << x, std::sqrt(mu) * Eigen::MatrixXd::Identity(x.cols(), x.cols());
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(aug.rows());
      rhs.head(y.size()) = y;
      a = aug.colPivHouseholderQr().solve(rhs);
    }
  }
  if (!a.allFinite()) throw NumericError("fit_lpc: non-finite coefficients");
  model.coefficients.assign(a.data(), a.data() + a.size());
  return model;
}

double ar_predict(const ARModel& model, std::span<const double> window) {
  const std::size_t p = model.coefficients.size();
  if (window.size() != p) throw std::invalid_argument("ar_predict: window length must equal the model order");
  double acc = 0.0;
  for (std::size_t k = 0; k < p; ++k) acc += model.coefficients[k] * window[p - 1 - k];
  return acc;
}

Eigen::VectorXd ar_predict_batch(const ARModel& model, const Dataset& data) {
  if (data.p != model.order()) throw std::invalid_argument("ar_predict_batch: window length must equal the model order");
  const Eigen::Map<const Eigen::VectorXd> a(model.coefficients.data(), model.order());
  return regressors(data) * a;
}

double ar_sse(const ARModel& model, const Dataset& data) {
  return (ar_predict_batch(model, data) - data.targets).squaredNorm();
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("rmse: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("rmse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  return rmse(std::span<const double>(predicted.data(), static_cast<std::size_t>(predicted.size())),
              std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())));
}

std::string to_csv_line(const ARModel& model) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < model.coefficients.size(); ++k) {
    if (k) os << ',';
    os << model.coefficients[k];
  }
  return os.str();
}

ARModel ar_model_from_csv(const std::string& line) {
  ARModel model;
  std::istringstream is(line);
  std::string field;
  while (std::getline(is, field, ',')) model.coefficients.push_back(std::stod(field));
  if (model.coefficients.empty()) throw std::invalid_argument("ar model csv: no coefficients");
  return model;
}

}  // namespace lpinit
