#include "lpinit/lm_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "lpinit/errors.hpp"
#include "lpinit/linear_forecast.hpp"

namespace lpinit {
namespace {

// Normal-equation pieces reused across the damping retries of one epoch.
struct GaussNewton {
  Eigen::MatrixXd jtj;
  Eigen::VectorXd jtr;
  Eigen::VectorXd scale;  // 1 / sqrt(diag(J^T J)), zero for dead columns
};

GaussNewton gauss_newton(const ResidualJacobian& rj) {
  GaussNewton gn;
  const Eigen::Index m = rj.jacobian.cols();
  gn.jtj = Eigen::MatrixXd::Zero(m, m);
  gn.jtj.selfadjointView<Eigen::Lower>().rankUpdate(rj.jacobian.transpose());
  gn.jtj.triangularView<Eigen::StrictlyUpper>() = gn.jtj.transpose();
  gn.jtr = rj.jacobian.transpose() * rj.residuals;
  gn.scale.resize(m);
  const double dmax = gn.jtj.diagonal().maxCoeff();
  for (Eigen::Index j = 0; j < m; ++j) {
    const double d = gn.jtj(j, j);
    gn.scale(j) = d > 1e-30 * dmax && d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  return gn;
}

Eigen::VectorXd checked_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("lm: damped normal equations are not positive definite");
  }
  Eigen::VectorXd x = ldlt.solve(rhs);
  if (!x.allFinite()) throw NumericError("lm: non-finite step");
  return x;
}

// Marquardt damping is solved in Jacobi-scaled coordinates: with
// S = diag(scale), (S J^T J S + lambda I) y = -S J^T r and delta = S y, which
// equals (J^T J + lambda diag(J^T J)) delta = -J^T r on the live columns.
// Columns with an all-zero Jacobian get no step.
Eigen::VectorXd solve_damped(const GaussNewton& gn, double lambda, Damping damping) {
  if (damping == Damping::Identity) {
    Eigen::MatrixXd a = gn.jtj;
    a.diagonal().array() += lambda;
    return checked_solve(a, -gn.jtr);
  }
  const Eigen::VectorXd& s = gn.scale;
  Eigen::MatrixXd a = s.asDiagonal() * gn.jtj * s.asDiagonal();
  for (Eigen::Index j = 0; j < a.rows(); ++j) a(j, j) += s(j) > 0.0 ? lambda : 1.0;
  return s.asDiagonal() * checked_solve(a, -(s.asDiagonal() * gn.jtr));
}

}  // namespace

std::string to_string(Damping d) { return d == Damping::Identity ? "identity" : "marquardt"; }

Damping damping_from_string(const std::string& s) {
  if (s == "identity") return Damping::Identity;
  if (s == "marquardt") return Damping::Marquardt;
  throw std::invalid_argument("unknown damping: " + s);
}

void TrainConfig::validate() const {
  if (max_epochs < 0) throw std::invalid_argument("train config: max_epochs must be >= 0");
  if (!(lambda0 > 0.0) || !(lambda_max > 0.0)) throw std::invalid_argument("train config: damping must be positive");
  if (!(lambda_up > 1.0) || !(lambda_down > 1.0)) throw std::invalid_argument("train config: lambda factors must exceed 1");
  if (min_sse_decrease < 0.0 || grad_tol < 0.0) throw std::invalid_argument("train config: tolerances must be >= 0");
}

std::vector<double> TrainTrace::accepted_sse() const {
  std::vector<double> out;
  for (const auto& e : entries) {
    if (e.accepted) out.push_back(e.sse);
  }
  return out;
}

void write_trace_csv(std::ostream& os, const TrainTrace& trace) {
  os << "epoch,sse,lambda,accepted\n" << std::setprecision(17);
  for (const auto& e : trace.entries) {
    os << e.epoch << ',' << e.sse << ',' << e.lambda << ',' << (e.accepted ? 1 : 0) << '\n';
  }
}

LmStep lm_step(const Mlp& net, const Dataset& data, double lambda, Damping damping) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lm_step: lambda must be positive");
  const ResidualJacobian rj = residual_jacobian(net, data);
  const GaussNewton gn = gauss_newton(rj);
  LmStep step;
  step.delta = solve_damped(gn, lambda, damping);
  step.candidate = unflatten(net, flatten(net) + step.delta);
  step.predicted_sse = (rj.residuals + rj.jacobian * step.delta).squaredNorm();
  return step;
}

TrainResult train(const Mlp& net, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("train: empty dataset");

  TrainResult result{net, {}};
  TrainTrace& trace = result.trace;
  Eigen::VectorXd theta = flatten(net);
  ResidualJacobian rj = residual_jacobian(net, data);
  double current = rj.residuals.squaredNorm();
  trace.initial_sse = trace.final_sse = current;
  if (!std::isfinite(current)) {
    trace.numeric_failure = true;
    return result;
  }

  double lambda = cfg.lambda0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const GaussNewton gn = gauss_newton(rj);
    if (gn.jtr.lpNorm<Eigen::Infinity>() < cfg.grad_tol) break;

    bool accepted = false;
    while (!accepted && lambda <= cfg.lambda_max) {
      double candidate_sse = std::numeric_limits<double>::infinity();
      Eigen::VectorXd candidate_theta;
      try {
        candidate_theta = theta + solve_damped(gn, lambda, cfg.damping);
        candidate_sse = sse(unflatten(net, candidate_theta), data);
      } catch (const NumericError&) {
        // Treated like a step that failed to improve.
      } catch (const std::invalid_argument&) {
        // unflatten rejects non-finite parameters.
      }
      if (std::isfinite(candidate_sse) && candidate_sse < current - cfg.min_sse_decrease) {
        trace.entries.push_back({epoch, candidate_sse, lambda, true});
        theta = std::move(candidate_theta);
        current = candidate_sse;
        lambda = std::max(lambda / cfg.lambda_down, std::numeric_limits<double>::min());
        accepted = true;
      } else {
        trace.entries.push_back({epoch, candidate_sse, lambda, false});
        lambda *= cfg.lambda_up;
      }
    }
    if (!accepted) break;
    ++trace.epochs_run;
    result.net = unflatten(net, theta);
    if (epoch == cfg.max_epochs) break;
    rj = residual_jacobian(result.net, data);
    if (!rj.jacobian.allFinite()) {
      trace.numeric_failure = true;
      break;
    }
  }
  trace.final_sse = current;
  return result;
}

double evaluate(const Mlp& net, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  return rmse(forward_batch(net, data.inputs), data.targets);
}

}  // namespace lpinit
