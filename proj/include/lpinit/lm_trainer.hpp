#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpinit/mlp.hpp"
#include "lpinit/series.hpp"

namespace lpinit {

/// Damping term added to J^T J: lambda * I, or lambda * diag(J^T J).
enum class Damping { Identity, Marquardt };

std::string to_string(Damping d);
Damping damping_from_string(const std::string& s);

struct TrainConfig {
  int max_epochs = 300;
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 10.0;
  double lambda_max = 1e10;
  /// A candidate is accepted when it lowers the SSE by more than this.
  double min_sse_decrease = 0.0;
  /// Stop once the gradient infinity norm |J^T r| drops below this.
  double grad_tol = 1e-10;
  Damping damping = Damping::Identity;

  void validate() const;
};

struct TrainTraceEntry {
  int epoch = 0;        // 1-based epoch the attempt belongs to
  double sse = 0.0;     // SSE of the candidate
  double lambda = 0.0;  // damping used for the attempt
  bool accepted = false;
};

/// Every LM attempt in order. An epoch ends with its single accepted attempt;
/// the rejected retries preceding it carry the same epoch number.
struct TrainTrace {
  std::vector<TrainTraceEntry> entries;
  double initial_sse = 0.0;
  double final_sse = 0.0;
  int epochs_run = 0;
  bool numeric_failure = false;

  std::vector<double> accepted_sse() const;
};

/// `epoch,sse,lambda,accepted`.
void write_trace_csv(std::ostream& os, const TrainTrace& trace);

struct LmStep {
  Mlp candidate;
  Eigen::VectorXd delta;
  /// |r + J delta|^2, the Gauss-Newton model's prediction of the new SSE.
  double predicted_sse = 0.0;
};

/// Solves (J^T J + lambda * D) delta = -J^T r, D = I or diag(J^T J), and
/// shifts the parameters by delta. Throws NumericError when the damped system
/// is singular.
LmStep lm_step(const Mlp& net, const Dataset& data, double lambda, Damping damping = Damping::Identity);

struct TrainResult {
  Mlp net;
  TrainTrace trace;
};

/// Monotone accept/reject Levenberg-Marquardt loop. The returned network is
/// the lowest-SSE iterate; on non-finite values the loop stops early and
/// flags the trace instead of throwing.
TrainResult train(const Mlp& net, const Dataset& data, const TrainConfig& cfg);

/// RMSE of the network on `data`.
double evaluate(const Mlp& net, const Dataset& data);

}  // namespace lpinit
