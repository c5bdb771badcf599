#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpinit/linear_forecast.hpp"
#include "lpinit/lm_trainer.hpp"
#include "lpinit/mlp.hpp"
#include "lpinit/series.hpp"

namespace lpinit {

enum class Orthogonalization { Exponential, Cayley };

enum class SearchObjective {
  GradNorm,           // maximise |2 J^T r| of the rotated network
  FirstEpochError,    // minimise training SSE after one LM epoch
  FullTrainingError,  // minimise training SSE after the full LM schedule
};

std::string to_string(Orthogonalization o);
Orthogonalization orthogonalization_from_string(const std::string& s);
std::string to_string(SearchObjective o);
SearchObjective objective_from_string(const std::string& s);

struct InitConfig {
  double alpha = 1.0;
  /// Largest admitted first-layer pre-activation magnitude.
  double linearity_bound = 0.05;
  Orthogonalization parameterization = Orthogonalization::Exponential;

  void validate() const;
};

/// Generator coefficients of the two inserted rotations. Entry t of each
/// vector multiplies skew_basis(k, m) for the t-th pair (k, m), k < m, in
/// lexicographic order.
struct RotationParams {
  int width = 0;
  Eigen::VectorXd coeffs_1;
  Eigen::VectorXd coeffs_2;

  static RotationParams zeros(int width);
  /// coeffs_1 followed by coeffs_2.
  Eigen::VectorXd packed() const;
  static RotationParams unpack(int width, const Eigen::VectorXd& v);
};

std::string to_csv_line(const RotationParams& params);

inline int skew_dimension(int n) { return n * (n - 1) / 2; }

/// linearity_bound / max |x| over every training window.
double choose_alpha(const Dataset& train, double linearity_bound);

/// Three-layer (tanh, tanh, identity) network whose linearised map equals the
/// filter: A1 = alpha I, A2 = alpha M, A3 = alpha^-2 e_1^T, where row 1 of M
/// holds the filter coefficients in window order and rows 2..p are identity
/// rows. All biases are zero.
Mlp lpc_simple_init(const ARModel& model, const InitConfig& cfg);

/// Basis generator for the pair (k, m), 1-based with k < m <= n: +1 at
/// (k, m), -1 at (m, k).
Eigen::MatrixXd skew_basis(int k, int m, int n);

Eigen::MatrixXd build_skew(const Eigen::VectorXd& coeffs, int n);

/// exp(G) for skew-symmetric G (scaling and squaring around a Taylor core).
Eigen::MatrixXd orthogonal_exp(const Eigen::MatrixXd& g);

/// (I - G)(I + G)^-1 for skew-symmetric G.
Eigen::MatrixXd orthogonal_cayley(const Eigen::MatrixXd& g);

Eigen::MatrixXd orthogonal_from_coeffs(const Eigen::VectorXd& coeffs, int n, Orthogonalization kind);

/// W1' = U1 W1, W2' = U2 W2 U1^T, W3' = W3 U2^T with b1' = U1 b1,
/// b2' = U2 b2. The linearised map of the network is unchanged.
Mlp apply_rotations(const Mlp& net, const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2);

Mlp apply_rotations(const Mlp& net, const RotationParams& params, Orthogonalization kind);

struct ImprovedInitOptions {
  SearchObjective objective = SearchObjective::GradNorm;
  int iters = 10;
  double step = 0.1;
  double fd_step = 1e-5;
  int max_halvings = 20;
  Orthogonalization parameterization = Orthogonalization::Exponential;
  /// LM settings for the first-epoch and full-training objectives.
  TrainConfig train;
};

struct ImprovedInitResult {
  Mlp net;
  RotationParams params;
  /// Objective value at the start and after every iteration.
  std::vector<double> trace;
};

/// Objective of `base` rotated by `params`, oriented as reported in the trace
/// (gradient norm for GradNorm, SSE for the error objectives).
double rotation_objective(const Mlp& base, const Dataset& train, const RotationParams& params,
                          const ImprovedInitOptions& opts);

/// Searches the rotation coefficients of an lpc_simple_init network by
/// fixed-iteration gradient ascent (GradNorm) or descent (error objectives)
/// with central finite-difference gradients and backtracking step halving.
ImprovedInitResult improved_init(const Mlp& base, const Dataset& train, const ImprovedInitOptions& opts);

/// Nguyen-Widrow initialisation for a tanh network with a linear output
/// unit. Hidden rows get norm 0.7 * H^(1/in), biases uniform in that range.
/// Assumes inputs scaled to [-1, 1]; see rescale_io.
Mlp nguyen_widrow_init(int in_dim, std::span<const int> hidden, std::uint64_t seed);

/// Folds input division by `input_scale` into the first layer and output
/// multiplication by `output_scale` into the last one.
Mlp rescale_io(const Mlp& net, double input_scale, double output_scale);

}  // namespace lpinit
