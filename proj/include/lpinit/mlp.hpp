#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "lpinit/series.hpp"

namespace lpinit {

enum class Activation { Tanh, Identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct Layer {
  Eigen::MatrixXd weights;  // out_dim x in_dim
  Eigen::VectorXd biases;   // out_dim
  Activation activation = Activation::Tanh;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

/// Feedforward stack. Immutable once built; the constructor checks that
/// adjacent layers fit together and that every entry is finite.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }
  std::size_t depth() const { return layers_.size(); }
  Eigen::Index in_dim() const;
  Eigen::Index out_dim() const;
  /// Total number of weights and biases.
  Eigen::Index param_count() const;

 private:
  std::vector<Layer> layers_;
};

double forward(const Mlp& net, std::span<const double> input);
double forward(const Mlp& net, const Eigen::VectorXd& input);

/// One output per row of `inputs` (rows x in_dim), order preserved.
Eigen::VectorXd forward_batch(const Mlp& net, const Eigen::MatrixXd& inputs);

struct ResidualJacobian {
  Eigen::VectorXd residuals;  // forward(input_i) - target_i
  Eigen::MatrixXd jacobian;   // rows x param_count, columns in ParamVector order
};

/// Residuals and their exact derivatives w.r.t. every parameter, accumulated
/// in reverse mode over the whole batch.
ResidualJacobian residual_jacobian(const Mlp& net, const Dataset& data);

Eigen::VectorXd residuals(const Mlp& net, const Dataset& data);
double sse(const Mlp& net, const Dataset& data);

/// 2 * J^T r, computed by backpropagation without materialising J.
Eigen::VectorXd sse_gradient(const Mlp& net, const Dataset& data);

// ParamVector layout: for each layer in order, the weight matrix row-major,
// then the bias vector.
Eigen::VectorXd flatten(const Mlp& net);
Mlp unflatten(const Mlp& shape, const Eigen::VectorXd& params);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace lpinit
