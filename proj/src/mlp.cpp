#include "lpinit/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace lpinit {
namespace {

void apply_activation(Activation a, Eigen::MatrixXd& z) {
  if (a == Activation::Tanh) z = z.array().tanh();
}

// Derivative of the activation expressed through its output.
Eigen::ArrayXXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
  if (a == Activation::Tanh) return 1.0 - out.array().square();
  return Eigen::ArrayXXd::Ones(out.rows(), out.cols());
}

void check_batch(const Mlp& net, const Eigen::MatrixXd& inputs) {
  if (net.depth() == 0) throw std::invalid_argument("mlp: empty network");
  if (inputs.cols() != net.in_dim()) throw std::invalid_argument("mlp: input width does not match the network");
}

void check_scalar_output(const Mlp& net) {
  if (net.out_dim() != 1) throw std::invalid_argument("mlp: residuals need a single output");
}

// Activations of every layer, column per sample; acts[0] is the input.
std::vector<Eigen::MatrixXd> forward_all(const Mlp& net, const Eigen::MatrixXd& inputs) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(net.depth() + 1);
  acts.push_back(inputs.transpose());
  for (const Layer& l : net.layers()) {
    Eigen::MatrixXd z = l.weights * acts.back();
    z.colwise() += l.biases;
    apply_activation(l.activation, z);
    acts.push_back(std::move(z));
  }
  return acts;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "identity"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.weights.rows() == 0 || l.weights.cols() == 0) throw std::invalid_argument("mlp: empty layer");
    if (l.biases.size() != l.weights.rows()) throw std::invalid_argument("mlp: bias length does not match layer width");
    if (i > 0 && l.in_dim() != layers_[i - 1].out_dim()) {
      throw std::invalid_argument("mlp: layer " + std::to_string(i) + " input width does not match previous output");
    }
    if (!l.weights.allFinite() || !l.biases.allFinite()) throw std::invalid_argument("mlp: non-finite parameter");
  }
}

Eigen::Index Mlp::in_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
Eigen::Index Mlp::out_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

Eigen::Index Mlp::param_count() const {
  Eigen::Index n = 0;
  for (const Layer& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

double forward(const Mlp& net, std::span<const double> input) {
  const Eigen::Map<const Eigen::VectorXd> v(input.data(), static_cast<Eigen::Index>(input.size()));
  return forward(net, Eigen::VectorXd(v));
}

double forward(const Mlp& net, const Eigen::VectorXd& input) {
  if (net.depth() == 0) throw std::invalid_argument("mlp: empty network");
  if (input.size() != net.in_dim()) throw std::invalid_argument("mlp: input width does not match the network");
  Eigen::VectorXd u = input;
  for (const Layer& l : net.layers()) {
    u = l.weights * u + l.biases;
    if (l.activation == Activation::Tanh) u = u.array().tanh();
  }
  return u(0);
}

Eigen::VectorXd forward_batch(const Mlp& net, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() == 0) return {};
  check_batch(net, inputs);
  return forward_all(net, inputs).back().row(0).transpose();
}

Eigen::VectorXd residuals(const Mlp& net, const Dataset& data) {
  check_scalar_output(net);
  return forward_batch(net, data.inputs) - data.targets;
}

double sse(const Mlp& net, const Dataset& data) { return residuals(net, data).squaredNorm(); }

ResidualJacobian residual_jacobian(const Mlp& net, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("residual_jacobian: empty dataset");
  check_batch(net, data.inputs);
  check_scalar_output(net);

  const auto acts = forward_all(net, data.inputs);
  const Eigen::Index n = data.rows();
  ResidualJacobian out;
  out.residuals = acts.back().row(0).transpose() - data.targets;
  out.jacobian.resize(n, net.param_count());

  std::vector<Eigen::Index> offsets(net.depth());
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    offsets[l] = off;
    off += net.layer(l).weights.size() + net.layer(l).biases.size();
  }

  // delta(j, s) = d residual_s / d pre-activation j of the current layer.
  Eigen::MatrixXd delta = activation_slope(net.layers().back().activation, acts.back()).matrix();
  for (std::size_t li = net.depth(); li-- > 0;) {
    const Layer& l = net.layer(li);
    const Eigen::MatrixXd& prev = acts[li];
    const Eigen::Index rows = l.out_dim();
    const Eigen::Index cols = l.in_dim();
    for (Eigen::Index j = 0; j < rows; ++j) {
      for (Eigen::Index k = 0; k < cols; ++k) {
        out.jacobian.col(offsets[li] + j * cols + k) = (delta.row(j).array() * prev.row(k).array()).transpose();
      }
      out.jacobian.col(offsets[li] + rows * cols + j) = delta.row(j).transpose();
    }
    if (li > 0) {
      delta = ((l.weights.transpose() * delta).array() * activation_slope(net.layer(li - 1).activation, prev)).matrix();
    }
  }
  return out;
}

Eigen::VectorXd sse_gradient(const Mlp& net, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("sse_gradient: empty dataset");
  check_batch(net, data.inputs);
  check_scalar_output(net);

  const auto acts = forward_all(net, data.inputs);
  const Eigen::RowVectorXd r = acts.back().row(0) - data.targets.transpose();
  Eigen::VectorXd grad(net.param_count());

  std::vector<Eigen::Index> offsets(net.depth());
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    offsets[l] = off;
    off += net.layer(l).weights.size() + net.layer(l).biases.size();
  }

  Eigen::MatrixXd delta =
      (activation_slope(net.layers().back().activation, acts.back()).rowwise() * r.array()).matrix() * 2.0;
  for (std::size_t li = net.depth(); li-- > 0;) {
    const Layer& l = net.layer(li);
    const Eigen::MatrixXd gw = delta * acts[li].transpose();
    const Eigen::Index rows = l.out_dim();
    const Eigen::Index cols = l.in_dim();
    for (Eigen::Index j = 0; j < rows; ++j) {
      grad.segment(offsets[li] + j * cols, cols) = gw.row(j).transpose();
    }
    grad.segment(offsets[li] + rows * cols, rows) = delta.rowwise().sum();
    if (li > 0) {
      delta =
          ((l.weights.transpose() * delta).array() * activation_slope(net.layer(li - 1).activation, acts[li])).matrix();
    }
  }
  return grad;
}

Eigen::VectorXd flatten(const Mlp& net) {
  Eigen::VectorXd v(net.param_count());
  Eigen::Index i = 0;
  for (const Layer& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) v(i++) = l.weights(r, c);
    }
    v.segment(i, l.biases.size()) = l.biases;
    i += l.biases.size();
  }
  return v;
}

Mlp unflatten(const Mlp& shape, const Eigen::VectorXd& params) {
  if (params.size() != shape.param_count()) throw std::invalid_argument("unflatten: parameter count mismatch");
  std::vector<Layer> layers = shape.layers();
  Eigen::Index i = 0;
  for (Layer& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = params(i++);
    }
    l.biases = params.segment(i, l.biases.size());
    i += l.biases.size();
  }
  return Mlp(std::move(layers));
}

nlohmann::json to_json(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers()) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      w.push_back(std::vector<double>(l.weights.row(r).begin(), l.weights.row(r).end()));
    }
    layers.push_back({{"weights", w},
                      {"biases", std::vector<double>(l.biases.begin(), l.biases.end())},
                      {"activation", to_string(l.activation)}});
  }
  return {{"layers", layers}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  std::vector<Layer> layers;
  for (const auto& jl : j.at("layers")) {
    const auto rows = jl.at("weights").get<std::vector<std::vector<double>>>();
    const auto biases = jl.at("biases").get<std::vector<double>>();
    if (rows.empty()) throw std::invalid_argument("mlp json: empty weight matrix");
    Layer l;
    l.weights.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw std::invalid_argument("mlp json: ragged weight matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c) l.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    l.biases = Eigen::Map<const Eigen::VectorXd>(biases.data(), static_cast<Eigen::Index>(biases.size()));
    l.activation = activation_from_string(jl.at("activation").get<std::string>());
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers));
}

}  // namespace lpinit
