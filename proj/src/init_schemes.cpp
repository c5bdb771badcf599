#include "lpinit/init_schemes.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

#include "lpinit/errors.hpp"

namespace lpinit {
namespace {

void require_skew(const Eigen::MatrixXd& g, const char* who) {
  if (g.rows() != g.cols()) throw std::invalid_argument(std::string(who) + ": generator must be square");
  const Eigen::MatrixXd sym = g + g.transpose();
  if (sym.cwiseAbs().rowwise().sum().maxCoeff() >= 1e-12) {
    throw std::invalid_argument(std::string(who) + ": generator is not skew-symmetric");
  }
}

void require_orthogonal(const Eigen::MatrixXd& u, Eigen::Index n, const char* name) {
  if (u.rows() != n || u.cols() != n) {
    throw std::invalid_argument(std::string("apply_rotations: ") + name + " has the wrong size");
  }
  const double dev = (u.transpose() * u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(dev < 1e-8)) throw std::invalid_argument(std::string("apply_rotations: ") + name + " is not orthogonal");
}

// Uniform double in [lo, hi) from the top 53 bits; independent of the
// standard library's distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

std::string to_string(Orthogonalization o) { return o == Orthogonalization::Exponential ? "exp" : "cayley"; }

Orthogonalization orthogonalization_from_string(const std::string& s) {
  if (s == "exp" || s == "exponential") return Orthogonalization::Exponential;
  if (s == "cayley") return Orthogonalization::Cayley;
  throw std::invalid_argument("unknown orthogonal parameterization '" + s + "'");
}

std::string to_string(SearchObjective o) {
  switch (o) {
    case SearchObjective::GradNorm: return "grad-norm";
    case SearchObjective::FirstEpochError: return "first-epoch";
    case SearchObjective::FullTrainingError: return "full-training";
  }
  return "?";
}

SearchObjective objective_from_string(const std::string& s) {
  if (s == "grad-norm") return SearchObjective::GradNorm;
  if (s == "first-epoch") return SearchObjective::FirstEpochError;
  if (s == "full-training") return SearchObjective::FullTrainingError;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

void InitConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("init config: alpha must be positive");
  if (!(linearity_bound > 0.0 && linearity_bound <= 0.5)) {
    throw std::invalid_argument("init config: linearity_bound must lie in (0, 0.5]");
  }
}

RotationParams RotationParams::zeros(int width) {
  if (width < 1) throw std::invalid_argument("rotation params: width must be >= 1");
  const int d = skew_dimension(width);
  return {width, Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
}

Eigen::VectorXd RotationParams::packed() const {
  Eigen::VectorXd v(coeffs_1.size() + coeffs_2.size());
  v << coeffs_1, coeffs_2;
  return v;
}

RotationParams RotationParams::unpack(int width, const Eigen::VectorXd& v) {
  const int d = skew_dimension(width);
  if (v.size() != 2 * d) throw std::invalid_argument("rotation params: expected 2 * N(N-1)/2 values");
  return {width, v.head(d), v.tail(d)};
}

std::string to_csv_line(const RotationParams& params) {
  const Eigen::VectorXd v = params.packed();
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  return os.str();
}

double choose_alpha(const Dataset& train, double linearity_bound) {
  if (train.empty()) throw std::invalid_argument("choose_alpha: empty dataset");
  if (!(linearity_bound > 0.0)) throw std::invalid_argument("choose_alpha: bound must be positive");
  const double max_abs = train.inputs.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) throw std::invalid_argument("choose_alpha: all-zero inputs give no scale");
  return linearity_bound / max_abs;
}

Mlp lpc_simple_init(const ARModel& model, const InitConfig& cfg) {
  cfg.validate();
  const int p = model.order();
  if (p < 1) throw std::invalid_argument("lpc_simple_init: empty model");
  const double a = cfg.alpha;

  Layer l1{a * Eigen::MatrixXd::Identity(p, p), Eigen::VectorXd::Zero(p), Activation::Tanh};

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (int j = 0; j < p; ++j) m(0, j) = model.coefficients[static_cast<std::size_t>(p - 1 - j)];
  Layer l2{a * m, Eigen::VectorXd::Zero(p), Activation::Tanh};

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(1, p);
  out(0, 0) = 1.0 / (a * a);
  Layer l3{out, Eigen::VectorXd::Zero(1), Activation::Identity};

  return Mlp({std::move(l1), std::move(l2), std::move(l3)});
}

Eigen::MatrixXd skew_basis(int k, int m, int n) {
  if (k < 1 || m > n || k >= m) throw std::invalid_argument("skew_basis: need 1 <= k < m <= n");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  g(k - 1, m - 1) = 1.0;
  g(m - 1, k - 1) = -1.0;
  return g;
}

Eigen::MatrixXd build_skew(const Eigen::VectorXd& coeffs, int n) {
  if (n < 1 || coeffs.size() != skew_dimension(n)) throw std::invalid_argument("build_skew: expected N(N-1)/2 coefficients");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index t = 0;
  for (int k = 0; k < n; ++k) {
    for (int m = k + 1; m < n; ++m) {
      g(k, m) += coeffs(t);
      g(m, k) -= coeffs(t);
      ++t;
    }
  }
  return g;
}

Eigen::MatrixXd orthogonal_exp(const Eigen::MatrixXd& g) {
  require_skew(g, "orthogonal_exp");
  const Eigen::Index n = g.rows();
  const double norm = g.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Eigen::MatrixXd a = g / std::ldexp(1.0, squarings);

  // |a| <= 1/4, so 18 Taylor terms are far below double precision.
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Eigen::MatrixXd orthogonal_cayley(const Eigen::MatrixXd& g) {
  require_skew(g, "orthogonal_cayley");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(g.rows(), g.cols());
  // (I + G) is invertible for real skew G: its eigenvalues are 1 + i*t.
  return (id - g) * (id + g).partialPivLu().inverse();
}

Eigen::MatrixXd orthogonal_from_coeffs(const Eigen::VectorXd& coeffs, int n, Orthogonalization kind) {
  const Eigen::MatrixXd g = build_skew(coeffs, n);
  return kind == Orthogonalization::Exponential ? orthogonal_exp(g) : orthogonal_cayley(g);
}

Mlp apply_rotations(const Mlp& net, const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2) {
  if (net.depth() != 3) throw std::invalid_argument("apply_rotations: expected a three-layer network");
  const Layer& l1 = net.layer(0);
  const Layer& l2 = net.layer(1);
  const Layer& l3 = net.layer(2);
  require_orthogonal(u1, l1.out_dim(), "U1");
  require_orthogonal(u2, l2.out_dim(), "U2");

  Layer r1{u1 * l1.weights, u1 * l1.biases, l1.activation};
  Layer r2{u2 * l2.weights * u1.transpose(), u2 * l2.biases, l2.activation};
  Layer r3{l3.weights * u2.transpose(), l3.biases, l3.activation};
  return Mlp({std::move(r1), std::move(r2), std::move(r3)});
}

Mlp apply_rotations(const Mlp& net, const RotationParams& params, Orthogonalization kind) {
  return apply_rotations(net, orthogonal_from_coeffs(params.coeffs_1, params.width, kind),
                         orthogonal_from_coeffs(params.coeffs_2, params.width, kind));
}

double rotation_objective(const Mlp& base, const Dataset& data, const RotationParams& params,
                          const ImprovedInitOptions& opts) {
  const Mlp net = apply_rotations(base, params, opts.parameterization);
  switch (opts.objective) {
    case SearchObjective::GradNorm:
      return sse_gradient(net, data).norm();
    case SearchObjective::FirstEpochError: {
      TrainConfig one = opts.train;
      one.max_epochs = 1;
      return train(net, data, one).trace.final_sse;
    }
    case SearchObjective::FullTrainingError:
      return train(net, data, opts.train).trace.final_sse;
  }
  throw std::invalid_argument("rotation_objective: unknown objective");
}

ImprovedInitResult improved_init(const Mlp& base, const Dataset& train, const ImprovedInitOptions& opts) {
  if (opts.iters < 0) throw std::invalid_argument("improved_init: iters must be >= 0");
  if (!(opts.step > 0.0) || !(opts.fd_step > 0.0)) throw std::invalid_argument("improved_init: steps must be positive");
  if (base.depth() != 3 || base.layer(0).out_dim() != base.layer(1).out_dim()) {
    throw std::invalid_argument("improved_init: expected a three-layer network with equal hidden widths");
  }
  const int n = static_cast<int>(base.layer(0).out_dim());
  ImprovedInitResult result{base, RotationParams::zeros(n), {}};
  if (opts.iters == 0) return result;

  // Ascent on the gradient norm, descent on the error objectives.
  const double sign = opts.objective == SearchObjective::GradNorm ? 1.0 : -1.0;
  auto objective = [&](const Eigen::VectorXd& c) {
    const double f = rotation_objective(base, train, RotationParams::unpack(n, c), opts);
    if (!std::isfinite(f)) throw NumericError("improved_init: non-finite objective (step size too large?)");
    return f;
  };

  Eigen::VectorXd c = result.params.packed();
  double value = objective(c);
  result.trace.push_back(value);
  for (int it = 0; it < opts.iters; ++it) {
    Eigen::VectorXd grad(c.size());
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      Eigen::VectorXd plus = c;
      Eigen::VectorXd minus = c;
      plus(j) += opts.fd_step;
      minus(j) -= opts.fd_step;
      grad(j) = (objective(plus) - objective(minus)) / (2.0 * opts.fd_step);
    }
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0)) break;
    // Unit direction: the step is a distance in coefficient space.
    const Eigen::VectorXd dir = sign * grad / gnorm;

    bool moved = false;
    double step = opts.step;
    for (int h = 0; h <= opts.max_halvings && !moved; ++h, step /= 2.0) {
      const Eigen::VectorXd trial = c + step * dir;
      const double f = rotation_objective(base, train, RotationParams::unpack(n, trial), opts);
      if (std::isfinite(f) && sign * f > sign * value) {
        c = trial;
        value = f;
        moved = true;
      }
    }
    if (!moved) break;
    result.trace.push_back(value);
  }
  result.params = RotationParams::unpack(n, c);
  result.net = apply_rotations(base, result.params, opts.parameterization);
  return result;
}

Mlp nguyen_widrow_init(int in_dim, std::span<const int> hidden, std::uint64_t seed) {
  if (in_dim < 1 || hidden.empty()) throw std::invalid_argument("nguyen_widrow_init: invalid architecture");
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  int fan_in = in_dim;
  for (int width : hidden) {
    if (width < 1) throw std::invalid_argument("nguyen_widrow_init: hidden widths must be >= 1");
    const double beta = 0.7 * std::pow(static_cast<double>(width), 1.0 / fan_in);
    Layer l{Eigen::MatrixXd(width, fan_in), Eigen::VectorXd(width), Activation::Tanh};
    for (int j = 0; j < width; ++j) {
      for (int k = 0; k < fan_in; ++k) l.weights(j, k) = uniform(rng, -0.5, 0.5);
      l.weights.row(j) *= beta / l.weights.row(j).norm();
      l.biases(j) = uniform(rng, -beta, beta);
    }
    layers.push_back(std::move(l));
    fan_in = width;
  }
  Layer out{Eigen::MatrixXd(1, fan_in), Eigen::VectorXd(1), Activation::Identity};
  for (int k = 0; k < fan_in; ++k) out.weights(0, k) = uniform(rng, -0.5, 0.5);
  out.biases(0) = uniform(rng, -0.5, 0.5);
  layers.push_back(std::move(out));
  return Mlp(std::move(layers));
}

Mlp rescale_io(const Mlp& net, double input_scale, double output_scale) {
  if (!(input_scale > 0.0) || !(output_scale > 0.0)) throw std::invalid_argument("rescale_io: scales must be positive");
  std::vector<Layer> layers = net.layers();
  layers.front().weights /= input_scale;
  layers.back().weights *= output_scale;
  layers.back().biases *= output_scale;
  return Mlp(std::move(layers));
}

}  // namespace lpinit
