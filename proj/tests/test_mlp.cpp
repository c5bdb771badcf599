#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lpinit/mlp.hpp"
#include "test_util.hpp"

using namespace lpinit;
using lpinit::testing::uniform_matrix;
using lpinit::testing::uniform_vector;

namespace {

Mlp random_net(std::mt19937_64& rng, int in, int hidden, double scale = 1.0) {
  return Mlp({{uniform_matrix(rng, hidden, in, -scale, scale), uniform_vector(rng, hidden, -scale, scale),
               Activation::Tanh},
              {uniform_matrix(rng, hidden, hidden, -scale, scale), uniform_vector(rng, hidden, -scale, scale),
               Activation::Tanh},
              {uniform_matrix(rng, 1, hidden, -scale, scale), uniform_vector(rng, 1, -scale, scale),
               Activation::Identity}});
}

Dataset sample_data(std::mt19937_64& rng, int rows, int p) {
  Dataset d;
  d.p = p;
  d.inputs = uniform_matrix(rng, rows, p, -1, 1);
  d.targets = uniform_vector(rng, rows, -1, 1);
  return d;
}

Mlp single(double w, double b, Activation a) {
  return Mlp({{Eigen::MatrixXd::Constant(1, 1, w), Eigen::VectorXd::Constant(1, b), a}});
}

}  // namespace

TEST(Mlp, RejectsMismatchedLayers) {
  EXPECT_THROW(Mlp({{Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(2), Activation::Tanh},
                    {Eigen::MatrixXd::Zero(1, 3), Eigen::VectorXd::Zero(1), Activation::Identity}}),
               std::invalid_argument);
  EXPECT_THROW(Mlp({{Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(3), Activation::Tanh}}),
               std::invalid_argument);
  EXPECT_THROW(single(NAN, 0.0, Activation::Tanh), std::invalid_argument);
}

TEST(Forward, ZeroNetGivesZero) {
  const Mlp net({{Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Zero(4), Activation::Tanh},
                 {Eigen::MatrixXd::Zero(1, 4), Eigen::VectorXd::Zero(1), Activation::Identity}});
  EXPECT_EQ(forward(net, Eigen::VectorXd(Eigen::Vector3d(1, -2, 5))), 0.0);
}

TEST(Forward, AffineAndTanh) {
  EXPECT_EQ(forward(single(2, 1, Activation::Identity), Eigen::VectorXd::Constant(1, 3)), 7.0);
  EXPECT_NEAR(forward(single(1, 0, Activation::Tanh), Eigen::VectorXd::Constant(1, 0.5)), 0.46211715726, 1e-11);
}

TEST(Forward, RejectsWrongInputLength) {
  EXPECT_THROW(forward(single(1, 0, Activation::Tanh), Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(ForwardBatch, MatchesSingleCalls) {
  std::mt19937_64 rng(7);
  const Mlp net = random_net(rng, 5, 5);
  EXPECT_EQ(forward_batch(net, Eigen::MatrixXd(0, 5)).size(), 0);

  Eigen::MatrixXd same(3, 5);
  same.rowwise() = uniform_vector(rng, 5, -1, 1).transpose();
  const Eigen::VectorXd out_same = forward_batch(net, same);
  EXPECT_EQ(out_same(0), out_same(1));
  EXPECT_EQ(out_same(1), out_same(2));

  const Eigen::MatrixXd two = uniform_matrix(rng, 2, 5, -1, 1);
  const Eigen::VectorXd out = forward_batch(net, two);
  EXPECT_EQ(out(0), forward(net, Eigen::VectorXd(two.row(0).transpose())));
  EXPECT_EQ(out(1), forward(net, Eigen::VectorXd(two.row(1).transpose())));
}

TEST(ResidualJacobian, SingleTanhNeuronClosedForm) {
  Dataset d;
  d.p = 1;
  d.inputs = Eigen::MatrixXd::Constant(1, 1, 2.0);
  d.targets = Eigen::VectorXd::Zero(1);
  const ResidualJacobian rj = residual_jacobian(single(0.3, 0.0, Activation::Tanh), d);
  const double t = std::tanh(0.6);
  EXPECT_NEAR(rj.residuals(0), t, 1e-15);
  EXPECT_NEAR(rj.jacobian(0, 0), (1 - t * t) * 2.0, 1e-15);
  EXPECT_NEAR(rj.jacobian(0, 1), 1 - t * t, 1e-15);
}

TEST(ResidualJacobian, LinearModelIsTheRegressorMatrix) {
  std::mt19937_64 rng(3);
  const Dataset d = sample_data(rng, 8, 3);
  const Mlp net({{uniform_matrix(rng, 1, 3, -1, 1), uniform_vector(rng, 1, -1, 1), Activation::Identity}});
  const ResidualJacobian rj = residual_jacobian(net, d);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (int k = 0; k < 3; ++k) EXPECT_EQ(rj.jacobian(i, k), d.inputs(i, k));
    EXPECT_EQ(rj.jacobian(i, 3), 1.0);
  }
}

TEST(ResidualJacobian, MatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Mlp net = random_net(rng, 5, 5);
    const Dataset d = sample_data(rng, 20, 5);
    const ResidualJacobian rj = residual_jacobian(net, d);
    const Eigen::VectorXd theta = flatten(net);
    const double h = 1e-6;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp(j) += h;
      tm(j) -= h;
      const Eigen::VectorXd fd = (residuals(unflatten(net, tp), d) - residuals(unflatten(net, tm), d)) / (2 * h);
      for (Eigen::Index i = 0; i < d.rows(); ++i) {
        EXPECT_NEAR(rj.jacobian(i, j), fd(i), 1e-5 * std::max(1.0, std::abs(fd(i))));
      }
    }
  }
}

TEST(SseGradient, EqualsTwoJtr) {
  std::mt19937_64 rng(5);
  const Mlp net = random_net(rng, 4, 6);
  const Dataset d = sample_data(rng, 30, 4);
  const ResidualJacobian rj = residual_jacobian(net, d);
  const Eigen::VectorXd expected = 2.0 * rj.jacobian.transpose() * rj.residuals;
  EXPECT_LT((sse_gradient(net, d) - expected).cwiseAbs().maxCoeff(), 1e-12 * (1 + expected.norm()));
  EXPECT_NEAR(sse(net, d), rj.residuals.squaredNorm(), 1e-12);
}

TEST(Flatten, CountAndRoundTrip) {
  std::mt19937_64 rng(1);
  const Mlp net = random_net(rng, 5, 5);
  const Eigen::VectorXd theta = flatten(net);
  EXPECT_EQ(theta.size(), 66);
  EXPECT_EQ(net.param_count(), 66);
  const Mlp back = unflatten(net, theta);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    EXPECT_EQ(back.layer(l).weights, net.layer(l).weights);
    EXPECT_EQ(back.layer(l).biases, net.layer(l).biases);
  }
  EXPECT_EQ(flatten(back), theta);
}

TEST(Flatten, LayoutIsRowMajorThenBias) {
  Eigen::MatrixXd w(2, 2);
  w << 1, 2, 3, 4;
  const Mlp net({{w, Eigen::Vector2d(5, 6), Activation::Tanh}});
  const Eigen::VectorXd theta = flatten(net);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(theta(k), k + 1);
}

TEST(Unflatten, ZeroVectorAndBadLength) {
  std::mt19937_64 rng(2);
  const Mlp net = random_net(rng, 5, 5);
  const Mlp zero = unflatten(net, Eigen::VectorXd::Zero(66));
  for (const auto& layer : zero.layers()) {
    EXPECT_TRUE(layer.weights.isZero(0));
    EXPECT_TRUE(layer.biases.isZero(0));
  }
  EXPECT_THROW(unflatten(net, Eigen::VectorXd::Zero(65)), std::invalid_argument);
}

TEST(MlpJson, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  const Mlp net = random_net(rng, 3, 4);
  const Mlp back = mlp_from_json(nlohmann::json::parse(to_json(net).dump()));
  EXPECT_EQ(flatten(back), flatten(net));
  EXPECT_EQ(back.layer(2).activation, Activation::Identity);
}

TEST(MlpJson, RejectsUnknownActivation) {
  nlohmann::json j = to_json(single(1, 0, Activation::Tanh));
  j["layers"][0]["activation"] = "relu";
  EXPECT_THROW(mlp_from_json(j), std::invalid_argument);
}
