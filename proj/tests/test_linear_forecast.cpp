#include <vector>

#include <gtest/gtest.h>

#include "lpinit/errors.hpp"
#include "lpinit/linear_forecast.hpp"

using namespace lpinit;

namespace {

TimeSeries ar2_series(std::size_t n) {
  TimeSeries ts;
  ts.values = {1.0, 1.0};
  while (ts.values.size() < n) {
    const std::size_t k = ts.values.size();
    ts.values.push_back(1.5 * ts.values[k - 1] - 0.9 * ts.values[k - 2]);
  }
  return ts;
}

// Hand elimination of the 2x2 normal equations for x_n ~ a1 x_{n-1} + a2 x_{n-2}.
std::pair<double, double> ar2_normal_equations(const TimeSeries& ts) {
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t n = 2; n < ts.size(); ++n) {
    const double x1 = ts.values[n - 1], x2 = ts.values[n - 2], y = ts.values[n];
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    r1 += x1 * y;
    r2 += x2 * y;
  }
  const double det = s11 * s22 - s12 * s12;
  return {(r1 * s22 - s12 * r2) / det, (s11 * r2 - s12 * r1) / det};
}

}  // namespace

TEST(FitLpc, RecoversAr2) {
  const TimeSeries ts = ar2_series(500);
  const ARModel m = fit_lpc(make_dataset(ts, 2, 1));
  const auto [o1, o2] = ar2_normal_equations(ts);
  ASSERT_EQ(m.order(), 2);
  EXPECT_NEAR(m.coefficients[0], o1, 1e-6);
  EXPECT_NEAR(m.coefficients[1], o2, 1e-6);
  EXPECT_NEAR(m.coefficients[0], 1.5, 1e-6);
  EXPECT_NEAR(m.coefficients[1], -0.9, 1e-6);
  EXPECT_FALSE(m.ridge_regularized);
}

TEST(FitLpc, ConstantSeriesIsPersistence) {
  TimeSeries ts;
  ts.values.assign(20, 3.5);
  const ARModel m = fit_lpc(make_dataset(ts, 1, 1));
  EXPECT_NEAR(m.coefficients[0], 1.0, 1e-12);
}

TEST(FitLpc, RankDeficientGetsRidge) {
  TimeSeries ts;
  ts.values.assign(20, 3.5);
  const ARModel m = fit_lpc(make_dataset(ts, 3, 1));
  EXPECT_TRUE(m.ridge_regularized);
  double sum = 0.0;
  for (double a : m.coefficients) sum += a;
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(FitLpc, ZeroTargetsGiveZeroCoefficients) {
  Dataset d;
  d.p = 2;
  d.inputs.resize(4, 2);
  d.inputs << 1, 2, 3, -1, 0.5, 4, 2, 2;
  d.targets = Eigen::VectorXd::Zero(4);
  const ARModel m = fit_lpc(d);
  EXPECT_NEAR(m.coefficients[0], 0.0, 1e-14);
  EXPECT_NEAR(m.coefficients[1], 0.0, 1e-14);
}

TEST(FitLpc, TooFewRows) {
  Dataset d;
  d.p = 3;
  d.inputs = Eigen::MatrixXd::Ones(2, 3);
  d.targets = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(fit_lpc(d), InsufficientData);
}

TEST(ArPredict, PersistenceReturnsNewest) {
  const ARModel m{{1, 0, 0, 0, 0}};
  const std::vector<double> w{5, 4, 3, 2, 9};
  EXPECT_EQ(ar_predict(m, w), 9.0);
}

TEST(ArPredict, DotProductOrder) {
  const ARModel m{{0.5, 0.3}};
  const std::vector<double> w{2, 4};
  EXPECT_DOUBLE_EQ(ar_predict(m, w), 2.6);
}

TEST(ArPredict, ZeroModel) {
  const ARModel m{{0, 0, 0}};
  const std::vector<double> w{1e3, -7, 2};
  EXPECT_EQ(ar_predict(m, w), 0.0);
  EXPECT_THROW(ar_predict(m, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(ArPredict, BatchMatchesSingle) {
  const TimeSeries ts = ar2_series(30);
  const Dataset d = make_dataset(ts, 2, 1);
  const ARModel m{{1.2, -0.4}};
  const Eigen::VectorXd batch = ar_predict_batch(m, d);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const std::vector<double> w{d.inputs(i, 0), d.inputs(i, 1)};
    EXPECT_EQ(batch(i), ar_predict(m, w));
  }
}

TEST(Rmse, Examples) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{1, 1}, std::vector<double>{0, 2}), 1.0);
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{3}, std::vector<double>{0}), 3.0);
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(ArModelCsv, RoundTrip) {
  const ARModel m{{1.0 / 3.0, -2.5e-7, 105.25}};
  const ARModel back = ar_model_from_csv(to_csv_line(m));
  EXPECT_EQ(back.coefficients, m.coefficients);
}
