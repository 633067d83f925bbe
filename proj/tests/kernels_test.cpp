#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chemtok/kernels.hpp"

using namespace chemtok;

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 3);
  Eigen::MatrixXd logits(5, 7);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = g(rng);
  const Eigen::MatrixXd a = softmax_rows(logits);
  for (Eigen::Index i = 0; i < a.rows(); ++i) EXPECT_NEAR(a.row(i).sum(), 1.0, 1e-12);
  EXPECT_GE(a.minCoeff(), 0.0);
}

TEST(Softmax, MatchesDirectExponentials) {
  Eigen::MatrixXd logits(3, 3);
  logits << 0.1, -0.4, 2.0, 1.0, 1.0, 1.0, -3.0, 0.5, 0.0;
  const Eigen::MatrixXd a = softmax_rows(logits);
  for (int i = 0; i < 3; ++i) {
    double z = 0;
    for (int j = 0; j < 3; ++j) z += std::exp(logits(i, j));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a(i, j), std::exp(logits(i, j)) / z, 1e-15);
  }
}

// A key with log-size bias log(2) attracts the same mass as two copies of it.
TEST(Softmax, LogSizeBiasEqualsDuplicatedKey) {
  Eigen::MatrixXd logits(2, 3);
  logits << 0.3, -1.2, 0.7, 2.0, 0.1, -0.5;
  Eigen::VectorXd bias(3);
  bias << 0.0, std::log(2.0), 0.0;
  const Eigen::MatrixXd biased = softmax_rows(logits, bias);

  Eigen::MatrixXd dup(2, 4);
  dup << logits, logits.col(1);
  const Eigen::MatrixXd plain = softmax_rows(dup);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(biased(i, 0), plain(i, 0), 1e-15);
    EXPECT_NEAR(biased(i, 1), plain(i, 1) + plain(i, 3), 1e-15);
    EXPECT_NEAR(biased(i, 2), plain(i, 2), 1e-15);
  }
}

TEST(Softmax, StableForLargeLogits) {
  Eigen::MatrixXd logits(1, 2);
  logits << 1000.0, 999.0;
  const Eigen::MatrixXd a = softmax_rows(logits);
  EXPECT_TRUE(a.allFinite());
  EXPECT_NEAR(a(0, 0), 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(LayerNorm, ZeroMeanUnitVariance) {
  Eigen::MatrixXd x(2, 4);
  x << 1, 2, 3, 4, -5, 0, 5, 10;
  const Eigen::MatrixXd y = layer_norm_rows(x, 0.0);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(y.row(i).mean(), 0.0, 1e-12);
    EXPECT_NEAR(y.row(i).array().square().mean(), 1.0, 1e-12);
  }
}

TEST(Gelu, KnownValues) {
  Eigen::MatrixXd x(1, 3);
  x << 0.0, 1.0, -1.0;
  const Eigen::MatrixXd y = gelu(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 0.0);
  EXPECT_NEAR(y(0, 1), 0.841192, 1e-6);
  EXPECT_NEAR(y(0, 2), -0.158808, 1e-6);
}

TEST(Cosine, ParallelOrthogonalAndZero) {
  Eigen::MatrixXd a(3, 2);
  a << 2, 0, 0, 3, 0, 0;
  const Eigen::MatrixXd c = cosine_similarity(a, a);
  EXPECT_NEAR(c(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(c(0, 1), 0.0, 1e-15);
  EXPECT_EQ(c(2, 2), 0.0);
}

TEST(Variance, PopulationFormula) {
  Eigen::VectorXd v(3);
  v << 0.9, 0.05, 0.05;
  const double mean = (0.9 + 0.05 + 0.05) / 3;
  const double expected =
      ((0.9 - mean) * (0.9 - mean) + 2 * (0.05 - mean) * (0.05 - mean)) / 3;
  EXPECT_NEAR(population_variance(v), expected, 1e-15);
  EXPECT_NEAR(population_variance(v), 0.1605, 1e-4);
  EXPECT_EQ(population_variance(Eigen::VectorXd::Constant(4, 0.25)), 0.0);
}
