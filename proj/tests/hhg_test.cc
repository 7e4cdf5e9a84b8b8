#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "partest/hhg.h"
#include "partest/oracle.h"
#include "partest/rng.h"

namespace partest {
namespace {

TEST(Pearson2x2, Values) {
  EXPECT_DOUBLE_EQ(pearson_2x2(5, 0, 0, 5), 10.0);
  EXPECT_DOUBLE_EQ(pearson_2x2(1, 1, 1, 1), 0.0);
  EXPECT_DOUBLE_EQ(pearson_2x2(3, 2, 0, 0), 0.0);
  // n (ad - bc)^2 / (r1 r2 c1 c2) = 10 * 100 / (5 * 5 * 4 * 6)
  EXPECT_NEAR(pearson_2x2(4, 1, 0, 5), 4000.0 / 600.0, 1e-12);
}

TEST(Hhg, ThreePoints) {
  const std::vector<double> x = {0.0, 1.0, 3.0};
  const std::vector<double> y = {2.0, 0.5, 1.0};
  EXPECT_NEAR(hhg_univariate(x, y), oracle::hhg(x, y), 1e-12);
}

TEST(Hhg, MatchesOracleOnRandomData) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(48));
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = trial % 2 ? x[i] * x[i] + 0.3 * rng.normal() : rng.normal();
    }
    const double ref = oracle::hhg(x, y);
    EXPECT_NEAR(hhg_univariate(x, y), ref, 1e-9 * std::max(1.0, ref));
  }
}

TEST(Hhg, MatchesOracleWithTies) {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(40));
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(5));
      y[i] = trial % 3 == 0 ? static_cast<double>(rng.below(3)) : rng.uniform();
    }
    const double ref = oracle::hhg(x, y);
    EXPECT_NEAR(hhg_univariate(x, y), ref, 1e-9 * std::max(1.0, ref));
  }
}

TEST(Hhg, EquidistantNeighboursOnBothSides) {
  const std::vector<double> x = {0, 1, 2, 3, 4, 2, 1};
  const std::vector<double> y = {1, 0, 2, 2, 5, 3, 3};
  EXPECT_NEAR(hhg_univariate(x, y), oracle::hhg(x, y), 1e-12);
}

TEST(Hhg, RanksAndSymmetry) {
  Rng rng(53);
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = rng.uniform();
    y[i] = std::sin(6 * x[i]) + 0.2 * rng.normal();
  }
  const auto rx = rank_with_random_ties(x, 0);
  const auto ry = rank_with_random_ties(y, 0);
  const std::vector<double> dx(rx.ranks.begin(), rx.ranks.end());
  const std::vector<double> dy(ry.ranks.begin(), ry.ranks.end());
  EXPECT_NEAR(hhg_univariate(rx, ry), oracle::hhg(dx, dy), 1e-9);
  EXPECT_NEAR(hhg_univariate(x, y), hhg_univariate(y, x), 1e-9);
}

TEST(Hhg, IndependentDataScoresLowerThanDependent) {
  Rng rng(54);
  std::vector<double> x(60), y(60), z(60);
  for (int i = 0; i < 60; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] + 0.1 * rng.normal();
    z[i] = rng.normal();
  }
  EXPECT_GT(hhg_univariate(x, y), hhg_univariate(x, z));
}

TEST(Hhg, Errors) {
  const std::vector<double> two = {1, 2};
  EXPECT_THROW(hhg_univariate(two, two), std::invalid_argument);
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(hhg_univariate(three, two), std::invalid_argument);
  const std::vector<double> with_nan = {1, NAN, 3};
  EXPECT_THROW(hhg_univariate(with_nan, three), std::invalid_argument);
}

}  // namespace
}  // namespace partest
