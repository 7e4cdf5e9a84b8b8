#ifndef PARTEST_HHG_H_
#define PARTEST_HHG_H_

#include <span>

#include "partest/ranking.h"

namespace partest {

// Univariate HHG statistic: the sum over ordered pairs (i, j), i != j, of the
// Pearson statistic of the 2x2 table that classifies the other N - 2 points
// k by |x_k - x_i| < |x_j - x_i| and |y_k - y_i| < |y_j - y_i|. Tables with
// an empty margin contribute 0. O(N^2) time and memory.
// Throws std::invalid_argument for N < 3, unequal lengths or NaN.
double hhg_univariate(std::span<const double> x, std::span<const double> y);

// Same statistic on ranks (distribution-free variant).
double hhg_univariate(const RankedSample& x, const RankedSample& y);

// Pearson statistic of a 2x2 table with n = a + b + c + d; 0 when any
// margin is empty.
double pearson_2x2(double a, double b, double c, double d);

}  // namespace partest

#endif  // PARTEST_HHG_H_
