#include "partest/mi.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "partest/independence.h"
#include "partest/ksample.h"

namespace partest {

std::string_view to_string(MIEstimator estimator) {
  switch (estimator) {
    case MIEstimator::kAdp: return "adp";
    case MIEstimator::kDdp: return "ddp";
    case MIEstimator::kHistogram: return "histogram";
    case MIEstimator::kKSample: return "ksample";
  }
  return "?";
}

double miller_madow(double plugin_mi, double nonempty_joint, double nonempty_x,
                    double nonempty_y, int n) {
  const double scale = 2.0 * n;
  return plugin_mi - (nonempty_joint - 1.0) / scale + (nonempty_x - 1.0) / scale +
         (nonempty_y - 1.0) / scale;
}

namespace {

int checked_size(const RankedSample& x, const RankedSample& y, int m) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  const int n = x.size();
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  return n;
}

}  // namespace

MIEstimate mi_adp(const RankedSample& x, const RankedSample& y, int m, bool correct,
                  int threads) {
  const int n = checked_size(x, y, m);
  IndependenceEngine engine(n, ScoreKind::kLikelihoodRatio, m, threads);
  engine.sweep_adp(y_by_x_rank(x, y));
  const double partitions = engine.binomials()(n - 1, m - 1);
  double value = engine.adp_statistic(m) / (n * partitions * partitions);
  if (correct) {
    // Every ADP strip holds at least one rank, so both margins have m cells.
    const double joint = engine.adp_nonempty_cells(m) / (partitions * partitions);
    value = miller_madow(value, joint, m, m, n);
  }
  return {value, MIEstimator::kAdp, m, n, correct};
}

MIEstimate mi_ddp(const RankedSample& x, const RankedSample& y, int m, bool correct,
                  int threads) {
  const int n = checked_size(x, y, m);
  IndependenceEngine engine(n, ScoreKind::kLikelihoodRatio, m, threads);
  engine.sweep_ddp(y_by_x_rank(x, y));
  const double partitions = engine.binomials()(n, m - 1);
  const int inside = n - m + 1;
  double value = engine.ddp_statistic(m) / (inside * partitions);
  if (correct) {
    const double joint = engine.ddp_nonempty_cells(m) / partitions;
    const double strips = engine.ddp_nonempty_strips(m) / partitions;
    value = miller_madow(value, joint, strips, strips, inside);
  }
  return {value, MIEstimator::kDdp, m, n, correct};
}

MIEstimate mi_histogram(const RankedSample& x, const RankedSample& y, int m, bool correct) {
  const int n = checked_size(x, y, m);
  std::vector<double> joint(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> rows(m, 0.0), cols(m, 0.0);
  for (int i = 0; i < n; ++i) {
    const int bx = static_cast<int>(static_cast<long>(x.ranks[i] - 1) * m / n);
    const int by = static_cast<int>(static_cast<long>(y.ranks[i] - 1) * m / n);
    joint[bx * m + by] += 1.0;
    rows[bx] += 1.0;
    cols[by] += 1.0;
  }
  double value = 0.0;
  int nonempty = 0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const double o = joint[a * m + b];
      if (o == 0.0) continue;
      ++nonempty;
      value += o / n * std::log(o * n / (rows[a] * cols[b]));
    }
  }
  if (correct) {
    int nonempty_rows = 0, nonempty_cols = 0;
    for (int a = 0; a < m; ++a) {
      nonempty_rows += rows[a] > 0;
      nonempty_cols += cols[a] > 0;
    }
    value = miller_madow(value, nonempty, nonempty_rows, nonempty_cols, n);
  }
  return {value, MIEstimator::kHistogram, m, n, correct};
}

MIEstimate mi_ksample(const GroupedSample& sample, int m) {
  const int n = sample.size();
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  KSampleEngine engine(sample.group_sizes, ScoreKind::kLikelihoodRatio, m);
  const std::vector<double> sums = engine.sum_all_m(sample.labels_by_rank());
  const double value = sums[m - 2] / (n * engine.binomials()(n - 1, m - 1));
  return {value, MIEstimator::kKSample, m, n, false};
}

}  // namespace partest
