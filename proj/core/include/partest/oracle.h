#ifndef PARTEST_ORACLE_H_
#define PARTEST_ORACLE_H_

#include <span>
#include <vector>

#include "partest/ranking.h"
#include "partest/scores.h"

// Brute-force definitional implementations, for testing only.
namespace partest::oracle {

inline constexpr double kPartitionBudget = 1e6;

struct Aggregate {
  double sum = 0.0;
  double max = 0.0;
  long partitions = 0;
};

// Plug-in MI averaged over partitions, with and without Miller-Madow.
struct MeanMI {
  double plugin = 0.0;
  double corrected = 0.0;
  double mean_nonempty_cells = 0.0;
  long partitions = 0;
};

// Every increasing (size)-subset of {lo..hi}, in lexicographic order.
std::vector<std::vector<int>> subsets(int lo, int hi, int size);

// All C(N-1, m-1) partitions of the y-ranks into m intervals.
// Throws std::invalid_argument when the count exceeds the budget.
Aggregate ksample(const GroupedSample& sample, ScoreKind score, int m);

// All C(N-1, m-1)^2 rank-grid partitions, e = w l / N.
Aggregate adp(const RankedSample& x, const RankedSample& y, ScoreKind score, int m);

// All C(N, m-1) point subsets; each chosen point cuts both axes, cells count
// the points strictly inside, e = W L / (N - m + 1).
Aggregate ddp(const RankedSample& x, const RankedSample& y, ScoreKind score, int m);

// Entropy form H_U + H_V - H_UV of each partition's table.
MeanMI adp_mi(const RankedSample& x, const RankedSample& y, int m);
MeanMI ddp_mi(const RankedSample& x, const RankedSample& y, int m);

// O(N^3) per-pair classification. Requires N in [3, 200].
double hhg(std::span<const double> x, std::span<const double> y);

}  // namespace partest::oracle

#endif  // PARTEST_ORACLE_H_
