#ifndef PARTEST_INDEPENDENCE_H_
#define PARTEST_INDEPENDENCE_H_

#include <memory>
#include <span>
#include <vector>

#include "partest/binomial.h"
#include "partest/count_grid.h"
#include "partest/priors.h"
#include "partest/ranking.h"
#include "partest/scores.h"

namespace partest {

enum class IndependenceFamily { kAdpSum, kDdpSum, kDdpMax, kAdpMax };

// Per-m statistics for the test of independence. Sum families cover
// m in {2..m_max}; kDdpMax covers m in {2, 3, 4}; kAdpMax only m = 2.
struct IndependenceStatistics {
  IndependenceFamily family = IndependenceFamily::kAdpSum;
  ScoreKind score = ScoreKind::kLikelihoodRatio;
  int n = 0;
  std::vector<double> values;  // values[m - 2]

  int m_max() const { return static_cast<int>(values.size()) + 1; }
  double at(int m) const { return values.at(static_cast<std::size_t>(m - 2)); }
};

// y_by_x[r - 1] is the y-rank of the observation whose x-rank is r.
std::vector<int> y_by_x_rank(const RankedSample& x, const RankedSample& y);

// Workspace for the O(N^4) cell sweeps. A sweep aggregates every candidate
// cell into totals keyed by what its partition count depends on; any m can
// then be evaluated cheaply. Not thread-safe; `threads` parallelizes the
// sweep itself with a fixed-order combine, so results are bit-identical for
// every thread count.
class IndependenceEngine {
 public:
  IndependenceEngine(int n, ScoreKind score, int m_max, int threads = 1);
  ~IndependenceEngine();
  IndependenceEngine(IndependenceEngine&&) noexcept;
  IndependenceEngine& operator=(IndependenceEngine&&) noexcept;

  int n() const;
  int m_max() const;
  ScoreKind score() const;
  const BinomialTable& binomials() const;

  // All-derived partitions: cells [r_l, r_h] x [s_l, s_h] on the rank grid,
  // e_C = w l / N. A cell side is internal, or an edge side touching rank 1
  // or N; each axis contributes C(N-2-w, m-3) or C(N-1-w, m-2) partitions.
  void sweep_adp(std::span<const int> y_by_x);
  double adp_statistic(int m) const;
  // Sum over all ADP partitions of their number of nonempty cells.
  double adp_nonempty_cells(int m) const;
  std::vector<double> adp_sum_all_m(std::span<const int> y_by_x);

  // Data-derived partitions: cells bounded by lines through sample points
  // (or the outer frame), counts strictly inside, e_C = W L / (N - m + 1).
  // A valid cell fixed by k defining points and with OUT points in its four
  // outer quadrants lies in C(OUT, m - 1 - k) partitions.
  void sweep_ddp(std::span<const int> y_by_x);
  double ddp_statistic(int m) const;
  double ddp_nonempty_cells(int m) const;
  std::vector<double> ddp_sum_all_m(std::span<const int> y_by_x);

  // Sum over all DDP partitions of the number of nonempty x-strips (equal
  // to that of y-strips); depends on N and m only.
  double ddp_nonempty_strips(int m) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// Throw std::invalid_argument unless 2 <= m_max <= N and lengths agree.
IndependenceStatistics adp_sum_all_m(const RankedSample& x, const RankedSample& y,
                                     ScoreKind score, int m_max, int threads = 1);
IndependenceStatistics ddp_sum_all_m(const RankedSample& x, const RankedSample& y,
                                     ScoreKind score, int m_max, int threads = 1);

// Maximum of T^I over all DDP partitions of size m x m, by enumerating the
// C(N, m-1) point subsets. Throws std::invalid_argument("exponential regime")
// for m outside {2, 3, 4}.
double ddp_max(const RankedSample& x, const RankedSample& y, ScoreKind score, int m);

// DDP maxima for m = 2..min(4, N) packed as statistics.
IndependenceStatistics ddp_max_all_m(const RankedSample& x, const RankedSample& y,
                                     ScoreKind score, int m_max = 4);

// Maximum of T^I over the (N - 1)^2 ADP partitions of size 2 x 2.
double adp_max_2x2(const RankedSample& x, const RankedSample& y, ScoreKind score);

// max_m { S^ADP / C(N-1, m-1)^2 + log pi(m) }.
double penalized_adp_sum(const IndependenceStatistics& stats, const PriorSpec& prior,
                         const BinomialTable& binom);
double penalized_adp_sum(std::span<const double> sums, int n, const PriorSpec& prior,
                         const BinomialTable& binom);

// max_m { S^DDP / C(N, m-1) + log pi(m) }.
double penalized_ddp_sum(const IndependenceStatistics& stats, const PriorSpec& prior,
                         const BinomialTable& binom);
double penalized_ddp_sum(std::span<const double> sums, int n, const PriorSpec& prior,
                         const BinomialTable& binom);

}  // namespace partest

#endif  // PARTEST_INDEPENDENCE_H_
