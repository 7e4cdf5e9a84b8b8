#ifndef PARTEST_KSAMPLE_H_
#define PARTEST_KSAMPLE_H_

#include <span>
#include <vector>

#include "partest/binomial.h"
#include "partest/priors.h"
#include "partest/ranking.h"
#include "partest/scores.h"

namespace partest {

enum class Aggregation { kSum, kMax };

// S_m (sum over all m-cell partitions of the y-ranks) or M_m (maximum over
// them) for every m in {2..m_max}.
struct KSampleStatistics {
  Aggregation aggregation = Aggregation::kSum;
  ScoreKind score = ScoreKind::kLikelihoodRatio;
  int n = 0;
  std::vector<int> group_sizes;
  std::vector<double> values;  // values[m - 2]

  int m_max() const { return static_cast<int>(values.size()) + 1; }
  double at(int m) const { return values.at(static_cast<std::size_t>(m - 2)); }
};

// Reusable workspace for repeated evaluation at a fixed (N_1..N_K, score,
// m_max), e.g. across permutation replicates. Not thread-safe; use one per
// thread.
class KSampleEngine {
 public:
  KSampleEngine(std::vector<int> group_sizes, ScoreKind score, int m_max);

  int n() const { return n_; }
  int m_max() const { return m_max_; }
  const std::vector<int>& group_sizes() const { return group_sizes_; }
  const BinomialTable& binomials() const { return binom_; }

  // `ordered` holds the 0-based group of the observation at each y-rank.
  // Width totals T_i(w), T_e(w) in O(N^2 K), then
  //   S_m = sum_w C(N-2-w, m-3) T_i(w) + C(N-1-w, m-2) T_e(w).
  std::vector<double> sum_all_m(std::span<const int> ordered);

  // M(i, j) = max_a { M(a, j-1) + t(a+1..i) }, M(i, 1) = t(1..i);
  // M_m = M(N, m). O(N^2 m_max) after an O(N^2 K) cell-score table.
  std::vector<double> max_all_m(std::span<const int> ordered);

  // Score of the cell holding y-ranks [lo, hi] (1-based, inclusive), with
  // expected counts (hi - lo + 1) * N_g / N.
  double cell(int lo, int hi) const;

 private:
  void load(std::span<const int> ordered);

  std::vector<int> group_sizes_;
  ScoreKind score_;
  int n_;
  int k_;
  int m_max_;
  BinomialTable binom_;
  LogTable logs_;
  std::vector<double> group_log_ratio_;  // log(N / N_g)
  std::vector<double> group_inv_share_;  // N / N_g
  std::vector<int> prefix_;              // (N + 1) x K cumulative counts
  std::vector<double> internal_;         // T_i(w)
  std::vector<double> edge_;             // T_e(w)
  std::vector<double> cells_;            // t(lo..hi), for the DP
  std::vector<double> best_;             // DP table
};

// Throws std::invalid_argument unless 2 <= m_max <= N and K >= 2.
KSampleStatistics ksample_sum_all_m(const GroupedSample& sample, ScoreKind score,
                                    int m_max);
KSampleStatistics ksample_max_all_m(const GroupedSample& sample, ScoreKind score,
                                    int m_max);

// max_m { M_m + log pi(I|m) + log pi(m) } with pi(I|m) = 1 / C(N-1, m-1), or
// max_m { M_m - lambda0 log(N) (m-1) } for the DS penalty. Meant for the
// likelihood-ratio score; other scores are accepted but not canonical.
double penalized_max(const KSampleStatistics& stats, const PriorSpec& prior,
                     const BinomialTable& binom);

// max_m { S_m / C(N-1, m-1) + log pi(m) }.
double penalized_sum(const KSampleStatistics& stats, const PriorSpec& prior,
                     const BinomialTable& binom);

// Same as above on a raw per-m vector (index m - 2), for null-table rows.
double penalized_max(std::span<const double> max_values, int n, const PriorSpec& prior,
                     const BinomialTable& binom);
double penalized_sum(std::span<const double> sum_values, int n, const PriorSpec& prior,
                     const BinomialTable& binom);

}  // namespace partest

#endif  // PARTEST_KSAMPLE_H_
