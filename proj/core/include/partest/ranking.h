#ifndef PARTEST_RANKING_H_
#define PARTEST_RANKING_H_

#include <cstdint>
#include <span>
#include <vector>

namespace partest {

// Ranks of a univariate sample, 1-based, always a permutation of {1..N}.
struct RankedSample {
  std::vector<int> ranks;
  std::uint64_t tie_seed = 0;

  int size() const { return static_cast<int>(ranks.size()); }
};

// Ranks `values`; tied values are ordered by a seeded Fisher-Yates shuffle of
// their indices, so equal input and equal seed always give equal ranks.
// Throws std::invalid_argument("empty sample") on empty input and on NaN.
RankedSample rank_with_random_ties(std::span<const double> values,
                                   std::uint64_t seed);

// Wraps an existing permutation of {1..N}; throws if it is not one.
RankedSample ranked_from_permutation(std::vector<int> ranks);

// Categorical x (labels 1..K) paired with continuous y.
struct GroupedSample {
  std::vector<int> labels;  // per observation, in {1..K}
  RankedSample y_ranks;
  std::vector<int> group_sizes;  // N_g, g = 1..K

  int size() const { return y_ranks.size(); }
  int num_groups() const { return static_cast<int>(group_sizes.size()); }

  // Zero-based group index of the observation holding each y-rank:
  // result[r - 1] = labels[i] - 1 where y_ranks.ranks[i] == r.
  std::vector<int> labels_by_rank() const;
};

// Validates labels (each in 1..K, K >= 2, every group nonempty) and ranks.
GroupedSample make_grouped_sample(std::vector<int> labels, RankedSample y_ranks);

// Convenience: y-rank r is held by an observation of group ordered[r - 1] + 1.
GroupedSample grouped_from_ordered_labels(std::span<const int> ordered,
                                          int num_groups);

}  // namespace partest

#endif  // PARTEST_RANKING_H_
