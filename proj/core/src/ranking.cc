#include "partest/ranking.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "partest/rng.h"

namespace partest {

RankedSample rank_with_random_ties(std::span<const double> values,
                                   std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  for (double v : values) {
    if (std::isnan(v)) throw std::invalid_argument("NaN in sample");
  }
  const std::size_t n = values.size();

  // Shuffled position of each index acts as the tie-breaking key.
  std::vector<std::size_t> shuffled(n);
  std::iota(shuffled.begin(), shuffled.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(shuffled));
  std::vector<std::size_t> tie_key(n);
  for (std::size_t pos = 0; pos < n; ++pos) tie_key[shuffled[pos]] = pos;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return tie_key[a] < tie_key[b];
  });

  RankedSample out;
  out.tie_seed = seed;
  out.ranks.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.ranks[order[r]] = static_cast<int>(r + 1);
  return out;
}

RankedSample ranked_from_permutation(std::vector<int> ranks) {
  if (ranks.empty()) throw std::invalid_argument("empty sample");
  const int n = static_cast<int>(ranks.size());
  std::vector<char> seen(n + 1, 0);
  for (int r : ranks) {
    if (r < 1 || r > n || seen[r]) {
      throw std::invalid_argument("ranks are not a permutation of 1..N");
    }
    seen[r] = 1;
  }
  return RankedSample{std::move(ranks), 0};
}

std::vector<int> GroupedSample::labels_by_rank() const {
  std::vector<int> ordered(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ordered[y_ranks.ranks[i] - 1] = labels[i] - 1;
  }
  return ordered;
}

GroupedSample make_grouped_sample(std::vector<int> labels, RankedSample y_ranks) {
  if (labels.size() != y_ranks.ranks.size()) {
    throw std::invalid_argument("labels and values differ in length");
  }
  if (labels.empty()) throw std::invalid_argument("empty sample");
  const int k = *std::max_element(labels.begin(), labels.end());
  if (k < 2) throw std::invalid_argument("K-sample problem needs at least 2 groups");
  std::vector<int> sizes(k, 0);
  for (int g : labels) {
    if (g < 1) throw std::invalid_argument("group labels must be in 1..K");
    ++sizes[g - 1];
  }
  for (int s : sizes) {
    if (s == 0) throw std::invalid_argument("every group must be nonempty");
  }
  return GroupedSample{std::move(labels), std::move(y_ranks), std::move(sizes)};
}

GroupedSample grouped_from_ordered_labels(std::span<const int> ordered,
                                          int num_groups) {
  std::vector<int> labels(ordered.size());
  std::vector<int> ranks(ordered.size());
  for (std::size_t r = 0; r < ordered.size(); ++r) {
    if (ordered[r] < 0 || ordered[r] >= num_groups) {
      throw std::invalid_argument("group index out of range");
    }
    labels[r] = ordered[r] + 1;
    ranks[r] = static_cast<int>(r + 1);
  }
  return make_grouped_sample(std::move(labels), RankedSample{std::move(ranks), 0});
}

}  // namespace partest
