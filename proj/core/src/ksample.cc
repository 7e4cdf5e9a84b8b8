#include "partest/ksample.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kahan.h"

namespace partest {

namespace {

int total_size(const std::vector<int>& sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), 0);
}

int validated_size(const std::vector<int>& sizes, int m_max) {
  if (sizes.size() < 2) throw std::invalid_argument("K-sample problem needs K >= 2");
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("every group must be nonempty");
  }
  const int n = total_size(sizes);
  if (m_max < 2 || m_max > n) throw std::invalid_argument("m_max must be in [2, N]");
  return n;
}

}  // namespace

KSampleEngine::KSampleEngine(std::vector<int> group_sizes, ScoreKind score, int m_max)
    : group_sizes_(std::move(group_sizes)),
      score_(score),
      n_(validated_size(group_sizes_, m_max)),
      k_(static_cast<int>(group_sizes_.size())),
      m_max_(m_max),
      binom_(n_),
      logs_(n_) {
  for (int size : group_sizes_) {
    group_log_ratio_.push_back(std::log(static_cast<double>(n_) / size));
    group_inv_share_.push_back(static_cast<double>(n_) / size);
  }
  prefix_.assign(static_cast<std::size_t>(n_ + 1) * k_, 0);
}

void KSampleEngine::load(std::span<const int> ordered) {
  if (static_cast<int>(ordered.size()) != n_) {
    throw std::invalid_argument("label vector length differs from N");
  }
  std::vector<int> seen(k_, 0);
  for (int r = 1; r <= n_; ++r) {
    const int g = ordered[r - 1];
    if (g < 0 || g >= k_) throw std::invalid_argument("group index out of range");
    ++seen[g];
    for (int h = 0; h < k_; ++h) prefix_[r * k_ + h] = prefix_[(r - 1) * k_ + h];
    ++prefix_[r * k_ + g];
  }
  if (seen != group_sizes_) throw std::invalid_argument("group sizes do not match");
}

double KSampleEngine::cell(int lo, int hi) const {
  const int w = hi - lo + 1;
  const int* top = &prefix_[static_cast<std::size_t>(hi) * k_];
  const int* bottom = &prefix_[static_cast<std::size_t>(lo - 1) * k_];
  double total = 0.0;
  if (score_ == ScoreKind::kLikelihoodRatio) {
    // sum_g o_g log(o_g N / (w N_g))
    for (int g = 0; g < k_; ++g) {
      const int o = top[g] - bottom[g];
      total += logs_.xlogx(o) + o * group_log_ratio_[g];
    }
    return total - logs_.xlogx(w);
  }
  // sum_g (o_g - e_g)^2 / e_g = sum_g o_g^2 N / (w N_g) - w
  for (int g = 0; g < k_; ++g) {
    const double o = top[g] - bottom[g];
    total += o * o * group_inv_share_[g];
  }
  return total / w - w;
}

std::vector<double> KSampleEngine::sum_all_m(std::span<const int> ordered) {
  load(ordered);
  internal_.assign(n_ + 1, 0.0);
  edge_.assign(n_ + 1, 0.0);
  for (int w = 1; w <= n_; ++w) {
    for (int lo = 1; lo + w - 1 <= n_; ++lo) {
      const int hi = lo + w - 1;
      const double t = cell(lo, hi);
      if (lo == 1 || hi == n_) {
        edge_[w] += t;
      } else {
        internal_[w] += t;
      }
    }
  }
  std::vector<double> out(m_max_ - 1);
  for (int m = 2; m <= m_max_; ++m) {
    detail::KahanSum sum;
    for (int w = 1; w <= n_; ++w) {
      const double wi = binom_(n_ - 2 - w, m - 3);
      const double we = binom_(n_ - 1 - w, m - 2);
      if (wi != 0.0) sum.add(wi * internal_[w]);
      if (we != 0.0) sum.add(we * edge_[w]);
    }
    out[m - 2] = sum.value();
  }
  return out;
}

std::vector<double> KSampleEngine::max_all_m(std::span<const int> ordered) {
  load(ordered);
  const std::size_t stride = static_cast<std::size_t>(n_) + 1;
  cells_.assign(stride * stride, 0.0);
  for (int lo = 1; lo <= n_; ++lo) {
    for (int hi = lo; hi <= n_; ++hi) cells_[lo * stride + hi] = cell(lo, hi);
  }
  const int levels = m_max_;
  const double none = -std::numeric_limits<double>::infinity();
  best_.assign(stride * (levels + 1), none);
  auto at = [&](int i, int j) -> double& { return best_[j * stride + i]; };
  for (int i = 1; i <= n_; ++i) at(i, 1) = cells_[1 * stride + i];
  for (int j = 2; j <= levels; ++j) {
    for (int i = j; i <= n_; ++i) {
      double top = none;
      for (int a = j - 1; a <= i - 1; ++a) {
        const double candidate = at(a, j - 1) + cells_[(a + 1) * stride + i];
        if (candidate > top) top = candidate;
      }
      at(i, j) = top;
    }
  }
  std::vector<double> out(m_max_ - 1);
  for (int m = 2; m <= m_max_; ++m) out[m - 2] = at(n_, m);
  return out;
}

KSampleStatistics ksample_sum_all_m(const GroupedSample& sample, ScoreKind score,
                                    int m_max) {
  KSampleEngine engine(sample.group_sizes, score, m_max);
  const auto ordered = sample.labels_by_rank();
  return {Aggregation::kSum, score, sample.size(), sample.group_sizes,
          engine.sum_all_m(ordered)};
}

KSampleStatistics ksample_max_all_m(const GroupedSample& sample, ScoreKind score,
                                    int m_max) {
  KSampleEngine engine(sample.group_sizes, score, m_max);
  const auto ordered = sample.labels_by_rank();
  return {Aggregation::kMax, score, sample.size(), sample.group_sizes,
          engine.max_all_m(ordered)};
}

double penalized_max(std::span<const double> max_values, int n, const PriorSpec& prior,
                     const BinomialTable& binom) {
  if (max_values.empty()) throw std::invalid_argument("no statistics to penalize");
  prior.validate();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < max_values.size(); ++i) {
    const int m = static_cast<int>(i) + 2;
    best = std::max(best, max_values[i] + max_penalty(prior, m, n, binom));
  }
  return best;
}

double penalized_sum(std::span<const double> sum_values, int n, const PriorSpec& prior,
                     const BinomialTable& binom) {
  if (sum_values.empty()) throw std::invalid_argument("no statistics to penalize");
  prior.validate();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sum_values.size(); ++i) {
    const int m = static_cast<int>(i) + 2;
    const double average = sum_values[i] / binom(n - 1, m - 1);
    best = std::max(best, average + sum_penalty(prior, m, n, binom));
  }
  return best;
}

double penalized_max(const KSampleStatistics& stats, const PriorSpec& prior,
                     const BinomialTable& binom) {
  if (stats.aggregation != Aggregation::kMax) {
    throw std::invalid_argument("penalized_max needs maximum-aggregated statistics");
  }
  return penalized_max(stats.values, stats.n, prior, binom);
}

double penalized_sum(const KSampleStatistics& stats, const PriorSpec& prior,
                     const BinomialTable& binom) {
  if (stats.aggregation != Aggregation::kSum) {
    throw std::invalid_argument("penalized_sum needs sum-aggregated statistics");
  }
  return penalized_sum(stats.values, stats.n, prior, binom);
}

}  // namespace partest
