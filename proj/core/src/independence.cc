#include "partest/independence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kahan.h"
#include "partest/parallel.h"

namespace partest {

namespace {

constexpr int kSideInternal = 0;
constexpr int kSideEdge = 1;

// DDP cells are fixed by 1..4 defining points.
constexpr int kMaxDefining = 4;

// Number of a-values handled per parallel batch of the DDP sweep. Fixed so
// that the combine order never depends on the thread count.
constexpr int kDdpBatch = 32;

void check_m_max(int n, int m_max) {
  if (n < 2) throw std::invalid_argument("need at least 2 observations");
  if (m_max < 2 || m_max > n) throw std::invalid_argument("m_max must be in [2, N]");
}

CumulativeCountGrid grid_from(std::span<const int> y_by_x) {
  std::vector<std::pair<int, int>> points(y_by_x.size());
  for (std::size_t i = 0; i < y_by_x.size(); ++i) {
    points[i] = {static_cast<int>(i) + 1, y_by_x[i]};
  }
  const int n = static_cast<int>(y_by_x.size());
  return CumulativeCountGrid(n, n, points);
}

void check_permutation(std::span<const int> y_by_x, int n) {
  if (static_cast<int>(y_by_x.size()) != n) {
    throw std::invalid_argument("sample size differs from the engine's N");
  }
  std::vector<char> seen(n + 1, 0);
  for (int s : y_by_x) {
    if (s < 1 || s > n || seen[s]) throw std::invalid_argument("y ranks are not a permutation");
    seen[s] = 1;
  }
}

}  // namespace

std::vector<int> y_by_x_rank(const RankedSample& x, const RankedSample& y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  std::vector<int> out(x.ranks.size());
  for (std::size_t i = 0; i < x.ranks.size(); ++i) out[x.ranks[i] - 1] = y.ranks[i];
  return out;
}

struct IndependenceEngine::State {
  State(int n_, ScoreKind score_, int m_max_, int threads_)
      : n(n_), m_max(m_max_), threads(std::max(1, threads_)), score(score_),
        binom(n_ + 1), logs(n_ + 1) {}

  int n;
  int m_max;
  int threads;
  ScoreKind score;
  BinomialTable binom;
  LogTable logs;

  // ADP totals indexed by (x side, y side, w, l).
  std::vector<double> adp_main;  // sum of o log o (LR) or o^2 (Pearson)
  std::vector<double> adp_mass;  // sum of o
  std::vector<double> adp_nonempty;
  std::vector<double> adp_cells;
  bool adp_ready = false;

  // DDP totals indexed by (k - 1, OUT).
  std::vector<double> ddp_main;  // LR: sum o log o - o log(WL); Pearson: o^2/(WL)
  std::vector<double> ddp_mass;
  std::vector<double> ddp_nonempty;
  std::vector<double> ddp_area;  // sum of W L
  bool ddp_ready = false;

  std::size_t adp_index(int sx, int sy, int w, int l) const {
    const std::size_t stride = static_cast<std::size_t>(n) + 1;
    return ((static_cast<std::size_t>(sx) * 2 + sy) * stride + w) * stride + l;
  }

  // Partitions containing a given axis interval of width w on that side.
  double side_weight(int side, int w, int m) const {
    return side == kSideInternal ? binom(n - 2 - w, m - 3) : binom(n - 1 - w, m - 2);
  }

  void sweep_adp(std::span<const int> y_by_x);
  void sweep_ddp(std::span<const int> y_by_x);
  double adp_total(int m, bool nonempty_only) const;
  double ddp_total(int m, bool nonempty_only) const;
};

IndependenceEngine::IndependenceEngine(int n, ScoreKind score, int m_max, int threads) {
  check_m_max(n, m_max);
  state_ = std::make_unique<State>(n, score, m_max, threads);
}

IndependenceEngine::~IndependenceEngine() = default;
IndependenceEngine::IndependenceEngine(IndependenceEngine&&) noexcept = default;
IndependenceEngine& IndependenceEngine::operator=(IndependenceEngine&&) noexcept = default;

int IndependenceEngine::n() const { return state_->n; }
int IndependenceEngine::m_max() const { return state_->m_max; }
ScoreKind IndependenceEngine::score() const { return state_->score; }
const BinomialTable& IndependenceEngine::binomials() const { return state_->binom; }

void IndependenceEngine::State::sweep_adp(std::span<const int> y_by_x) {
  check_permutation(y_by_x, n);
  const CumulativeCountGrid grid = grid_from(y_by_x);
  const std::size_t total = 4 * static_cast<std::size_t>(n + 1) * (n + 1);
  adp_main.assign(total, 0.0);
  adp_mass.assign(total, 0.0);
  adp_nonempty.assign(total, 0.0);
  adp_cells.assign(total, 0.0);
  const bool lr = score == ScoreKind::kLikelihoodRatio;

  // Work item = x-width w; it owns every total with that w. Width N spans
  // the whole axis and belongs to no partition with m >= 2.
  parallel_for(n - 1, threads, [&](int item) {
    const int w = item + 1;
    std::vector<int> column(n + 1);
    for (int rl = 1; rl + w - 1 <= n; ++rl) {
      const int rh = rl + w - 1;
      const int sx = (rl == 1 || rh == n) ? kSideEdge : kSideInternal;
      const auto top = grid.row(rh);
      const auto bottom = grid.row(rl - 1);
      for (int s = 0; s <= n; ++s) column[s] = top[s] - bottom[s];

      auto add = [&](int sy, int l, double main, double mass, double nonempty,
                     double cells) {
        const std::size_t at = adp_index(sx, sy, w, l);
        adp_main[at] += main;
        adp_mass[at] += mass;
        adp_nonempty[at] += nonempty;
        adp_cells[at] += cells;
      };
      auto term = [&](int o) {
        return lr ? logs.xlogx(o) : static_cast<double>(o) * o;
      };

      for (int l = 1; l < n; ++l) {
        // Two edge cells: [1, l] and [n - l + 1, n].
        const int o_low = column[l];
        const int o_high = column[n] - column[n - l];
        add(kSideEdge, l, term(o_low) + term(o_high), o_low + o_high,
            (o_low > 0) + (o_high > 0), 2.0);
        double main = 0.0;
        long mass = 0;
        long nonempty = 0;
        for (int sl = 2; sl + l - 1 < n; ++sl) {
          const int o = column[sl + l - 1] - column[sl - 1];
          main += term(o);
          mass += o;
          nonempty += (o > 0);
        }
        const int internal_cells = std::max(0, n - l - 1);
        if (internal_cells > 0) {
          add(kSideInternal, l, main, static_cast<double>(mass),
              static_cast<double>(nonempty), internal_cells);
        }
      }
    }
  });
  adp_ready = true;
}

double IndependenceEngine::State::adp_total(int m, bool nonempty_only) const {
  if (!adp_ready) throw std::logic_error("ADP sweep has not been run");
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  const bool lr = score == ScoreKind::kLikelihoodRatio;
  const double log_n = std::log(static_cast<double>(n));
  std::vector<double> weight(2 * static_cast<std::size_t>(n + 1), 0.0);
  for (int side = 0; side < 2; ++side) {
    for (int w = 1; w < n; ++w) weight[side * (n + 1) + w] = side_weight(side, w, m);
  }
  detail::KahanSum total;
  for (int sx = 0; sx < 2; ++sx) {
    for (int w = 1; w < n; ++w) {
      const double wx = weight[sx * (n + 1) + w];
      if (wx == 0.0) continue;
      double inner = 0.0;
      for (int sy = 0; sy < 2; ++sy) {
        for (int l = 1; l < n; ++l) {
          const double wy = weight[sy * (n + 1) + l];
          if (wy == 0.0) continue;
          const std::size_t at = adp_index(sx, sy, w, l);
          double t;
          if (nonempty_only) {
            t = adp_nonempty[at];
          } else if (lr) {
            t = adp_main[at] - adp_mass[at] * (logs.log(w) + logs.log(l) - log_n);
          } else {
            const double area = static_cast<double>(w) * l;
            t = adp_main[at] * n / area - 2.0 * adp_mass[at] + adp_cells[at] * area / n;
          }
          inner += wy * t;
        }
      }
      total.add(wx * inner);
    }
  }
  return total.value();
}

void IndependenceEngine::sweep_adp(std::span<const int> y_by_x) {
  state_->sweep_adp(y_by_x);
}

double IndependenceEngine::adp_statistic(int m) const {
  return state_->adp_total(m, false);
}

double IndependenceEngine::adp_nonempty_cells(int m) const {
  return state_->adp_total(m, true);
}

std::vector<double> IndependenceEngine::adp_sum_all_m(std::span<const int> y_by_x) {
  sweep_adp(y_by_x);
  std::vector<double> out(state_->m_max - 1);
  for (int m = 2; m <= state_->m_max; ++m) out[m - 2] = adp_statistic(m);
  return out;
}

void IndependenceEngine::State::sweep_ddp(std::span<const int> y_by_x) {
  check_permutation(y_by_x, n);
  const CumulativeCountGrid grid = grid_from(y_by_x);
  const std::size_t buckets = kMaxDefining * static_cast<std::size_t>(n + 1);
  ddp_main.assign(buckets, 0.0);
  ddp_mass.assign(buckets, 0.0);
  ddp_nonempty.assign(buckets, 0.0);
  ddp_area.assign(buckets, 0.0);
  const bool lr = score == ScoreKind::kLikelihoodRatio;

  // Left boundary a in [0, n] (0 = outer frame), right boundary b in
  // [a + 2, n + 1]; likewise c < d on the y axis.
  std::vector<std::vector<double>> partial(kDdpBatch);
  for (int batch_start = 0; batch_start <= n; batch_start += kDdpBatch) {
    const int batch = std::min(kDdpBatch, n + 1 - batch_start);
    parallel_for(batch, threads, [&](int item) {
      const int a = batch_start + item;
      std::vector<double>& acc = partial[item];
      acc.assign(4 * buckets, 0.0);
      double* main = acc.data();
      double* mass = main + buckets;
      double* nonempty = mass + buckets;
      double* area = nonempty + buckets;

      std::vector<int> inside(n + 1);   // points with x in (a, b), y <= s
      std::vector<int> outside(n + 1);  // points with x < a or x > b, y <= s
      const bool has_left = a >= 1;
      const int sigma_a = has_left ? y_by_x[a - 1] : 0;
      for (int b = a + 2; b <= n + 1; ++b) {
        if (a == 0 && b == n + 1) continue;
        const bool has_right = b <= n;
        const int sigma_b = has_right ? y_by_x[b - 1] : 0;
        const auto inner_top = grid.row(b - 1);
        const auto inner_bottom = grid.row(a);
        const auto left = grid.row(has_left ? a - 1 : 0);
        const auto full = grid.row(n);
        const auto right_cut = grid.row(has_right ? b : n);
        for (int s = 0; s <= n; ++s) {
          inside[s] = inner_top[s] - inner_bottom[s];
          outside[s] = left[s] + (full[s] - right_cut[s]);
        }
        const int width = b - a - 1;
        const double log_width = logs.log(width);
        const int out_total = outside[n];

        for (int c = 0; c + 2 <= n + 1; ++c) {
          const bool has_bottom = c >= 1;
          // The point on row c must not sit inside the bottom edge.
          if (has_bottom && inside[c] - inside[c - 1] == 1) continue;
          int d_max = n + 1;
          if (has_left && sigma_a > c) d_max = std::min(d_max, sigma_a);
          if (has_right && sigma_b > c) d_max = std::min(d_max, sigma_b);
          int k_base = int{has_left} + int{has_right} + int{has_bottom};
          if (has_bottom && has_left && sigma_a == c) --k_base;
          if (has_bottom && has_right && sigma_b == c) --k_base;
          const int out_low = has_bottom ? outside[c - 1] : 0;
          const int inside_low = inside[c];

          for (int d = c + 2; d <= d_max; ++d) {
            int k = k_base;
            int out_high = 0;
            if (d <= n) {
              if (inside[d] - inside[d - 1] == 1) continue;
              k += 1;
              if (has_left && sigma_a == d) --k;
              if (has_right && sigma_b == d) --k;
              out_high = out_total - outside[d];
            } else if (c == 0) {
              continue;  // spans the whole y axis
            }
            const int length = d - c - 1;
            const int o = inside[d - 1] - inside_low;
            const std::size_t at =
                static_cast<std::size_t>(k - 1) * (n + 1) + (out_low + out_high);
            if (lr) {
              main[at] += logs.xlogx(o) - o * (log_width + logs.log(length));
            } else {
              main[at] += static_cast<double>(o) * o / (static_cast<double>(width) * length);
            }
            mass[at] += o;
            nonempty[at] += (o > 0);
            area[at] += static_cast<double>(width) * length;
          }
        }
      }
    });
    for (int item = 0; item < batch; ++item) {
      const std::vector<double>& acc = partial[item];
      for (std::size_t i = 0; i < buckets; ++i) {
        ddp_main[i] += acc[i];
        ddp_mass[i] += acc[buckets + i];
        ddp_nonempty[i] += acc[2 * buckets + i];
        ddp_area[i] += acc[3 * buckets + i];
      }
    }
  }
  ddp_ready = true;
}

double IndependenceEngine::State::ddp_total(int m, bool nonempty_only) const {
  if (!ddp_ready) throw std::logic_error("DDP sweep has not been run");
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  const bool lr = score == ScoreKind::kLikelihoodRatio;
  const double inner_points = n - m + 1;
  const double log_inner = std::log(inner_points);
  detail::KahanSum total;
  for (int k = 1; k <= kMaxDefining; ++k) {
    if (m - 1 - k < 0) break;
    for (int out = 0; out <= n; ++out) {
      const double count = binom(out, m - 1 - k);
      if (count == 0.0) continue;
      const std::size_t at = static_cast<std::size_t>(k - 1) * (n + 1) + out;
      double t;
      if (nonempty_only) {
        t = ddp_nonempty[at];
      } else if (lr) {
        t = ddp_main[at] + ddp_mass[at] * log_inner;
      } else {
        t = ddp_main[at] * inner_points - 2.0 * ddp_mass[at] + ddp_area[at] / inner_points;
      }
      total.add(count * t);
    }
  }
  return total.value();
}

void IndependenceEngine::sweep_ddp(std::span<const int> y_by_x) {
  state_->sweep_ddp(y_by_x);
}

double IndependenceEngine::ddp_statistic(int m) const {
  return state_->ddp_total(m, false);
}

double IndependenceEngine::ddp_nonempty_cells(int m) const {
  return state_->ddp_total(m, true);
}

std::vector<double> IndependenceEngine::ddp_sum_all_m(std::span<const int> y_by_x) {
  sweep_ddp(y_by_x);
  std::vector<double> out(state_->m_max - 1);
  for (int m = 2; m <= state_->m_max; ++m) out[m - 2] = ddp_statistic(m);
  return out;
}

double IndependenceEngine::ddp_nonempty_strips(int m) const {
  const State& s = *state_;
  if (m < 2 || m > s.n) throw std::invalid_argument("m must be in [2, N]");
  const int n = s.n;
  detail::KahanSum total;
  for (int a = 0; a <= n; ++a) {
    for (int b = a + 2; b <= n + 1; ++b) {
      if (a == 0 && b == n + 1) continue;
      const int defining = (a >= 1) + (b <= n);
      const int out = (a >= 1 ? a - 1 : 0) + (b <= n ? n - b : 0);
      total.add(s.binom(out, m - 1 - defining));
    }
  }
  return total.value();
}

IndependenceStatistics adp_sum_all_m(const RankedSample& x, const RankedSample& y,
                                     ScoreKind score, int m_max, int threads) {
  IndependenceEngine engine(x.size(), score, m_max, threads);
  return {IndependenceFamily::kAdpSum, score, x.size(),
          engine.adp_sum_all_m(y_by_x_rank(x, y))};
}

IndependenceStatistics ddp_sum_all_m(const RankedSample& x, const RankedSample& y,
                                     ScoreKind score, int m_max, int threads) {
  IndependenceEngine engine(x.size(), score, m_max, threads);
  return {IndependenceFamily::kDdpSum, score, x.size(),
          engine.ddp_sum_all_m(y_by_x_rank(x, y))};
}

namespace {

// T^I of the DDP partition induced by the points with the given x-ranks.
double ddp_partition_score(const CumulativeCountGrid& grid, std::span<const int> y_by_x,
                           std::span<const int> chosen_x, ScoreKind score) {
  const int n = grid.nx();
  const int cuts = static_cast<int>(chosen_x.size());
  int xs[kMaxDefining + 2];
  int ys[kMaxDefining + 2];
  xs[0] = ys[0] = 0;
  for (int i = 0; i < cuts; ++i) {
    xs[i + 1] = chosen_x[i];
    ys[i + 1] = y_by_x[chosen_x[i] - 1];
  }
  xs[cuts + 1] = ys[cuts + 1] = n + 1;
  std::sort(xs + 1, xs + cuts + 1);
  std::sort(ys + 1, ys + cuts + 1);
  const double inner_points = n - cuts;
  double total = 0.0;
  for (int i = 0; i <= cuts; ++i) {
    const int width = xs[i + 1] - xs[i] - 1;
    for (int j = 0; j <= cuts; ++j) {
      const int length = ys[j + 1] - ys[j] - 1;
      const int o = grid.count(xs[i] + 1, xs[i + 1] - 1, ys[j] + 1, ys[j + 1] - 1);
      total += cell_score(o, width * static_cast<double>(length) / inner_points, score);
    }
  }
  return total;
}

}  // namespace

double ddp_max(const RankedSample& x, const RankedSample& y, ScoreKind score, int m) {
  if (m < 2 || m > 4) throw std::invalid_argument("exponential regime");
  const int n = x.size();
  if (m > n) throw std::invalid_argument("m must not exceed N");
  const auto order = y_by_x_rank(x, y);
  const CumulativeCountGrid grid(x, y);
  double best = -std::numeric_limits<double>::infinity();
  int chosen[3];
  if (m == 2) {
    for (int p = 1; p <= n; ++p) {
      chosen[0] = p;
      best = std::max(best, ddp_partition_score(grid, order, {chosen, 1}, score));
    }
  } else if (m == 3) {
    for (int p = 1; p <= n; ++p) {
      for (int q = p + 1; q <= n; ++q) {
        chosen[0] = p;
        chosen[1] = q;
        best = std::max(best, ddp_partition_score(grid, order, {chosen, 2}, score));
      }
    }
  } else {
    for (int p = 1; p <= n; ++p) {
      for (int q = p + 1; q <= n; ++q) {
        for (int r = q + 1; r <= n; ++r) {
          chosen[0] = p;
          chosen[1] = q;
          chosen[2] = r;
          best = std::max(best, ddp_partition_score(grid, order, {chosen, 3}, score));
        }
      }
    }
  }
  return best;
}

IndependenceStatistics ddp_max_all_m(const RankedSample& x, const RankedSample& y,
                                     ScoreKind score, int m_max) {
  m_max = std::min(m_max, std::min(4, x.size()));
  if (m_max < 2) throw std::invalid_argument("need N >= 2");
  IndependenceStatistics out{IndependenceFamily::kDdpMax, score, x.size(), {}};
  for (int m = 2; m <= m_max; ++m) out.values.push_back(ddp_max(x, y, score, m));
  return out;
}

double adp_max_2x2(const RankedSample& x, const RankedSample& y, ScoreKind score) {
  const int n = x.size();
  if (n < 2) throw std::invalid_argument("need N >= 2");
  const CumulativeCountGrid grid(x, y);
  double best = -std::numeric_limits<double>::infinity();
  const double dn = n;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const int low_low = grid(i, j);
      const int low_high = grid(i, n) - low_low;
      const int high_low = grid(n, j) - low_low;
      const int high_high = n - low_low - low_high - high_low;
      const double t = cell_score(low_low, i * static_cast<double>(j) / dn, score) +
                       cell_score(low_high, i * static_cast<double>(n - j) / dn, score) +
                       cell_score(high_low, (n - i) * static_cast<double>(j) / dn, score) +
                       cell_score(high_high, (n - i) * static_cast<double>(n - j) / dn, score);
      best = std::max(best, t);
    }
  }
  return best;
}

double penalized_adp_sum(std::span<const double> sums, int n, const PriorSpec& prior,
                         const BinomialTable& binom) {
  if (sums.empty()) throw std::invalid_argument("no statistics to penalize");
  prior.validate();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const int m = static_cast<int>(i) + 2;
    const double count = binom(n - 1, m - 1);
    best = std::max(best, sums[i] / count / count + sum_penalty(prior, m, n, binom));
  }
  return best;
}

double penalized_adp_sum(const IndependenceStatistics& stats, const PriorSpec& prior,
                         const BinomialTable& binom) {
  if (stats.family != IndependenceFamily::kAdpSum) {
    throw std::invalid_argument("penalized_adp_sum needs ADP sum statistics");
  }
  return penalized_adp_sum(stats.values, stats.n, prior, binom);
}

double penalized_ddp_sum(std::span<const double> sums, int n, const PriorSpec& prior,
                         const BinomialTable& binom) {
  if (sums.empty()) throw std::invalid_argument("no statistics to penalize");
  prior.validate();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const int m = static_cast<int>(i) + 2;
    best = std::max(best, sums[i] / binom(n, m - 1) + sum_penalty(prior, m, n, binom));
  }
  return best;
}

double penalized_ddp_sum(const IndependenceStatistics& stats, const PriorSpec& prior,
                         const BinomialTable& binom) {
  if (stats.family != IndependenceFamily::kDdpSum) {
    throw std::invalid_argument("penalized_ddp_sum needs DDP sum statistics");
  }
  return penalized_ddp_sum(stats.values, stats.n, prior, binom);
}

}  // namespace partest
