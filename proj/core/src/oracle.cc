#include "partest/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace partest::oracle {

namespace {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void check_budget(double count) {
  if (count > kPartitionBudget) throw std::invalid_argument("oracle budget exceeded");
}

double score_of(double o, double e, ScoreKind kind) {
  if (kind == ScoreKind::kPearson) return e == 0.0 ? 0.0 : (o - e) * (o - e) / e;
  return o == 0.0 ? 0.0 : o * std::log(o / e);
}

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= c / total * std::log(c / total);
  }
  return h;
}

// Index of the interval holding `value` given sorted cut positions: the
// number of cuts below it.
int interval_of(const std::vector<int>& cuts, double value) {
  return static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

// Calls visit(cells, widths_x, widths_y) for every ADP partition, where
// cells[i * m + j] counts points in x interval i and y interval j.
void for_each_adp(const RankedSample& x, const RankedSample& y, int m,
                  const std::function<void(const std::vector<double>&, const std::vector<int>&,
                                           const std::vector<int>&)>& visit) {
  const int n = x.size();
  if (y.size() != n) throw std::invalid_argument("x and y differ in length");
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  check_budget(choose(n - 1, m - 1) * choose(n - 1, m - 1));
  // A cut c splits ranks <= c from ranks > c (the half-integer c + 0.5).
  const auto cuts = subsets(1, n - 1, m - 1);
  std::vector<double> cells(static_cast<std::size_t>(m) * m);
  auto widths = [&](const std::vector<int>& c) {
    std::vector<int> w(m);
    int prev = 0;
    for (int i = 0; i < m - 1; ++i) {
      w[i] = c[i] - prev;
      prev = c[i];
    }
    w[m - 1] = n - prev;
    return w;
  };
  for (const auto& cx : cuts) {
    const auto wx = widths(cx);
    for (const auto& cy : cuts) {
      const auto wy = widths(cy);
      std::fill(cells.begin(), cells.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        cells[interval_of(cx, x.ranks[i]) * m + interval_of(cy, y.ranks[i])] += 1.0;
      }
      visit(cells, wx, wy);
    }
  }
}

// Same for DDP partitions; widths are numbers of ranks strictly between the
// cut points, and the points themselves are left out.
void for_each_ddp(const RankedSample& x, const RankedSample& y, int m,
                  const std::function<void(const std::vector<double>&, const std::vector<int>&,
                                           const std::vector<int>&)>& visit) {
  const int n = x.size();
  if (y.size() != n) throw std::invalid_argument("x and y differ in length");
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  check_budget(choose(n, m - 1));
  std::vector<double> cells(static_cast<std::size_t>(m) * m);
  for (const auto& chosen : subsets(0, n - 1, m - 1)) {
    std::vector<int> cx, cy;
    std::vector<char> is_cut(n, 0);
    for (int i : chosen) {
      cx.push_back(x.ranks[i]);
      cy.push_back(y.ranks[i]);
      is_cut[i] = 1;
    }
    std::sort(cx.begin(), cx.end());
    std::sort(cy.begin(), cy.end());
    auto widths = [&](const std::vector<int>& c) {
      std::vector<int> w(m);
      int prev = 0;
      for (int i = 0; i < m - 1; ++i) {
        w[i] = c[i] - prev - 1;
        prev = c[i];
      }
      w[m - 1] = n + 1 - prev - 1;
      return w;
    };
    std::fill(cells.begin(), cells.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      if (is_cut[i]) continue;
      cells[interval_of(cx, x.ranks[i]) * m + interval_of(cy, y.ranks[i])] += 1.0;
    }
    visit(cells, widths(cx), widths(cy));
  }
}

MeanMI mean_mi(bool derived_from_data, const RankedSample& x, const RankedSample& y, int m) {
  MeanMI out;
  const int n = x.size();
  const double inside = derived_from_data ? n - m + 1 : n;
  double plugin = 0.0, corrected = 0.0, nonempty_total = 0.0;
  auto visit = [&](const std::vector<double>& cells, const std::vector<int>&,
                   const std::vector<int>&) {
    std::vector<double> rows(m, 0.0), cols(m, 0.0);
    double nonempty = 0, rows_nonempty = 0, cols_nonempty = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        rows[i] += cells[i * m + j];
        cols[j] += cells[i * m + j];
        nonempty += cells[i * m + j] > 0;
      }
    }
    for (int i = 0; i < m; ++i) {
      rows_nonempty += rows[i] > 0;
      cols_nonempty += cols[i] > 0;
    }
    const double mi = entropy(rows, inside) + entropy(cols, inside) - entropy(cells, inside);
    plugin += mi;
    corrected += mi - (nonempty - 1) / (2 * inside) + (rows_nonempty - 1) / (2 * inside) +
                 (cols_nonempty - 1) / (2 * inside);
    nonempty_total += nonempty;
    ++out.partitions;
  };
  if (derived_from_data) {
    for_each_ddp(x, y, m, visit);
  } else {
    for_each_adp(x, y, m, visit);
  }
  out.plugin = plugin / out.partitions;
  out.corrected = corrected / out.partitions;
  out.mean_nonempty_cells = nonempty_total / out.partitions;
  return out;
}

Aggregate grid_aggregate(bool derived_from_data, const RankedSample& x, const RankedSample& y,
                         ScoreKind score, int m) {
  Aggregate out;
  out.max = -std::numeric_limits<double>::infinity();
  const int n = x.size();
  const double divisor = derived_from_data ? n - m + 1 : n;
  auto visit = [&](const std::vector<double>& cells, const std::vector<int>& wx,
                   const std::vector<int>& wy) {
    double t = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        t += score_of(cells[i * m + j], static_cast<double>(wx[i]) * wy[j] / divisor, score);
      }
    }
    out.sum += t;
    out.max = std::max(out.max, t);
    ++out.partitions;
  };
  if (derived_from_data) {
    for_each_ddp(x, y, m, visit);
  } else {
    for_each_adp(x, y, m, visit);
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> subsets(int lo, int hi, int size) {
  std::vector<std::vector<int>> out;
  if (size < 0 || size > hi - lo + 1) return out;
  std::vector<int> current(size);
  for (int i = 0; i < size; ++i) current[i] = lo + i;
  while (true) {
    out.push_back(current);
    int i = size - 1;
    while (i >= 0 && current[i] == hi - (size - 1 - i)) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < size; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

Aggregate ksample(const GroupedSample& sample, ScoreKind score, int m) {
  const int n = sample.size();
  const int k = sample.num_groups();
  if (m < 2 || m > n) throw std::invalid_argument("m must be in [2, N]");
  check_budget(choose(n - 1, m - 1));
  std::vector<int> group_at(n);
  for (int i = 0; i < n; ++i) group_at[sample.y_ranks.ranks[i] - 1] = sample.labels[i] - 1;
  Aggregate out;
  out.max = -std::numeric_limits<double>::infinity();
  for (const auto& cuts : subsets(1, n - 1, m - 1)) {
    double t = 0.0;
    int lo = 1;
    for (int c = 0; c < m; ++c) {
      const int hi = c < m - 1 ? cuts[c] : n;
      std::vector<double> observed(k, 0.0);
      for (int r = lo; r <= hi; ++r) observed[group_at[r - 1]] += 1.0;
      for (int g = 0; g < k; ++g) {
        const double expected =
            static_cast<double>(hi - lo + 1) * sample.group_sizes[g] / n;
        t += score_of(observed[g], expected, score);
      }
      lo = hi + 1;
    }
    out.sum += t;
    out.max = std::max(out.max, t);
    ++out.partitions;
  }
  return out;
}

Aggregate adp(const RankedSample& x, const RankedSample& y, ScoreKind score, int m) {
  return grid_aggregate(false, x, y, score, m);
}

Aggregate ddp(const RankedSample& x, const RankedSample& y, ScoreKind score, int m) {
  return grid_aggregate(true, x, y, score, m);
}

MeanMI adp_mi(const RankedSample& x, const RankedSample& y, int m) {
  return mean_mi(false, x, y, m);
}

MeanMI ddp_mi(const RankedSample& x, const RankedSample& y, int m) {
  return mean_mi(true, x, y, m);
}

double hhg(std::span<const double> x, std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  if (static_cast<int>(y.size()) != n) throw std::invalid_argument("x and y differ in length");
  if (n < 3 || n > 200) throw std::invalid_argument("oracle HHG needs 3 <= N <= 200");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double rx = std::fabs(x[j] - x[i]);
      const double ry = std::fabs(y[j] - y[i]);
      double table[2][2] = {{0, 0}, {0, 0}};
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const int near_x = std::fabs(x[k] - x[i]) < rx ? 0 : 1;
        const int near_y = std::fabs(y[k] - y[i]) < ry ? 0 : 1;
        table[near_x][near_y] += 1.0;
      }
      double rows[2] = {table[0][0] + table[0][1], table[1][0] + table[1][1]};
      double cols[2] = {table[0][0] + table[1][0], table[0][1] + table[1][1]};
      if (rows[0] == 0 || rows[1] == 0 || cols[0] == 0 || cols[1] == 0) continue;
      const double others = n - 2;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double e = rows[a] * cols[b] / others;
          total += (table[a][b] - e) * (table[a][b] - e) / e;
        }
      }
    }
  }
  return total;
}

}  // namespace partest::oracle
