#include "partest/hhg.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "partest/count_grid.h"

namespace partest {

double pearson_2x2(double a, double b, double c, double d) {
  const double row1 = a + b;
  const double row2 = c + d;
  const double col1 = a + c;
  const double col2 = b + d;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) return 0.0;
  const double det = a * d - b * c;
  return (row1 + row2) * det * det / (row1 * row2 * col1 * col2);
}

namespace {

struct Axis {
  std::vector<double> unique;  // sorted distinct values
  std::vector<int> index;      // per observation, 0-based into `unique`
};

Axis make_axis(std::span<const double> values) {
  Axis axis;
  axis.unique.assign(values.begin(), values.end());
  std::sort(axis.unique.begin(), axis.unique.end());
  axis.unique.erase(std::unique(axis.unique.begin(), axis.unique.end()), axis.unique.end());
  axis.index.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    axis.index[i] = static_cast<int>(
        std::lower_bound(axis.unique.begin(), axis.unique.end(), values[i]) -
        axis.unique.begin());
  }
  return axis;
}

// For the centre at unique index p, fills [lo[v], hi[v]] (1-based unique
// indices, possibly empty) with the values strictly closer to the centre
// than unique[v]. Walks outward from p, one step per distinct value.
void open_intervals(const std::vector<double>& unique, int p, std::vector<int>& lo,
                    std::vector<int>& hi) {
  const int count = static_cast<int>(unique.size());
  const double centre = unique[p];
  lo[p] = 1;
  hi[p] = 0;
  int left = p - 1;
  int right = p + 1;
  while (left >= 0 || right < count) {
    const double dl = left >= 0 ? centre - unique[left] : INFINITY;
    const double dr = right < count ? unique[right] - centre : INFINITY;
    const double radius = std::min(dl, dr);
    const int inner_lo = left + 2;
    const int inner_hi = right;
    while (left >= 0 && centre - unique[left] == radius) {
      lo[left] = inner_lo;
      hi[left] = inner_hi;
      --left;
    }
    while (right < count && unique[right] - centre == radius) {
      lo[right] = inner_lo;
      hi[right] = inner_hi;
      ++right;
    }
  }
}

}  // namespace

double hhg_univariate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  const int n = static_cast<int>(x.size());
  if (n < 3) throw std::invalid_argument("HHG needs N >= 3");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) throw std::invalid_argument("NaN in sample");
  }
  const Axis ax = make_axis(x);
  const Axis ay = make_axis(y);
  const int nx = static_cast<int>(ax.unique.size());
  const int ny = static_cast<int>(ay.unique.size());
  std::vector<std::pair<int, int>> points(n);
  for (int i = 0; i < n; ++i) points[i] = {ax.index[i] + 1, ay.index[i] + 1};
  const CumulativeCountGrid grid(nx, ny, points);

  std::vector<int> xlo(nx), xhi(nx), ylo(ny), yhi(ny);
  const double others = n - 2;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    open_intervals(ax.unique, ax.index[i], xlo, xhi);
    open_intervals(ay.unique, ay.index[i], ylo, yhi);
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int vx = ax.index[j];
      const int vy = ay.index[j];
      const bool x_moves = vx != ax.index[i];
      const bool y_moves = vy != ay.index[i];
      // Point i sits inside both open intervals whenever they are nonempty
      // around it; point j never does.
      const int both = grid.count(xlo[vx], xhi[vx], ylo[vy], yhi[vy]) - (x_moves && y_moves);
      const int near_x = grid.count(xlo[vx], xhi[vx], 1, ny) - x_moves;
      const int near_y = grid.count(1, nx, ylo[vy], yhi[vy]) - y_moves;
      const double a = both;
      const double b = near_x - both;
      const double c = near_y - both;
      const double d = others - a - b - c;
      row_sum += pearson_2x2(a, b, c, d);
    }
    total += row_sum;
  }
  return total;
}

double hhg_univariate(const RankedSample& x, const RankedSample& y) {
  std::vector<double> xs(x.ranks.begin(), x.ranks.end());
  std::vector<double> ys(y.ranks.begin(), y.ranks.end());
  return hhg_univariate(xs, ys);
}

}  // namespace partest
