#include "partest/count_grid.h"

#include <stdexcept>

namespace partest {

CumulativeCountGrid::CumulativeCountGrid(const RankedSample& x, const RankedSample& y)
    : nx_(x.size()), ny_(y.size()) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  cells_.assign(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1), 0);
  for (std::size_t i = 0; i < x.ranks.size(); ++i) {
    const int r = x.ranks[i];
    const int s = y.ranks[i];
    if (r < 1 || r > nx_ || s < 1 || s > ny_) {
      throw std::invalid_argument("rank out of range");
    }
    cells_[static_cast<std::size_t>(r) * (ny_ + 1) + s] += 1;
  }
  accumulate();
}

CumulativeCountGrid::CumulativeCountGrid(int nx, int ny,
                                         std::span<const std::pair<int, int>> points)
    : nx_(nx), ny_(ny) {
  if (nx < 0 || ny < 0) throw std::invalid_argument("negative grid size");
  cells_.assign(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1), 0);
  for (const auto& [r, s] : points) {
    if (r < 1 || r > nx_ || s < 1 || s > ny_) {
      throw std::invalid_argument("grid coordinate out of range");
    }
    cells_[static_cast<std::size_t>(r) * (ny_ + 1) + s] += 1;
  }
  accumulate();
}

// In-place version of the two-pass sweep: the buffer starts as the point
// indicator B and each entry becomes
// A(r, s) = A(r, s-1) + A(r-1, s) - A(r-1, s-1) + B(r, s), visited s-major.
void CumulativeCountGrid::accumulate() {
  const std::size_t stride = static_cast<std::size_t>(ny_) + 1;
  for (int s = 1; s <= ny_; ++s) {
    for (int r = 1; r <= nx_; ++r) {
      const std::size_t at = r * stride + s;
      cells_[at] += cells_[at - 1] + cells_[at - stride] - cells_[at - stride - 1];
    }
  }
}

}  // namespace partest
