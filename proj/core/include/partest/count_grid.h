#ifndef PARTEST_COUNT_GRID_H_
#define PARTEST_COUNT_GRID_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "partest/ranking.h"

namespace partest {

// A(r, s) = #{i : r_i <= r and s_i <= s} over the (nx + 1) x (ny + 1) grid,
// with A(0, .) = A(., 0) = 0. Rectangle counts then cost O(1).
class CumulativeCountGrid {
 public:
  // Square grid for two rank permutations of equal length.
  CumulativeCountGrid(const RankedSample& x, const RankedSample& y);

  // General grid over 1-based cell coordinates; repeated coordinates (ties)
  // are accumulated, one increment per point.
  CumulativeCountGrid(int nx, int ny, std::span<const std::pair<int, int>> points);

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  std::int32_t operator()(int r, int s) const {
    return cells_[static_cast<std::size_t>(r) * (ny_ + 1) + s];
  }

  // Number of points with r in [r_lo, r_hi] and s in [s_lo, s_hi]
  // (inclusive, 1-based). Empty ranges give 0.
  std::int32_t count(int r_lo, int r_hi, int s_lo, int s_hi) const {
    if (r_lo > r_hi || s_lo > s_hi) return 0;
    return (*this)(r_hi, s_hi) - (*this)(r_lo - 1, s_hi) - (*this)(r_hi, s_lo - 1) +
           (*this)(r_lo - 1, s_lo - 1);
  }

  // Row r of the grid, indexed by s in [0, ny].
  std::span<const std::int32_t> row(int r) const {
    return {cells_.data() + static_cast<std::size_t>(r) * (ny_ + 1),
            static_cast<std::size_t>(ny_) + 1};
  }

 private:
  void accumulate();

  int nx_;
  int ny_;
  std::vector<std::int32_t> cells_;  // row-major in r
};

}  // namespace partest

#endif  // PARTEST_COUNT_GRID_H_
