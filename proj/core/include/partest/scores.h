#ifndef PARTEST_SCORES_H_
#define PARTEST_SCORES_H_

#include <span>
#include <string_view>
#include <vector>

namespace partest {

enum class ScoreKind { kPearson, kLikelihoodRatio };

std::string_view to_string(ScoreKind kind);
// Accepts "pearson" and "lr" (also "likelihood-ratio"); throws otherwise.
ScoreKind parse_score_kind(std::string_view text);

// Contribution of one cell with observed count `observed` and expected count
// `expected`. Pearson: (o - e)^2 / e. Likelihood ratio: o * log(o / e).
// 0 * log 0 and 0 / 0 are taken as 0. Throws std::domain_error
// ("impossible cell") when e == 0 but o > 0.
double cell_score(double observed, double expected, ScoreKind kind);

// Sum of cell_score over the K groups of one cell.
double ksample_cell_score(std::span<const double> observed,
                          std::span<const double> expected, ScoreKind kind);

// log(k) and k*log(k) for integer k in [0, n]; entries at 0 are 0.
class LogTable {
 public:
  explicit LogTable(int n);

  double log(int k) const { return log_[k]; }
  double xlogx(int k) const { return xlogx_[k]; }
  int size() const { return static_cast<int>(log_.size()) - 1; }

 private:
  std::vector<double> log_;
  std::vector<double> xlogx_;
};

}  // namespace partest

#endif  // PARTEST_SCORES_H_
