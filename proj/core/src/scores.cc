#include "partest/scores.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace partest {

std::string_view to_string(ScoreKind kind) {
  return kind == ScoreKind::kPearson ? "pearson" : "lr";
}

ScoreKind parse_score_kind(std::string_view text) {
  if (text == "pearson") return ScoreKind::kPearson;
  if (text == "lr" || text == "likelihood-ratio") return ScoreKind::kLikelihoodRatio;
  throw std::invalid_argument("unknown score kind: " + std::string(text));
}

double cell_score(double observed, double expected, ScoreKind kind) {
  if (observed < 0 || expected < 0) {
    throw std::invalid_argument("cell counts must be nonnegative");
  }
  if (expected == 0) {
    if (observed > 0) throw std::domain_error("impossible cell");
    return 0.0;
  }
  if (kind == ScoreKind::kPearson) {
    const double d = observed - expected;
    return d * d / expected;
  }
  if (observed == 0) return 0.0;
  return observed * std::log(observed / expected);
}

double ksample_cell_score(std::span<const double> observed,
                          std::span<const double> expected, ScoreKind kind) {
  if (observed.size() != expected.size()) {
    throw std::invalid_argument("observed/expected length mismatch");
  }
  double total = 0.0;
  for (std::size_t g = 0; g < observed.size(); ++g) {
    total += cell_score(observed[g], expected[g], kind);
  }
  return total;
}

LogTable::LogTable(int n) : log_(n + 1, 0.0), xlogx_(n + 1, 0.0) {
  for (int k = 1; k <= n; ++k) {
    log_[k] = std::log(static_cast<double>(k));
    xlogx_[k] = k * log_[k];
  }
}

}  // namespace partest
