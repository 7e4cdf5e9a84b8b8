#ifndef PARTEST_NULLTABLE_H_
#define PARTEST_NULLTABLE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "partest/priors.h"
#include "partest/ranking.h"
#include "partest/scores.h"

namespace partest {

enum class Problem { kKSample, kIndependence };

// kSum / kMax belong to the K-sample problem, kAdp / kDdp (summation) to
// the independence problem.
enum class Family { kSum, kMax, kAdp, kDdp };

enum class CombineKind { kMinP, kFisher, kPenalized };

std::string_view to_string(Problem problem);
std::string_view to_string(Family family);
std::string_view to_string(CombineKind kind);
Problem parse_problem(std::string_view text);
Family parse_family(std::string_view text);
CombineKind parse_combine_kind(std::string_view text);  // minp, fisher, penalized

// Raised when data or a request does not match a table's meta.
class TableIncompatible : public std::runtime_error {
 public:
  explicit TableIncompatible(const std::string& detail)
      : std::runtime_error("table incompatible: " + detail) {}
};

// Raised for unreadable, unwritable or malformed table files.
class TableIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NullTableMeta {
  static constexpr int kFormatVersion = 1;

  Problem problem = Problem::kKSample;
  Family family = Family::kSum;
  ScoreKind score = ScoreKind::kLikelihoodRatio;
  int n = 0;
  std::vector<int> group_sizes;  // K-sample only
  int m_max = 2;
  long replicates = 0;  // B
  std::uint64_t seed = 0;
  bool exact = false;

  // Throws std::invalid_argument on inconsistent fields.
  void validate() const;
  bool operator==(const NullTableMeta&) const = default;
};

// Number of distinct relabelings (multinomial) or permutations (N!), or
// nullopt once it exceeds `cap`.
std::optional<long> enumeration_count(const NullTableMeta& meta, long cap);

inline constexpr long kExactModeLimit = 100000;

class NullTable {
 public:
  // `rows` is B x (m_max - 1), row-major.
  NullTable(NullTableMeta meta, std::vector<double> rows);

  const NullTableMeta& meta() const { return meta_; }
  long replicates() const { return meta_.replicates; }
  int m_max() const { return meta_.m_max; }
  double value(long b, int m) const {
    return rows_[static_cast<std::size_t>(b) * (meta_.m_max - 1) + (m - 2)];
  }
  std::span<const double> row(long b) const {
    return {rows_.data() + static_cast<std::size_t>(b) * (meta_.m_max - 1),
            static_cast<std::size_t>(meta_.m_max - 1)};
  }
  const std::vector<double>& rows() const { return rows_; }
  // Ascending values of statistic m across replicates.
  const std::vector<double>& sorted_column(int m) const;

  // p-value of `observed` against column m under the table's rule:
  // (1 + #{v >= obs}) / (B + 1) for Monte Carlo tables, #{v >= obs} / B in
  // exact mode.
  double p_value(int m, double observed) const;

 private:
  NullTableMeta meta_;
  std::vector<double> rows_;
  std::vector<std::vector<double>> sorted_;
};

// Values equal within this relative tolerance count as ties.
inline constexpr double kTieTolerance = 1e-12;

// #{v in sorted_column : v >= observed}, ties included.
long count_at_least(double observed, std::span<const double> sorted_column);
// #{v in sorted_column : v <= observed}, ties included.
long count_at_most(double observed, std::span<const double> sorted_column);

// (1 + #{v >= observed}) / (B + 1).
double p_value(double observed, std::span<const double> sorted_column);
// #{v >= observed} / B, for fully enumerated null distributions.
double p_value_exact(double observed, std::span<const double> sorted_column);

// Statistics per m for one dataset, under the table's family and score.
// `ordered` holds 0-based groups by y-rank (K-sample) or y-ranks by x-rank
// (independence).
struct GenerationOptions {
  int threads = 1;
  bool allow_exact = true;  // switch to enumeration when small enough
};

// Fills rows for the given meta. In exact mode (automatic when the
// enumeration count is at most kExactModeLimit and allowed) B becomes that
// count, rows follow lexicographic order of the arrangements, and
// meta.exact is set. Otherwise B >= 100 is required and replicate b uses
// Rng(derive_seed(seed, b)). Output is independent of the thread count.
NullTable generate_null_table(NullTableMeta meta, const GenerationOptions& options = {});

// Statistics of one arrangement: K-sample groups by y-rank (0-based) or
// y-ranks by x-rank.
std::vector<double> arrangement_statistics(const NullTableMeta& meta,
                                           std::span<const int> arrangement,
                                           int threads = 1);

void write_null_table(const NullTable& table, const std::filesystem::path& path);
void write_null_table(const NullTable& table, std::ostream& out);
NullTable read_null_table(const std::filesystem::path& path);
NullTable read_null_table(std::istream& in);

// MinP: min_m p_m. Fisher: -sum_m log p_m. Throws on empty input.
double combined_statistic(std::span<const double> p_values, CombineKind kind);

// Combined statistic of every replicate, with each replicate's p_m computed
// against the table's own columns by the table's p-value rule (kPenalized
// uses the penalized statistic of each row instead). Ascending.
std::vector<double> combined_null_distribution(const NullTable& table, CombineKind kind,
                                               const PriorSpec& prior = {});

struct TestResult {
  std::vector<double> statistics;  // observed, index m - 2
  std::vector<double> p_values;    // per m, index m - 2
  CombineKind kind = CombineKind::kMinP;
  double combined = 0.0;
  double final_p_value = 1.0;
};

// Tests an observed per-m statistics vector against the table. For MinP the
// final p-value counts null combined values <= observed; Fisher and
// Penalized count >=.
TestResult run_test(std::span<const double> observed, const NullTable& table,
                    CombineKind kind, const PriorSpec& prior = {});
// Same, reusing combined_null_distribution(table, kind, prior).
TestResult run_test(std::span<const double> observed, const NullTable& table,
                    CombineKind kind, std::span<const double> combined_null,
                    const PriorSpec& prior = {});

// Computes the observed statistics with the table's family and score.
// Throws TableIncompatible when N or the group sizes differ.
TestResult run_test(const GroupedSample& sample, const NullTable& table, CombineKind kind,
                    const PriorSpec& prior = {});
TestResult run_test(const RankedSample& x, const RankedSample& y, const NullTable& table,
                    CombineKind kind, const PriorSpec& prior = {}, int threads = 1);

// Throws TableIncompatible if a request does not match the table meta.
void check_compatible(const NullTableMeta& meta, Problem problem, int n,
                      std::span<const int> group_sizes, std::optional<Family> family,
                      std::optional<ScoreKind> score);

}  // namespace partest

#endif  // PARTEST_NULLTABLE_H_
