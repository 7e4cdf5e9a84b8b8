#include "partest/nulltable.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "partest/independence.h"
#include "partest/ksample.h"
#include "partest/parallel.h"
#include "partest/rng.h"

namespace partest {

std::string_view to_string(Problem problem) {
  return problem == Problem::kKSample ? "ksample" : "independence";
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kSum: return "sum";
    case Family::kMax: return "max";
    case Family::kAdp: return "adp";
    case Family::kDdp: return "ddp";
  }
  return "?";
}

std::string_view to_string(CombineKind kind) {
  switch (kind) {
    case CombineKind::kMinP: return "minp";
    case CombineKind::kFisher: return "fisher";
    case CombineKind::kPenalized: return "penalized";
  }
  return "?";
}

Problem parse_problem(std::string_view text) {
  if (text == "ksample") return Problem::kKSample;
  if (text == "independence") return Problem::kIndependence;
  throw std::invalid_argument("unknown problem: " + std::string(text));
}

Family parse_family(std::string_view text) {
  if (text == "sum") return Family::kSum;
  if (text == "max") return Family::kMax;
  if (text == "adp") return Family::kAdp;
  if (text == "ddp") return Family::kDdp;
  throw std::invalid_argument("unknown family: " + std::string(text));
}

CombineKind parse_combine_kind(std::string_view text) {
  if (text == "minp") return CombineKind::kMinP;
  if (text == "fisher") return CombineKind::kFisher;
  if (text == "penalized") return CombineKind::kPenalized;
  throw std::invalid_argument("unknown combine kind: " + std::string(text));
}

void NullTableMeta::validate() const {
  const bool ksample_family = family == Family::kSum || family == Family::kMax;
  if ((problem == Problem::kKSample) != ksample_family) {
    throw std::invalid_argument("family " + std::string(to_string(family)) +
                                " does not belong to problem " +
                                std::string(to_string(problem)));
  }
  if (problem == Problem::kKSample) {
    if (group_sizes.size() < 2) throw std::invalid_argument("need at least 2 groups");
    for (int s : group_sizes) {
      if (s < 1) throw std::invalid_argument("every group must be nonempty");
    }
    if (std::accumulate(group_sizes.begin(), group_sizes.end(), 0) != n) {
      throw std::invalid_argument("group sizes do not add up to N");
    }
  } else if (!group_sizes.empty()) {
    throw std::invalid_argument("independence tables carry no groups");
  }
  if (n < 2) throw std::invalid_argument("N must be at least 2");
  if (m_max < 2 || m_max > n) throw std::invalid_argument("m_max must be in [2, N]");
  if (replicates < 1) throw std::invalid_argument("B must be positive");
}

std::optional<long> enumeration_count(const NullTableMeta& meta, long cap) {
  // Multinomial N! / prod N_g! built as a product of binomials.
  double count = 1.0;
  if (meta.problem == Problem::kIndependence) {
    for (int i = 2; i <= meta.n; ++i) {
      count *= i;
      if (count > cap) return std::nullopt;
    }
  } else {
    int placed = 0;
    for (int size : meta.group_sizes) {
      for (int i = 1; i <= size; ++i) {
        count = count * (placed + i) / i;
        if (count > static_cast<double>(cap) * 1.0000001) return std::nullopt;
      }
      placed += size;
    }
  }
  return static_cast<long>(std::llround(count));
}

NullTable::NullTable(NullTableMeta meta, std::vector<double> rows)
    : meta_(std::move(meta)), rows_(std::move(rows)) {
  meta_.validate();
  const std::size_t width = meta_.m_max - 1;
  if (rows_.size() != width * static_cast<std::size_t>(meta_.replicates)) {
    throw std::invalid_argument("row data does not match B x (m_max - 1)");
  }
  sorted_.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    auto& column = sorted_[j];
    column.resize(meta_.replicates);
    for (long b = 0; b < meta_.replicates; ++b) column[b] = rows_[b * width + j];
    std::sort(column.begin(), column.end());
  }
}

const std::vector<double>& NullTable::sorted_column(int m) const {
  if (m < 2 || m > meta_.m_max) throw std::out_of_range("m outside the table");
  return sorted_[m - 2];
}

double NullTable::p_value(int m, double observed) const {
  const auto& column = sorted_column(m);
  return meta_.exact ? p_value_exact(observed, column) : partest::p_value(observed, column);
}

namespace {

double tie_slack(double value) {
  return kTieTolerance * std::max(1.0, std::fabs(value));
}

}  // namespace

long count_at_least(double observed, std::span<const double> sorted_column) {
  const double bound = observed - tie_slack(observed);
  return static_cast<long>(sorted_column.end() -
                           std::lower_bound(sorted_column.begin(), sorted_column.end(), bound));
}

long count_at_most(double observed, std::span<const double> sorted_column) {
  const double bound = observed + tie_slack(observed);
  return static_cast<long>(std::upper_bound(sorted_column.begin(), sorted_column.end(), bound) -
                           sorted_column.begin());
}

double p_value(double observed, std::span<const double> sorted_column) {
  const double b = static_cast<double>(sorted_column.size());
  return (1.0 + count_at_least(observed, sorted_column)) / (b + 1.0);
}

double p_value_exact(double observed, std::span<const double> sorted_column) {
  if (sorted_column.empty()) throw std::invalid_argument("empty null distribution");
  return static_cast<double>(count_at_least(observed, sorted_column)) /
         static_cast<double>(sorted_column.size());
}

namespace {

// Computes rows for a run of arrangements with one engine.
class RowComputer {
 public:
  RowComputer(const NullTableMeta& meta, int inner_threads) : meta_(meta) {
    if (meta.problem == Problem::kKSample) {
      ksample_ = std::make_unique<KSampleEngine>(meta.group_sizes, meta.score, meta.m_max);
    } else {
      independence_ = std::make_unique<IndependenceEngine>(meta.n, meta.score, meta.m_max,
                                                           inner_threads);
    }
  }

  std::vector<double> operator()(std::span<const int> arrangement) {
    switch (meta_.family) {
      case Family::kSum: return ksample_->sum_all_m(arrangement);
      case Family::kMax: return ksample_->max_all_m(arrangement);
      case Family::kAdp: return independence_->adp_sum_all_m(arrangement);
      case Family::kDdp: return independence_->ddp_sum_all_m(arrangement);
    }
    throw std::logic_error("unknown family");
  }

 private:
  const NullTableMeta& meta_;
  std::unique_ptr<KSampleEngine> ksample_;
  std::unique_ptr<IndependenceEngine> independence_;
};

// Starting arrangement: groups in label order, or the identity permutation.
std::vector<int> base_arrangement(const NullTableMeta& meta) {
  std::vector<int> out;
  out.reserve(meta.n);
  if (meta.problem == Problem::kKSample) {
    for (std::size_t g = 0; g < meta.group_sizes.size(); ++g) {
      out.insert(out.end(), meta.group_sizes[g], static_cast<int>(g));
    }
  } else {
    for (int r = 1; r <= meta.n; ++r) out.push_back(r);
  }
  return out;
}

constexpr long kReplicateBlock = 64;

}  // namespace

std::vector<double> arrangement_statistics(const NullTableMeta& meta,
                                           std::span<const int> arrangement, int threads) {
  meta.validate();
  RowComputer compute(meta, threads);
  return compute(arrangement);
}

NullTable generate_null_table(NullTableMeta meta, const GenerationOptions& options) {
  if (meta.replicates < 1) meta.replicates = 1;
  meta.validate();
  const int threads = resolve_threads(options.threads);
  const std::size_t width = meta.m_max - 1;

  std::optional<long> exact_count;
  if (options.allow_exact) exact_count = enumeration_count(meta, kExactModeLimit);
  meta.exact = exact_count.has_value();

  std::vector<int> base = base_arrangement(meta);
  std::vector<std::vector<int>> arrangements;
  if (meta.exact) {
    meta.replicates = *exact_count;
    arrangements.reserve(meta.replicates);
    do {
      arrangements.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    if (static_cast<long>(arrangements.size()) != meta.replicates) {
      throw std::logic_error("enumeration count mismatch");
    }
  } else if (meta.replicates < 100) {
    throw std::invalid_argument("Monte Carlo tables need B >= 100");
  }

  std::vector<double> rows(width * meta.replicates);
  const long blocks = (meta.replicates + kReplicateBlock - 1) / kReplicateBlock;
  // With few blocks the sweep itself takes the threads instead.
  const int inner_threads = blocks < threads ? threads : 1;
  parallel_for(static_cast<int>(blocks), threads, [&](int block) {
    RowComputer compute(meta, inner_threads);
    std::vector<int> arrangement;
    const long first = block * kReplicateBlock;
    const long last = std::min(meta.replicates, first + kReplicateBlock);
    for (long b = first; b < last; ++b) {
      if (meta.exact) {
        arrangement = arrangements[b];
      } else {
        arrangement = base;
        Rng rng(derive_seed(meta.seed, static_cast<std::uint64_t>(b)));
        rng.shuffle(std::span<int>(arrangement));
      }
      const std::vector<double> values = compute(arrangement);
      std::copy(values.begin(), values.end(), rows.begin() + b * width);
    }
  });
  return NullTable(std::move(meta), std::move(rows));
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw TableIoError("malformed " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::vector<int> parse_groups(std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_number<int>(text.substr(0, comma), "groups"));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

void write_null_table(const NullTable& table, std::ostream& out) {
  const NullTableMeta& meta = table.meta();
  out << "#PNT v" << NullTableMeta::kFormatVersion << '\n';
  out << "#problem=" << to_string(meta.problem) << '\n';
  out << "#family=" << to_string(meta.family) << '\n';
  out << "#score=" << to_string(meta.score) << '\n';
  out << "#N=" << meta.n << '\n';
  out << "#groups=";
  for (std::size_t g = 0; g < meta.group_sizes.size(); ++g) {
    out << (g ? "," : "") << meta.group_sizes[g];
  }
  out << '\n';
  out << "#m_max=" << meta.m_max << '\n';
  out << "#B=" << meta.replicates << '\n';
  out << "#seed=" << meta.seed << '\n';
  out << "#exact=" << (meta.exact ? 1 : 0) << '\n';
  std::string line;
  for (long b = 0; b < meta.replicates; ++b) {
    line.clear();
    for (int m = 2; m <= meta.m_max; ++m) {
      if (m > 2) line += '\t';
      line += format_double(table.value(b, m));
    }
    line += '\n';
    out << line;
  }
}

void write_null_table(const NullTable& table, const std::filesystem::path& path) {
  std::filesystem::path temp = path;
  temp += ".partial";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw TableIoError("cannot open " + temp.string() + " for writing");
    write_null_table(table, out);
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw TableIoError("failed writing " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw TableIoError("cannot move table into place at " + path.string());
  }
}

NullTable read_null_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TableIoError("empty table file");
  if (line.rfind("#PNT v", 0) != 0) throw TableIoError("not a .pnt table");
  const std::string version = line.substr(6);
  const int major = parse_number<int>(
      std::string_view(version).substr(0, version.find('.')), "format version");
  if (major != NullTableMeta::kFormatVersion) {
    throw TableIoError("unsupported table format version " + version);
  }

  NullTableMeta meta;
  bool seen_problem = false, seen_family = false, seen_n = false, seen_m = false,
       seen_b = false;
  std::vector<double> rows;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string_view key = std::string_view(line).substr(1, eq - 1);
      const std::string_view value = std::string_view(line).substr(eq + 1);
      try {
        if (key == "problem") {
          meta.problem = parse_problem(value);
          seen_problem = true;
        } else if (key == "family") {
          meta.family = parse_family(value);
          seen_family = true;
        } else if (key == "score") {
          meta.score = parse_score_kind(value);
        } else if (key == "N") {
          meta.n = parse_number<int>(value, "N");
          seen_n = true;
        } else if (key == "groups") {
          meta.group_sizes = parse_groups(value);
        } else if (key == "m_max") {
          meta.m_max = parse_number<int>(value, "m_max");
          seen_m = true;
        } else if (key == "B") {
          meta.replicates = parse_number<long>(value, "B");
          seen_b = true;
        } else if (key == "seed") {
          meta.seed = parse_number<std::uint64_t>(value, "seed");
        } else if (key == "exact") {
          meta.exact = parse_number<int>(value, "exact") != 0;
        }
      } catch (const std::invalid_argument& e) {
        throw TableIoError(e.what());
      }
      continue;
    }
    if (!(seen_problem && seen_family && seen_n && seen_m && seen_b)) {
      throw TableIoError("table header incomplete");
    }
    std::string_view rest = line;
    int fields = 0;
    while (true) {
      const auto tab = rest.find('\t');
      rows.push_back(parse_number<double>(rest.substr(0, tab), "value on line " +
                                                                   std::to_string(line_number)));
      ++fields;
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields != meta.m_max - 1) {
      throw TableIoError("line " + std::to_string(line_number) + " has " +
                         std::to_string(fields) + " values, expected " +
                         std::to_string(meta.m_max - 1));
    }
  }
  if (!(seen_problem && seen_family && seen_n && seen_m && seen_b)) {
    throw TableIoError("table header incomplete");
  }
  const std::size_t expected = static_cast<std::size_t>(meta.replicates) * (meta.m_max - 1);
  if (rows.size() != expected) throw TableIoError("row count does not match B");
  try {
    return NullTable(std::move(meta), std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw TableIoError(std::string("invalid table meta: ") + e.what());
  }
}

NullTable read_null_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TableIoError("cannot open " + path.string());
  return read_null_table(in);
}

double combined_statistic(std::span<const double> p_values, CombineKind kind) {
  if (p_values.empty()) throw std::invalid_argument("no p-values to combine");
  switch (kind) {
    case CombineKind::kMinP:
      return *std::min_element(p_values.begin(), p_values.end());
    case CombineKind::kFisher: {
      double total = 0.0;
      for (double p : p_values) total -= std::log(p);
      return total;
    }
    case CombineKind::kPenalized:
      break;
  }
  throw std::invalid_argument("penalized statistics combine raw values, not p-values");
}

namespace {

double penalized_row(const NullTableMeta& meta, std::span<const double> row,
                     const PriorSpec& prior, const BinomialTable& binom) {
  switch (meta.family) {
    case Family::kSum: return penalized_sum(row, meta.n, prior, binom);
    case Family::kMax: return penalized_max(row, meta.n, prior, binom);
    case Family::kAdp: return penalized_adp_sum(row, meta.n, prior, binom);
    case Family::kDdp: return penalized_ddp_sum(row, meta.n, prior, binom);
  }
  throw std::logic_error("unknown family");
}

double combine_row(const NullTable& table, std::span<const double> row, CombineKind kind,
                   const PriorSpec& prior, const BinomialTable& binom,
                   std::vector<double>& scratch) {
  if (kind == CombineKind::kPenalized) return penalized_row(table.meta(), row, prior, binom);
  scratch.resize(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    scratch[j] = table.p_value(static_cast<int>(j) + 2, row[j]);
  }
  return combined_statistic(scratch, kind);
}

}  // namespace

std::vector<double> combined_null_distribution(const NullTable& table, CombineKind kind,
                                               const PriorSpec& prior) {
  const BinomialTable binom(table.meta().n);
  std::vector<double> out(table.replicates());
  std::vector<double> scratch;
  for (long b = 0; b < table.replicates(); ++b) {
    out[b] = combine_row(table, table.row(b), kind, prior, binom, scratch);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TestResult run_test(std::span<const double> observed, const NullTable& table,
                    CombineKind kind, const PriorSpec& prior) {
  const std::vector<double> null = combined_null_distribution(table, kind, prior);
  return run_test(observed, table, kind, null, prior);
}

TestResult run_test(std::span<const double> observed, const NullTable& table,
                    CombineKind kind, std::span<const double> null,
                    const PriorSpec& prior) {
  if (static_cast<long>(null.size()) != table.replicates()) {
    throw std::invalid_argument("combined null distribution does not match the table");
  }
  if (static_cast<int>(observed.size()) != table.m_max() - 1) {
    throw TableIncompatible("observed statistics cover a different range of m");
  }
  TestResult result;
  result.kind = kind;
  result.statistics.assign(observed.begin(), observed.end());
  for (std::size_t j = 0; j < observed.size(); ++j) {
    result.p_values.push_back(table.p_value(static_cast<int>(j) + 2, observed[j]));
  }
  const BinomialTable binom(table.meta().n);
  std::vector<double> scratch;
  result.combined = combine_row(table, observed, kind, prior, binom, scratch);
  const long count = kind == CombineKind::kMinP ? count_at_most(result.combined, null)
                                                : count_at_least(result.combined, null);
  const double b = static_cast<double>(null.size());
  result.final_p_value = table.meta().exact ? count / b : (1.0 + count) / (b + 1.0);
  return result;
}

void check_compatible(const NullTableMeta& meta, Problem problem, int n,
                      std::span<const int> group_sizes, std::optional<Family> family,
                      std::optional<ScoreKind> score) {
  if (meta.problem != problem) {
    throw TableIncompatible("table is for the " + std::string(to_string(meta.problem)) +
                            " problem");
  }
  if (meta.n != n) {
    throw TableIncompatible("table has N=" + std::to_string(meta.n) + ", data has N=" +
                            std::to_string(n));
  }
  if (problem == Problem::kKSample &&
      !std::equal(meta.group_sizes.begin(), meta.group_sizes.end(), group_sizes.begin(),
                  group_sizes.end())) {
    throw TableIncompatible("group sizes differ");
  }
  if (family && *family != meta.family) {
    throw TableIncompatible("table family is " + std::string(to_string(meta.family)));
  }
  if (score && *score != meta.score) {
    throw TableIncompatible("table score is " + std::string(to_string(meta.score)));
  }
}

TestResult run_test(const GroupedSample& sample, const NullTable& table, CombineKind kind,
                    const PriorSpec& prior) {
  check_compatible(table.meta(), Problem::kKSample, sample.size(), sample.group_sizes,
                   std::nullopt, std::nullopt);
  const std::vector<double> observed =
      arrangement_statistics(table.meta(), sample.labels_by_rank());
  return run_test(observed, table, kind, prior);
}

TestResult run_test(const RankedSample& x, const RankedSample& y, const NullTable& table,
                    CombineKind kind, const PriorSpec& prior, int threads) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  check_compatible(table.meta(), Problem::kIndependence, x.size(), {}, std::nullopt,
                   std::nullopt);
  const std::vector<double> observed =
      arrangement_statistics(table.meta(), y_by_x_rank(x, y), threads);
  return run_test(observed, table, kind, prior);
}

}  // namespace partest
