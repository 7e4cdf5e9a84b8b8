// partest: partition-based tests of equality of distributions and of
// independence, with reusable null tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "data_io.h"
#include "partest/mi.h"
#include "partest/nulltable.h"
#include "partest/parallel.h"
#include "partest/priors.h"
#include "partest/ranking.h"
#include "partest/simulate.h"

namespace {

using partest::tools::DataError;
using json = nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kIncompatible = 2, kIo = 3, kNumeric = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kText, kTsv, kJsonLines };

Format parse_format(const std::string& text) {
  if (text == "text") return Format::kText;
  if (text == "tsv") return Format::kTsv;
  if (text == "json-lines") return Format::kJsonLines;
  throw UsageError("unknown format: " + text);
}

// Runs a flag parser, reporting its failures as usage errors.
template <typename Parse>
auto flag(Parse&& parse) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<int> parse_groups(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const int size = std::stoi(item, &used);
      if (used != item.size() || size < 1) throw std::invalid_argument(item);
      out.push_back(size);
    } catch (const std::exception&) {
      throw UsageError("--groups expects positive integers separated by commas");
    }
  }
  return out;
}

partest::tools::TwoColumnData read_input(const std::string& path) {
  if (path == "-") return partest::tools::read_two_columns(std::cin);
  std::ifstream in(path);
  if (!in) throw partest::TableIoError("cannot open " + path);
  return partest::tools::read_two_columns(in);
}

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::string meta_line(const partest::NullTableMeta& meta) {
  std::ostringstream out;
  out << "problem " << partest::to_string(meta.problem) << "  family "
      << partest::to_string(meta.family) << "  score " << partest::to_string(meta.score)
      << "  N " << meta.n;
  if (!meta.group_sizes.empty()) {
    out << "  groups ";
    for (std::size_t g = 0; g < meta.group_sizes.size(); ++g) {
      out << (g ? "," : "") << meta.group_sizes[g];
    }
  }
  out << "  m 2.." << meta.m_max << "  B " << meta.replicates << "  seed " << meta.seed
      << "  exact " << (meta.exact ? 1 : 0);
  return out.str();
}

json meta_json(const partest::NullTableMeta& meta) {
  return {{"problem", partest::to_string(meta.problem)},
          {"family", partest::to_string(meta.family)},
          {"score", partest::to_string(meta.score)},
          {"n", meta.n},
          {"groups", meta.group_sizes},
          {"m_max", meta.m_max},
          {"B", meta.replicates},
          {"seed", meta.seed},
          {"exact", meta.exact}};
}

struct NullTableFlags {
  std::string problem = "ksample";
  std::string groups;
  int n = 0;
  std::string family;
  std::string score = "lr";
  int m_max = 0;
  long replicates = 1000;
  std::uint64_t seed = 1;
  std::string out;
  bool no_exact = false;
};

int cmd_nulltable(const NullTableFlags& flags, int threads, Format format) {
  partest::NullTableMeta meta;
  meta.problem = flag([&] { return partest::parse_problem(flags.problem); });
  if (meta.problem == partest::Problem::kKSample) {
    if (flags.groups.empty()) throw UsageError("--groups is required for ksample tables");
    meta.group_sizes = parse_groups(flags.groups);
    meta.n = 0;
    for (int s : meta.group_sizes) meta.n += s;
    meta.family = flag([&] { return partest::parse_family(flags.family.empty() ? "sum" : flags.family); });
  } else {
    if (flags.n < 2) throw UsageError("--n is required for independence tables");
    meta.n = flags.n;
    meta.family = flag([&] { return partest::parse_family(flags.family.empty() ? "adp" : flags.family); });
  }
  meta.score = flag([&] { return partest::parse_score_kind(flags.score); });
  if (flags.m_max > 0) {
    meta.m_max = flags.m_max;
  } else if (meta.problem == partest::Problem::kKSample) {
    meta.m_max = std::max(2, meta.n / 2);
  } else {
    meta.m_max = std::max(2, static_cast<int>(std::floor(std::sqrt(meta.n))));
  }
  meta.replicates = flags.replicates;
  meta.seed = flags.seed;
  partest::GenerationOptions options;
  options.threads = threads;
  options.allow_exact = !flags.no_exact;
  const partest::NullTable table = partest::generate_null_table(meta, options);
  partest::write_null_table(table, flags.out);
  if (format == Format::kJsonLines) {
    json record = meta_json(table.meta());
    record["path"] = flags.out;
    std::cout << record.dump() << '\n';
  } else if (format == Format::kTsv) {
    std::cout << "path\tproblem\tfamily\tscore\tN\tm_max\tB\tseed\texact\n"
              << flags.out << '\t' << partest::to_string(table.meta().problem) << '\t'
              << partest::to_string(table.meta().family) << '\t'
              << partest::to_string(table.meta().score) << '\t' << table.meta().n << '\t'
              << table.meta().m_max << '\t' << table.replicates() << '\t' << table.meta().seed
              << '\t' << (table.meta().exact ? 1 : 0) << '\n';
  } else {
    std::cout << "wrote " << flags.out << "\n" << meta_line(table.meta()) << '\n';
  }
  return kOk;
}

struct TestFlags {
  std::string table;
  std::string input;
  std::string combine = "minp";
  std::string prior = "poisson";
  std::string family;
  std::string score;
  std::uint64_t tie_seed = 0;
};

int cmd_test(const TestFlags& flags, int threads, Format format) {
  const partest::NullTable table = partest::read_null_table(flags.table);
  const auto& meta = table.meta();
  const auto kind = flag([&] { return partest::parse_combine_kind(flags.combine); });
  const auto prior = flag([&] { return partest::parse_prior(flags.prior); });
  std::optional<partest::Family> family;
  std::optional<partest::ScoreKind> score;
  if (!flags.family.empty()) family = flag([&] { return partest::parse_family(flags.family); });
  if (!flags.score.empty()) {
    score = flag([&] { return partest::parse_score_kind(flags.score); });
  }

  const auto data = read_input(flags.input);
  partest::TestResult result;
  if (meta.problem == partest::Problem::kKSample) {
    const auto labelled = partest::tools::to_labelled(data);
    partest::check_compatible(meta, partest::Problem::kKSample,
                              static_cast<int>(labelled.values.size()), labelled.group_sizes,
                              family, score);
    const auto sample = partest::make_grouped_sample(
        labelled.labels, partest::rank_with_random_ties(labelled.values, flags.tie_seed));
    result = partest::run_test(sample, table, kind, prior);
  } else {
    const auto paired = partest::tools::to_paired(data);
    partest::check_compatible(meta, partest::Problem::kIndependence,
                              static_cast<int>(paired.x.size()), {}, family, score);
    const auto x = partest::rank_with_random_ties(paired.x, flags.tie_seed);
    const auto y = partest::rank_with_random_ties(paired.y, flags.tie_seed + 1);
    result = partest::run_test(x, y, table, kind, prior, partest::resolve_threads(threads));
  }

  switch (format) {
    case Format::kJsonLines: {
      json record = meta_json(meta);
      record["combine"] = partest::to_string(kind);
      if (kind == partest::CombineKind::kPenalized) record["prior"] = partest::to_string(prior);
      record["statistics"] = result.statistics;
      record["p_values"] = result.p_values;
      record["combined"] = result.combined;
      record["p_value"] = result.final_p_value;
      std::cout << record.dump() << '\n';
      break;
    }
    case Format::kTsv:
      std::cout << "m\tstatistic\tp_value\n";
      for (std::size_t j = 0; j < result.p_values.size(); ++j) {
        std::cout << j + 2 << '\t' << format_number(result.statistics[j]) << '\t'
                  << format_number(result.p_values[j]) << '\n';
      }
      std::cout << partest::to_string(kind) << '\t' << format_number(result.combined) << '\t'
                << format_number(result.final_p_value) << '\n';
      break;
    case Format::kText:
      std::cout << meta_line(meta) << '\n';
      std::cout << "m\tstatistic\tp_value\n";
      for (std::size_t j = 0; j < result.p_values.size(); ++j) {
        std::cout << j + 2 << '\t' << format_number(result.statistics[j]) << '\t'
                  << format_number(result.p_values[j]) << '\n';
      }
      std::cout << "combined (" << partest::to_string(kind) << "): "
                << format_number(result.combined) << '\n';
      std::cout << "p-value: " << format_number(result.final_p_value) << '\n';
      break;
  }
  return kOk;
}

struct MiFlags {
  std::string input;
  std::string estimator = "adp";
  int m = 0;
  bool miller_madow = false;
  std::uint64_t tie_seed = 0;
};

int cmd_mi(const MiFlags& flags, int threads, Format format) {
  const auto data = read_input(flags.input);
  const int n = static_cast<int>(data.second.size());
  if (flags.m < 2 || flags.m > n) {
    throw std::invalid_argument("m must be in [2, N] (N = " + std::to_string(n) + ")");
  }
  threads = partest::resolve_threads(threads);
  partest::MIEstimate plain, corrected;
  bool has_corrected = flags.miller_madow;
  if (flags.estimator == "ksample") {
    const auto labelled = partest::tools::to_labelled(data);
    const auto sample = partest::make_grouped_sample(
        labelled.labels, partest::rank_with_random_ties(labelled.values, flags.tie_seed));
    plain = partest::mi_ksample(sample, flags.m);
    has_corrected = false;
  } else {
    const auto paired = partest::tools::to_paired(data);
    const auto x = partest::rank_with_random_ties(paired.x, flags.tie_seed);
    const auto y = partest::rank_with_random_ties(paired.y, flags.tie_seed + 1);
    auto estimate = [&](bool correct) {
      if (flags.estimator == "adp") return partest::mi_adp(x, y, flags.m, correct, threads);
      if (flags.estimator == "ddp") return partest::mi_ddp(x, y, flags.m, correct, threads);
      if (flags.estimator == "histogram") return partest::mi_histogram(x, y, flags.m, correct);
      throw UsageError("unknown estimator: " + flags.estimator);
    };
    plain = estimate(false);
    if (has_corrected) corrected = estimate(true);
  }

  switch (format) {
    case Format::kJsonLines: {
      json record = {{"estimator", partest::to_string(plain.estimator)},
                     {"m", plain.m},
                     {"n", plain.n},
                     {"value", plain.value}};
      record["miller_madow_value"] = has_corrected ? json(corrected.value) : json(nullptr);
      std::cout << record.dump() << '\n';
      break;
    }
    case Format::kTsv:
      std::cout << "estimator\tm\tN\tvalue\tmiller_madow_value\n"
                << partest::to_string(plain.estimator) << '\t' << plain.m << '\t' << plain.n
                << '\t' << format_number(plain.value) << '\t'
                << (has_corrected ? format_number(corrected.value) : "") << '\n';
      break;
    case Format::kText:
      std::cout << "estimator " << partest::to_string(plain.estimator) << "  m " << plain.m
                << "  N " << plain.n << '\n'
                << "MI (nats): " << format_number(plain.value) << '\n';
      if (has_corrected) {
        std::cout << "MI with Miller-Madow (nats): " << format_number(corrected.value) << '\n';
      }
      break;
  }
  return kOk;
}

struct SimulateFlags {
  std::string scenario;
  std::string params_file;
  int n = 100;
  std::string groups;
  std::string table;
  int replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string combine = "minp";
  std::string prior = "poisson";
  std::string per_m;
  bool emit = false;
  long replicate = 0;
};

int cmd_simulate(const SimulateFlags& flags, int threads, Format format) {
  partest::ScenarioSpec spec;
  if (!flags.params_file.empty()) {
    if (!std::ifstream(flags.params_file)) {
      throw partest::TableIoError("cannot open " + flags.params_file);
    }
    spec = flag([&] { return partest::load_scenario_file(flags.params_file, flags.n); });
  } else if (!flags.scenario.empty()) {
    spec = flag([&] { return partest::make_scenario(flags.scenario, flags.n); });
  } else {
    throw UsageError("give --scenario or --params-file");
  }
  if (!flags.groups.empty()) {
    if (spec.problem != partest::Problem::kKSample) {
      throw UsageError("--groups applies to two-sample scenarios only");
    }
    spec.group_sizes = parse_groups(flags.groups);
  }
  spec.replicates = flags.replicates;
  spec.alpha = flags.alpha;
  spec.seed = flags.seed;
  flag([&] { spec.validate(); return 0; });

  if (flags.emit) {
    const auto data = partest::generate_scenario(spec, flags.replicate);
    std::cout.precision(17);
    if (spec.problem == partest::Problem::kKSample) {
      std::cout << "# label\tvalue\n";
      for (std::size_t i = 0; i < data.y.size(); ++i) {
        std::cout << data.labels[i] << '\t' << data.y[i] << '\n';
      }
    } else {
      std::cout << "# x\ty\n";
      for (std::size_t i = 0; i < data.y.size(); ++i) {
        std::cout << data.x[i] << '\t' << data.y[i] << '\n';
      }
    }
    return kOk;
  }

  if (flags.table.empty()) throw UsageError("--table is required unless --emit is given");
  const partest::NullTable table = partest::read_null_table(flags.table);
  const auto kind = flag([&] { return partest::parse_combine_kind(flags.combine); });
  const auto prior = flag([&] { return partest::parse_prior(flags.prior); });
  const auto report = partest::power_study(spec, table, kind, prior, threads);

  if (!flags.per_m.empty()) {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (flags.per_m != "-") {
      file.open(flags.per_m);
      if (!file) throw partest::TableIoError("cannot open " + flags.per_m);
      out = &file;
    }
    *out << "m\trate\tse\n";
    for (std::size_t j = 0; j < report.per_m_rates.size(); ++j) {
      *out << j + 2 << '\t' << format_number(report.per_m_rates[j]) << '\t'
           << format_number(report.per_m_standard_errors[j]) << '\n';
    }
  }

  switch (format) {
    case Format::kJsonLines: {
      json record = {{"scenario", spec.name},
                     {"n", spec.n},
                     {"replicates", report.replicates},
                     {"alpha", report.alpha},
                     {"combine", partest::to_string(kind)},
                     {"rate", report.rejection_rate},
                     {"se", report.standard_error},
                     {"per_m_rates", report.per_m_rates}};
      std::cout << record.dump() << '\n';
      break;
    }
    case Format::kTsv:
      std::cout << "scenario\tN\treplicates\talpha\tcombine\trate\tse\n"
                << spec.name << '\t' << spec.n << '\t' << report.replicates << '\t'
                << report.alpha << '\t' << partest::to_string(kind) << '\t'
                << format_number(report.rejection_rate) << '\t'
                << format_number(report.standard_error) << '\n';
      break;
    case Format::kText:
      std::cout << "scenario " << spec.name << "  N " << spec.n << "  replicates "
                << report.replicates << "  alpha " << report.alpha << "  combine "
                << partest::to_string(kind) << '\n'
                << "rejection rate: " << format_number(report.rejection_rate) << " +/- "
                << format_number(report.standard_error) << '\n';
      break;
  }
  return kOk;
}

constexpr const char* kFormatHelp = R"(Output formats (--format):
  text        human-readable summary
  tsv         header row plus data rows
                nulltable: path problem family score N m_max B seed exact
                test:      m statistic p_value, one row per m, then
                           <combine> <combined statistic> <final p-value>
                mi:        estimator m N value miller_madow_value
                simulate:  scenario N replicates alpha combine rate se
  json-lines  one JSON object per invocation with the same fields
Input data: TSV, `label<TAB>value` (ksample) or `x<TAB>y` (independence);
lines starting with '#' are ignored. '-' reads standard input.
Exit codes: 0 ok, 1 usage, 2 table incompatible, 3 I/O or malformed input,
4 numeric contract violation.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-based permutation tests with reusable null tables"};
  app.footer(kFormatHelp);
  app.require_subcommand(1);
  int threads = 0;
  std::string format_text = "text";
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--format", format_text, "text, tsv or json-lines")
      ->check(CLI::IsMember({"text", "tsv", "json-lines"}))
      ->capture_default_str();

  NullTableFlags nt;
  auto* nulltable = app.add_subcommand("nulltable", "Generate a null table (.pnt)");
  nulltable->add_option("--problem", nt.problem, "ksample or independence")
      ->check(CLI::IsMember({"ksample", "independence"}))
      ->capture_default_str();
  nulltable->add_option("--groups", nt.groups, "Group sizes, e.g. 50,50 (ksample)");
  nulltable->add_option("--n", nt.n, "Sample size (independence)");
  nulltable->add_option("--family", nt.family, "sum|max (ksample) or adp|ddp (independence)");
  nulltable->add_option("--score", nt.score, "lr or pearson")->capture_default_str();
  nulltable->add_option("--m-max", nt.m_max,
                        "Largest m (default N/2 for ksample, floor(sqrt N) otherwise)");
  nulltable->add_option("--B", nt.replicates, "Monte Carlo replicates")->capture_default_str();
  nulltable->add_option("--seed", nt.seed, "Master seed")->capture_default_str();
  nulltable->add_option("--out", nt.out, "Output path")->required();
  nulltable->add_flag("--no-exact", nt.no_exact, "Never switch to full enumeration");

  TestFlags tf;
  auto* test = app.add_subcommand("test", "Test a dataset against a null table");
  test->add_option("--table", tf.table, "Null table path")->required();
  test->add_option("--input", tf.input, "Data TSV path or -")->required();
  test->add_option("--combine", tf.combine, "minp, fisher or penalized")
      ->check(CLI::IsMember({"minp", "fisher", "penalized"}))
      ->capture_default_str();
  test->add_option("--prior", tf.prior, "poisson, binomial:p, uniform:K or ds:lambda0")
      ->capture_default_str();
  test->add_option("--family", tf.family, "Require this table family");
  test->add_option("--score", tf.score, "Require this table score");
  test->add_option("--tie-seed", tf.tie_seed, "Seed for random tie breaking")
      ->capture_default_str();

  MiFlags mf;
  auto* mi = app.add_subcommand("mi", "Estimate mutual information");
  mi->add_option("--input", mf.input, "Data TSV path or -")->required();
  mi->add_option("--estimator", mf.estimator, "adp, ddp, histogram or ksample")
      ->check(CLI::IsMember({"adp", "ddp", "histogram", "ksample"}))
      ->capture_default_str();
  mi->add_option("--m", mf.m, "Cells per axis")->required();
  mi->add_flag("--miller-madow", mf.miller_madow, "Also report the Miller-Madow value");
  mi->add_option("--tie-seed", mf.tie_seed, "Seed for random tie breaking")
      ->capture_default_str();

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Power and level studies");
  simulate->add_option("--scenario", sf.scenario,
                       "gauss-shift, gauss-scale, gauss-shift-scale, null-equal, "
                       "null-uniform or appendixD-mixture");
  simulate->add_option("--params-file", sf.params_file, "key=value scenario file");
  simulate->add_option("--n", sf.n, "Sample size")->capture_default_str();
  simulate->add_option("--groups", sf.groups, "Group sizes (two-sample scenarios)");
  simulate->add_option("--table", sf.table, "Null table path");
  simulate->add_option("--replicates", sf.replicates, "Simulated datasets")
      ->capture_default_str();
  simulate->add_option("--alpha", sf.alpha, "Significance level")->capture_default_str();
  simulate->add_option("--seed", sf.seed, "Data seed")->capture_default_str();
  simulate->add_option("--combine", sf.combine, "minp, fisher or penalized")
      ->check(CLI::IsMember({"minp", "fisher", "penalized"}))
      ->capture_default_str();
  simulate->add_option("--prior", sf.prior, "Prior for --combine penalized")
      ->capture_default_str();
  simulate->add_option("--per-m", sf.per_m, "Write per-m rates as TSV to this path (- = stdout)");
  simulate->add_flag("--emit", sf.emit, "Print one generated dataset as TSV and exit");
  simulate->add_option("--replicate", sf.replicate, "Replicate index for --emit")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const Format format = parse_format(format_text);
    if (*nulltable) return cmd_nulltable(nt, threads, format);
    if (*test) return cmd_test(tf, threads, format);
    if (*mi) return cmd_mi(mf, threads, format);
    if (*simulate) return cmd_simulate(sf, threads, format);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const partest::TableIncompatible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIncompatible;
  } catch (const partest::TableIoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
