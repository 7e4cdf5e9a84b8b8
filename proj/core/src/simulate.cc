#include "partest/simulate.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "partest/independence.h"
#include "partest/parallel.h"
#include "partest/rng.h"

namespace partest {

namespace {

struct ShapeInfo {
  const char* name;
  Problem problem;
  std::vector<std::string> required;
};

const std::vector<ShapeInfo>& shapes() {
  static const std::vector<ShapeInfo> table = {
      {"normal-pair", Problem::kKSample, {"shift", "scale"}},
      {"linear", Problem::kIndependence, {"slope", "noise"}},
      {"parabola", Problem::kIndependence, {"curvature", "noise"}},
      {"sine", Problem::kIndependence, {"amplitude", "frequency", "noise"}},
      {"circle", Problem::kIndependence, {"radius", "noise"}},
  };
  return table;
}

const ShapeInfo* find_shape(const std::string& name) {
  for (const ShapeInfo& shape : shapes()) {
    if (name == shape.name) return &shape;
  }
  return nullptr;
}

std::string builtin_list() {
  std::string out;
  for (const std::string& name : builtin_scenarios()) out += (out.empty() ? "" : ", ") + name;
  return out;
}

double param(const ScenarioSpec& spec, const std::string& key) {
  const auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    throw std::invalid_argument("scenario " + spec.name + " needs parameter " + key);
  }
  return it->second;
}

// Draws from N(mean, cov) with cov = [[a, b], [b, c]].
std::pair<double, double> bivariate_normal(Rng& rng, double mx, double my, double a, double b,
                                           double c) {
  const double l11 = std::sqrt(a);
  const double l21 = b / l11;
  const double l22 = std::sqrt(c - l21 * l21);
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return {mx + l11 * z1, my + l21 * z1 + l22 * z2};
}

}  // namespace

std::vector<std::string> builtin_scenarios() {
  return {"gauss-shift", "gauss-scale", "gauss-shift-scale", "null-equal", "null-uniform",
          "appendixD-mixture"};
}

ScenarioSpec make_scenario(const std::string& name, int n) {
  ScenarioSpec spec;
  spec.name = name;
  spec.n = n;
  if (name == "gauss-shift" || name == "gauss-scale" || name == "gauss-shift-scale" ||
      name == "null-equal") {
    spec.problem = Problem::kKSample;
    spec.group_sizes = {n / 2, n - n / 2};
    double shift = 0.0, scale = 1.0;
    if (name == "gauss-shift") shift = 0.5;
    if (name == "gauss-scale") scale = 0.6;
    if (name == "gauss-shift-scale") shift = 0.36, scale = 0.7;
    spec.params = {{"shift", shift}, {"scale", scale}};
  } else if (name == "null-uniform") {
    spec.problem = Problem::kIndependence;
  } else if (name == "appendixD-mixture") {
    spec.problem = Problem::kIndependence;
    spec.params = {{"cov_scale", 0.5}};
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'; built-ins: " +
                                builtin_list());
  }
  return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  ScenarioSpec spec;
  spec.n = n;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("scenario file line " + std::to_string(line_number) +
                                  ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    value.erase(0, value.find_first_not_of(" \t"));
    if (key == "shape") {
      spec.name = value;
      continue;
    }
    double number = 0.0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), number);
    if (result.ec != std::errc() || result.ptr != value.data() + value.size()) {
      throw std::invalid_argument("scenario file line " + std::to_string(line_number) +
                                  ": '" + value + "' is not a number");
    }
    spec.params[key] = number;
  }
  const ShapeInfo* shape = find_shape(spec.name);
  if (!shape) {
    std::string known;
    for (const ShapeInfo& s : shapes()) known += (known.empty() ? "" : ", ") + std::string(s.name);
    throw std::invalid_argument("scenario file needs shape= one of: " + known);
  }
  spec.problem = shape->problem;
  if (spec.problem == Problem::kKSample) spec.group_sizes = {n / 2, n - n / 2};
  spec.validate();
  return spec;
}

void ScenarioSpec::validate() const {
  if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (n < 2) throw std::invalid_argument("N must be at least 2");
  if (problem == Problem::kKSample) {
    if (group_sizes.size() < 2) throw std::invalid_argument("need at least 2 groups");
    for (int s : group_sizes) {
      if (s < 1) throw std::invalid_argument("every group must be nonempty");
    }
    if (std::accumulate(group_sizes.begin(), group_sizes.end(), 0) != n) {
      throw std::invalid_argument("group sizes do not add up to N");
    }
  }
  const bool builtin = name == "gauss-shift" || name == "gauss-scale" ||
                       name == "gauss-shift-scale" || name == "null-equal" ||
                       name == "null-uniform" || name == "appendixD-mixture";
  if (builtin) return;
  const ShapeInfo* shape = find_shape(name);
  if (!shape) {
    throw std::invalid_argument("unknown scenario '" + name + "'; built-ins: " +
                                builtin_list());
  }
  if (shape->problem != problem) throw std::invalid_argument("scenario problem mismatch");
  for (const std::string& key : shape->required) param(*this, key);
}

Dataset generate_scenario(const ScenarioSpec& spec, long replicate) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(replicate)));
  Dataset data;
  data.problem = spec.problem;
  if (spec.problem == Problem::kKSample) {
    if (spec.name == "null-uniform" || spec.name == "appendixD-mixture") {
      throw std::invalid_argument("scenario problem mismatch");
    }
    const double shift = param(spec, "shift");
    const double scale = param(spec, "scale");
    for (std::size_t g = 0; g < spec.group_sizes.size(); ++g) {
      for (int i = 0; i < spec.group_sizes[g]; ++i) {
        const double z = rng.normal();
        data.labels.push_back(static_cast<int>(g) + 1);
        data.y.push_back(g == 0 ? z : shift + scale * z);
      }
    }
    return data;
  }

  data.x.resize(spec.n);
  data.y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    double& x = data.x[i];
    double& y = data.y[i];
    if (spec.name == "null-uniform") {
      x = rng.uniform();
      y = rng.uniform();
    } else if (spec.name == "appendixD-mixture") {
      const double s = param(spec, "cov_scale");
      const bool major = rng.uniform() < 0.8;
      std::tie(x, y) = major ? bivariate_normal(rng, 0.5, 0.5, 0.05 * s, 0.025 * s, 0.05 * s)
                             : bivariate_normal(rng, 0.125, 0.675, 0.01 * s, 0.0, 0.01 * s);
    } else if (spec.name == "linear") {
      x = rng.uniform();
      y = param(spec, "slope") * x + param(spec, "noise") * rng.normal();
    } else if (spec.name == "parabola") {
      x = rng.uniform();
      y = param(spec, "curvature") * (x - 0.5) * (x - 0.5) + param(spec, "noise") * rng.normal();
    } else if (spec.name == "sine") {
      x = rng.uniform();
      y = param(spec, "amplitude") *
              std::sin(2.0 * std::numbers::pi * param(spec, "frequency") * x) +
          param(spec, "noise") * rng.normal();
    } else if (spec.name == "circle") {
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const double radius = param(spec, "radius");
      const double noise = param(spec, "noise");
      x = radius * std::cos(angle) + noise * rng.normal();
      y = radius * std::sin(angle) + noise * rng.normal();
    } else {
      throw std::invalid_argument("unknown scenario '" + spec.name + "'; built-ins: " +
                                  builtin_list());
    }
  }
  return data;
}

GroupedSample grouped_sample(const Dataset& data, std::uint64_t tie_seed) {
  return make_grouped_sample(data.labels, rank_with_random_ties(data.y, tie_seed));
}

PowerReport power_study(const ScenarioSpec& spec, const NullTable& table, CombineKind kind,
                        const PriorSpec& prior, int threads) {
  spec.validate();
  check_compatible(table.meta(), spec.problem, spec.n, spec.group_sizes, std::nullopt,
                   std::nullopt);
  const std::vector<double> null = combined_null_distribution(table, kind, prior);
  const int width = table.m_max() - 1;
  // Per replicate: final rejection flag, then one flag per m.
  std::vector<char> flags(static_cast<std::size_t>(spec.replicates) * (width + 1), 0);
  parallel_for(spec.replicates, resolve_threads(threads), [&](int r) {
    const Dataset data = generate_scenario(spec, r);
    const std::uint64_t tie_seed = derive_seed(spec.seed ^ 0x7469657365656473ULL, r);
    std::vector<double> observed;
    if (spec.problem == Problem::kKSample) {
      observed = arrangement_statistics(table.meta(),
                                        grouped_sample(data, tie_seed).labels_by_rank());
    } else {
      const RankedSample x = rank_with_random_ties(data.x, tie_seed);
      const RankedSample y = rank_with_random_ties(data.y, mix64(tie_seed));
      observed = arrangement_statistics(table.meta(), y_by_x_rank(x, y));
    }
    const TestResult result = run_test(observed, table, kind, null, prior);
    char* out = flags.data() + static_cast<std::size_t>(r) * (width + 1);
    out[0] = result.final_p_value <= spec.alpha;
    for (int j = 0; j < width; ++j) out[j + 1] = result.p_values[j] <= spec.alpha;
  });

  PowerReport report;
  report.replicates = spec.replicates;
  report.alpha = spec.alpha;
  std::vector<long> counts(width + 1, 0);
  for (int r = 0; r < spec.replicates; ++r) {
    for (int j = 0; j <= width; ++j) counts[j] += flags[static_cast<std::size_t>(r) * (width + 1) + j];
  }
  auto rate = [&](long count) { return static_cast<double>(count) / spec.replicates; };
  auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / spec.replicates); };
  report.rejection_rate = rate(counts[0]);
  report.standard_error = se(report.rejection_rate);
  for (int j = 1; j <= width; ++j) {
    report.per_m_rates.push_back(rate(counts[j]));
    report.per_m_standard_errors.push_back(se(report.per_m_rates.back()));
  }
  return report;
}

}  // namespace partest
