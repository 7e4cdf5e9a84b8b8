// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "partest/hhg.h"
#include "partest/independence.h"
#include "partest/ksample.h"
#include "partest/mi.h"
#include "partest/nulltable.h"
#include "partest/oracle.h"
#include "partest/parallel.h"
#include "partest/ranking.h"
#include "partest/rng.h"
#include "partest/simulate.h"

namespace {

using namespace partest;

const int kThreads = resolve_threads(0);

bool close(double actual, double expected, double tolerance) {
  return std::abs(actual - expected) <= tolerance * std::max(1.0, std::abs(expected));
}

std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 1);
  rng.shuffle(std::span<int>(p));
  return p;
}

std::string scientific(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2e", value);
  return buffer;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = check();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  failures += !outcome.pass;
  std::printf("%s %d %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", id, name.c_str(),
              outcome.detail.c_str(), seconds);
  std::fflush(stdout);
}

Outcome ksample_oracle() {
  Rng rng(101);
  long compared = 0;
  double worst = 0.0;
  for (int instance = 0; instance < 500; ++instance) {
    const int k = 2 + static_cast<int>(rng.below(2));
    const int n = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(13 - k)));
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i < k ? i + 1 : 1 + static_cast<int>(rng.below(k));
    rng.shuffle(std::span<int>(labels));
    const GroupedSample sample =
        make_grouped_sample(labels, ranked_from_permutation(random_permutation(rng, n)));
    for (ScoreKind score : {ScoreKind::kLikelihoodRatio, ScoreKind::kPearson}) {
      const KSampleStatistics sums = ksample_sum_all_m(sample, score, n);
      const KSampleStatistics maxima = ksample_max_all_m(sample, score, n);
      for (int m = 2; m <= n; ++m) {
        const oracle::Aggregate truth = oracle::ksample(sample, score, m);
        for (auto [fast, slow] : {std::pair{sums.at(m), truth.sum},
                                  std::pair{maxima.at(m), truth.max}}) {
          const double err = std::abs(fast - slow) / std::max(1.0, std::abs(slow));
          worst = std::max(worst, err);
          ++compared;
        }
      }
    }
  }
  return {worst <= 1e-10, std::to_string(compared) + " values, worst relative error " +
                              scientific(worst)};
}

Outcome independence_oracle() {
  Rng rng(202);
  long compared = 0;
  double worst = 0.0;
  auto track = [&](double fast, double slow) {
    worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
    ++compared;
  };
  for (int instance = 0; instance < 200; ++instance) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const RankedSample x = ranked_from_permutation(random_permutation(rng, n));
    const RankedSample y = ranked_from_permutation(random_permutation(rng, n));
    const int m_max = std::min(5, n);
    for (ScoreKind score : {ScoreKind::kLikelihoodRatio, ScoreKind::kPearson}) {
      const IndependenceStatistics adp = adp_sum_all_m(x, y, score, m_max);
      const IndependenceStatistics ddp = ddp_sum_all_m(x, y, score, m_max);
      for (int m = 2; m <= m_max; ++m) {
        track(adp.at(m), oracle::adp(x, y, score, m).sum);
        track(ddp.at(m), oracle::ddp(x, y, score, m).sum);
        if (m <= 4) track(ddp_max(x, y, score, m), oracle::ddp(x, y, score, m).max);
      }
      track(adp_max_2x2(x, y, score), oracle::adp(x, y, score, 2).max);
    }
  }
  return {worst <= 1e-10, std::to_string(compared) + " values, worst relative error " +
                              scientific(worst)};
}

Outcome hhg_oracle() {
  Rng rng(303);
  double worst = 0.0;
  int with_ties = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const int n = 3 + static_cast<int>(rng.below(48));
    const bool ties = instance % 2 == 0;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      if (ties) {
        x[i] = static_cast<double>(rng.below(6));
        y[i] = std::floor(x[i] / 2.0) + static_cast<double>(rng.below(3));
      } else {
        x[i] = rng.normal();
        y[i] = x[i] * x[i] + 0.5 * rng.normal();
      }
    }
    with_ties += ties;
    const double fast = hhg_univariate(x, y);
    const double slow = oracle::hhg(x, y);
    worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
  }
  return {worst <= 1e-9, "50 datasets (" + std::to_string(with_ties) +
                             " with ties), worst relative error " + scientific(worst)};
}

NullTable two_sample_table(int n, std::uint64_t seed) {
  NullTableMeta meta;
  meta.problem = Problem::kKSample;
  meta.family = Family::kSum;
  meta.score = ScoreKind::kLikelihoodRatio;
  meta.n = n;
  meta.group_sizes = {n / 2, n - n / 2};
  meta.m_max = 29;
  meta.replicates = 10000;
  meta.seed = seed;
  return generate_null_table(meta, {.threads = kThreads, .allow_exact = false});
}

std::string rate_text(const PowerReport& r) {
  char buffer[96];
  std::snprintf(buffer, sizeof buffer, "%.4f (se %.4f, R=%d)", r.rejection_rate,
                r.standard_error, r.replicates);
  return buffer;
}

PowerReport study(const std::string& scenario, int n, int replicates, const NullTable& table,
                  std::uint64_t seed) {
  ScenarioSpec spec = make_scenario(scenario, n);
  spec.replicates = replicates;
  spec.seed = seed;
  return power_study(spec, table, CombineKind::kMinP, {}, kThreads);
}

Outcome level(const NullTable& table) {
  const PowerReport r = study("null-equal", 100, 2000, table, 11);
  return {r.rejection_rate >= 0.037 && r.rejection_rate <= 0.065,
          "rejection rate " + rate_text(r) + ", target [0.037, 0.065]"};
}

Outcome power(const NullTable& table) {
  const PowerReport shift = study("gauss-shift", 100, 1000, table, 12);
  const PowerReport scale = study("gauss-scale", 100, 1000, table, 13);
  const bool pass = std::abs(shift.rejection_rate - 0.58) <= 0.06 &&
                    std::abs(scale.rejection_rate - 0.59) <= 0.06;
  return {pass, "gauss-shift " + rate_text(shift) + " vs 0.58, gauss-scale " + rate_text(scale) +
                    " vs 0.59, tolerance 0.06"};
}

Outcome mi_benchmark() {
  const ScenarioSpec spec = make_scenario("appendixD-mixture", 300);
  double adp = 0.0, histogram = 0.0, ddp = 0.0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    const Dataset data = generate_scenario(spec, r);
    const RankedSample x = rank_with_random_ties(data.x, derive_seed(5, r));
    const RankedSample y = rank_with_random_ties(data.y, derive_seed(6, r));
    adp += mi_adp(x, y, 15, true, kThreads).value / reps;
    histogram += mi_histogram(x, y, 15, true).value / reps;
    ddp += mi_ddp(x, y, 15, true, kThreads).value / reps;
  }
  const bool pass = adp >= 0.27 && adp <= 0.32 && histogram >= 0.29 && histogram <= 0.34 &&
                    ddp >= 0.27 && ddp <= 0.33;
  char buffer[200];
  std::snprintf(buffer, sizeof buffer,
                "ADP %.4f in [0.27, 0.32], histogram %.4f in [0.29, 0.34], DDP %.4f in "
                "[0.27, 0.33]",
                adp, histogram, ddp);
  return {pass, buffer};
}

Outcome properties() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };
  Rng rng(707);

  // Refinement: splitting a cell never lowers the partition score.
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 6 + static_cast<int>(rng.below(20));
    std::vector<int> ordered(n);
    for (int i = 0; i < n; ++i) ordered[i] = i < 2 ? i : static_cast<int>(rng.below(2));
    rng.shuffle(std::span<int>(ordered));
    for (ScoreKind score : {ScoreKind::kLikelihoodRatio, ScoreKind::kPearson}) {
      KSampleEngine engine({static_cast<int>(std::count(ordered.begin(), ordered.end(), 0)),
                            static_cast<int>(std::count(ordered.begin(), ordered.end(), 1))},
                           score, 2);
      engine.sum_all_m(ordered);
      const int cut = 1 + static_cast<int>(rng.below(n - 1));
      const int split = 1 + static_cast<int>(rng.below(n - 1));
      std::vector<int> coarse{0, cut, n};
      std::vector<int> fine{0, cut, split, n};
      std::sort(fine.begin(), fine.end());
      fine.erase(std::unique(fine.begin(), fine.end()), fine.end());
      auto total = [&](const std::vector<int>& bounds) {
        double t = 0.0;
        for (std::size_t i = 1; i < bounds.size(); ++i) t += engine.cell(bounds[i - 1] + 1, bounds[i]);
        return t;
      };
      expect(total(fine) >= total(coarse) - 1e-12 * std::max(1.0, total(coarse)),
             "refinement monotonicity");
    }
  }

  // Best m-cell LR score grows with m.
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 10 + static_cast<int>(rng.below(40));
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i < 3 ? i + 1 : 1 + static_cast<int>(rng.below(3));
    const GroupedSample sample =
        make_grouped_sample(labels, ranked_from_permutation(random_permutation(rng, n)));
    const KSampleStatistics maxima = ksample_max_all_m(sample, ScoreKind::kLikelihoodRatio, n);
    for (int m = 3; m <= n; ++m) {
      expect(maxima.at(m) >= maxima.at(m - 1) - 1e-12 * std::max(1.0, maxima.at(m - 1)),
             "LR maximum nondecreasing in m");
    }
  }

  // Monotone transforms leave every statistic bit-identical.
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30;
    std::vector<double> x(n), y(n), tx(n), ty(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = x[i] + rng.normal();
      tx[i] = std::exp(x[i]) * 3.0 + 1.0;
      ty[i] = std::atan(y[i]);
      labels[i] = 1 + i % 2;
    }
    const RankedSample rx = rank_with_random_ties(x, 1), ry = rank_with_random_ties(y, 2);
    const RankedSample rtx = rank_with_random_ties(tx, 1), rty = rank_with_random_ties(ty, 2);
    for (ScoreKind score : {ScoreKind::kLikelihoodRatio, ScoreKind::kPearson}) {
      expect(adp_sum_all_m(rx, ry, score, 5).values == adp_sum_all_m(rtx, rty, score, 5).values,
             "ADP transform invariance");
      expect(ddp_sum_all_m(rx, ry, score, 5).values == ddp_sum_all_m(rtx, rty, score, 5).values,
             "DDP transform invariance");
      expect(ksample_sum_all_m(make_grouped_sample(labels, ry), score, 15).values ==
                 ksample_sum_all_m(make_grouped_sample(labels, rty), score, 15).values,
             "K-sample transform invariance");
    }
    expect(hhg_univariate(rx, ry) == hhg_univariate(rtx, rty), "rank HHG transform invariance");
  }

  // Swapping the roles of x and y.
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + static_cast<int>(rng.below(25));
    const RankedSample x = ranked_from_permutation(random_permutation(rng, n));
    const RankedSample y = ranked_from_permutation(random_permutation(rng, n));
    for (ScoreKind score : {ScoreKind::kLikelihoodRatio, ScoreKind::kPearson}) {
      const auto a = adp_sum_all_m(x, y, score, 5), b = adp_sum_all_m(y, x, score, 5);
      const auto c = ddp_sum_all_m(x, y, score, 5), d = ddp_sum_all_m(y, x, score, 5);
      for (int m = 2; m <= 5; ++m) {
        expect(close(a.at(m), b.at(m), 1e-10), "ADP x/y symmetry");
        expect(close(c.at(m), d.at(m), 1e-10), "DDP x/y symmetry");
      }
    }
  }

  // Table bytes do not depend on the thread count.
  for (const auto& [problem, family] : {std::pair{Problem::kKSample, Family::kSum},
                                        std::pair{Problem::kKSample, Family::kMax},
                                        std::pair{Problem::kIndependence, Family::kAdp},
                                        std::pair{Problem::kIndependence, Family::kDdp}}) {
    NullTableMeta meta;
    meta.problem = problem;
    meta.family = family;
    meta.n = 24;
    if (problem == Problem::kKSample) meta.group_sizes = {8, 8, 8};
    meta.m_max = 5;
    meta.replicates = 300;
    meta.seed = 99;
    std::ostringstream one, four;
    write_null_table(generate_null_table(meta, {.threads = 1}), one);
    write_null_table(generate_null_table(meta, {.threads = 4}), four);
    expect(one.str() == four.str(), "table determinism across threads");
  }

  // Exact tables: each row's own p-value is its upper rank ratio.
  for (const auto& [problem, family, n] :
       {std::tuple{Problem::kKSample, Family::kSum, 8}, std::tuple{Problem::kKSample, Family::kMax, 7},
        std::tuple{Problem::kIndependence, Family::kAdp, 6},
        std::tuple{Problem::kIndependence, Family::kDdp, 5}}) {
    NullTableMeta meta;
    meta.problem = problem;
    meta.family = family;
    meta.n = n;
    if (problem == Problem::kKSample) meta.group_sizes = {n / 2, n - n / 2};
    meta.m_max = 3;
    meta.replicates = 100;
    const NullTable table = generate_null_table(meta);
    expect(table.meta().exact, "exact mode engaged");
    const long b_count = table.replicates();
    for (int m = 2; m <= 3; ++m) {
      for (long b = 0; b < b_count; ++b) {
        const double v = table.value(b, m);
        long at_least = 0;
        for (long c = 0; c < b_count; ++c) {
          at_least += table.value(c, m) >= v - kTieTolerance * std::max(1.0, std::abs(v));
        }
        if (table.p_value(m, v) != static_cast<double>(at_least) / b_count) {
          expect(false, "exact self p-value equals rank ratio");
          b = b_count;
        }
      }
    }
  }

  std::sort(failed.begin(), failed.end());
  failed.erase(std::unique(failed.begin(), failed.end()), failed.end());
  std::string detail = failed.empty() ? "all properties hold" : "violated:";
  for (const auto& f : failed) detail += " [" + f + "]";
  return {failed.empty(), detail};
}

Outcome consistency(const NullTable& small_table) {
  const NullTable large_table = two_sample_table(200, 21);
  const PowerReport small = study("gauss-scale", 100, 500, small_table, 31);
  const PowerReport large = study("gauss-scale", 200, 500, large_table, 32);
  return {large.rejection_rate - small.rejection_rate >= 0.05,
          "N=100 " + rate_text(small) + ", N=200 " + rate_text(large) + ", required gain 0.05"};
}

}  // namespace

int main() {
  std::printf("acceptance run with %d thread(s)\n", kThreads);
  report(1, "K-sample oracle equivalence", ksample_oracle);
  report(2, "independence oracle equivalence", independence_oracle);
  report(3, "HHG fast path", hhg_oracle);
  const NullTable table = two_sample_table(100, 7);
  report(4, "level control", [&] { return level(table); });
  report(5, "two-sample power", [&] { return power(table); });
  report(6, "MI benchmark", mi_benchmark);
  report(7, "property suite", properties);
  report(8, "consistency smoke check", [&] { return consistency(table); });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
