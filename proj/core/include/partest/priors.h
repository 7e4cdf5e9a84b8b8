#ifndef PARTEST_PRIORS_H_
#define PARTEST_PRIORS_H_

#include <string>
#include <string_view>

#include "partest/binomial.h"

namespace partest {

// Prior on the partition size m used by the penalized statistics.
struct PriorSpec {
  enum class Kind {
    kPoissonSqrtN,  // pi(m) = e^{-sqrt N} sqrt(N)^m / m!
    kBinomial,      // pi(m) = C(N-1, m-1) p^m (1-p)^(N-m)
    kUniform,       // pi(m) = 1 / levels
    kDS,            // additive penalty -lambda0 * log(N) * (m - 1)
  };

  Kind kind = Kind::kPoissonSqrtN;
  double p = 0.119;
  int levels = 1;
  double lambda0 = 1.0;

  static PriorSpec poisson_sqrt_n() { return {}; }
  static PriorSpec binomial(double p) { return {Kind::kBinomial, p, 1, 1.0}; }
  static PriorSpec uniform(int levels) { return {Kind::kUniform, 0.119, levels, 1.0}; }
  static PriorSpec ds(double lambda0) { return {Kind::kDS, 0.119, 1, lambda0}; }

  // Throws std::invalid_argument for p outside (0,1), lambda0 <= 0 or
  // levels < 1.
  void validate() const;
};

// Text form used on the command line: "poisson", "binomial:0.119",
// "uniform:28", "ds:1.11088".
PriorSpec parse_prior(std::string_view text);
std::string to_string(const PriorSpec& prior);

// log pi(m) for a sample of size n. Not meaningful for kDS.
double log_prior(const PriorSpec& prior, int m, int n, const BinomialTable& binom);

// The additive term applied to the maximum-aggregated score M_m:
// log pi(I | m) + log pi(m) with pi(I | m) = 1 / C(N-1, m-1), or the DS
// penalty for kDS.
double max_penalty(const PriorSpec& prior, int m, int n, const BinomialTable& binom);

// The additive term applied to per-partition average scores: log pi(m), or
// the DS penalty for kDS.
double sum_penalty(const PriorSpec& prior, int m, int n, const BinomialTable& binom);

}  // namespace partest

#endif  // PARTEST_PRIORS_H_
