#include "partest/priors.h"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace partest {

void PriorSpec::validate() const {
  switch (kind) {
    case Kind::kBinomial:
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binomial prior needs 0 < p < 1");
      break;
    case Kind::kUniform:
      if (levels < 1) throw std::invalid_argument("uniform prior needs at least one level");
      break;
    case Kind::kDS:
      if (!(lambda0 > 0.0)) throw std::invalid_argument("DS penalty needs lambda0 > 0");
      break;
    case Kind::kPoissonSqrtN:
      break;
  }
}

namespace {

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument("bad prior parameter: " + std::string(text));
  }
  return value;
}

}  // namespace

PriorSpec parse_prior(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  PriorSpec prior;
  if (name == "poisson") {
    prior = PriorSpec::poisson_sqrt_n();
  } else if (name == "binomial") {
    prior = PriorSpec::binomial(arg.empty() ? 0.119 : parse_number(arg));
  } else if (name == "uniform") {
    if (arg.empty()) throw std::invalid_argument("uniform prior needs a level count");
    const double levels = parse_number(arg);
    if (levels != std::floor(levels)) throw std::invalid_argument("uniform levels must be an integer");
    prior = PriorSpec::uniform(static_cast<int>(levels));
  } else if (name == "ds") {
    if (arg.empty()) throw std::invalid_argument("DS penalty needs lambda0");
    prior = PriorSpec::ds(parse_number(arg));
  } else {
    throw std::invalid_argument("unknown prior: " + std::string(text));
  }
  prior.validate();
  return prior;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

}  // namespace

std::string to_string(const PriorSpec& prior) {
  switch (prior.kind) {
    case PriorSpec::Kind::kPoissonSqrtN:
      return "poisson";
    case PriorSpec::Kind::kBinomial:
      return "binomial:" + shortest(prior.p);
    case PriorSpec::Kind::kUniform:
      return "uniform:" + std::to_string(prior.levels);
    case PriorSpec::Kind::kDS:
      return "ds:" + shortest(prior.lambda0);
  }
  return "?";
}

double log_prior(const PriorSpec& prior, int m, int n, const BinomialTable& binom) {
  switch (prior.kind) {
    case PriorSpec::Kind::kPoissonSqrtN: {
      const double rate = std::sqrt(static_cast<double>(n));
      return -rate + m * std::log(rate) - std::lgamma(m + 1.0);
    }
    case PriorSpec::Kind::kBinomial:
      return std::log(binom(n - 1, m - 1)) + m * std::log(prior.p) +
             (n - m) * std::log1p(-prior.p);
    case PriorSpec::Kind::kUniform:
      return -std::log(static_cast<double>(prior.levels));
    case PriorSpec::Kind::kDS:
      throw std::logic_error("DS penalty has no prior on m");
  }
  return 0.0;
}

double max_penalty(const PriorSpec& prior, int m, int n, const BinomialTable& binom) {
  prior.validate();
  if (prior.kind == PriorSpec::Kind::kDS) {
    return -prior.lambda0 * std::log(static_cast<double>(n)) * (m - 1);
  }
  return -std::log(binom(n - 1, m - 1)) + log_prior(prior, m, n, binom);
}

double sum_penalty(const PriorSpec& prior, int m, int n, const BinomialTable& binom) {
  prior.validate();
  if (prior.kind == PriorSpec::Kind::kDS) {
    return -prior.lambda0 * std::log(static_cast<double>(n)) * (m - 1);
  }
  return log_prior(prior, m, n, binom);
}

}  // namespace partest
