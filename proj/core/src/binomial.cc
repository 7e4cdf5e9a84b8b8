#include "partest/binomial.h"

#include <stdexcept>
#include <string>

namespace partest {

BinomialTable::BinomialTable(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("binomial table size must be >= 0");
  const std::size_t rows = static_cast<std::size_t>(n) + 1;
  rows_.assign(rows * (rows + 1) / 2, 0.0);
  for (std::size_t u = 0; u < rows; ++u) {
    double* row = &rows_[u * (u + 1) / 2];
    row[0] = 1.0;
    row[u] = 1.0;
    if (u < 2) continue;
    const double* prev = &rows_[(u - 1) * u / 2];
    for (std::size_t v = 1; v < u; ++v) row[v] = prev[v - 1] + prev[v];
  }
}

void BinomialTable::throw_out_of_range(long u) {
  throw std::out_of_range("binomial table queried beyond its size: u = " +
                          std::to_string(u));
}

}  // namespace partest
