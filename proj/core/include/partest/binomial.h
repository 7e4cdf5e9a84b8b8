#ifndef PARTEST_BINOMIAL_H_
#define PARTEST_BINOMIAL_H_

#include <vector>

namespace partest {

// C(u, v) for 0 <= u, v <= N built by Pascal's rule. Values are doubles:
// exact while they fit in 53 bits, correctly rounded-ish beyond, and finite
// up to N = 1029. Arguments outside the triangle (v < 0, v > u, u < 0)
// yield 0, which is what the partition-counting formulas need.
class BinomialTable {
 public:
  explicit BinomialTable(int n);

  double operator()(long u, long v) const {
    if (u < 0 || v < 0 || v > u) return 0.0;
    if (u > n_) throw_out_of_range(u);
    return rows_[static_cast<std::size_t>(u) * (u + 1) / 2 + v];
  }

  int max_n() const { return n_; }

 private:
  [[noreturn]] static void throw_out_of_range(long u);

  int n_;
  std::vector<double> rows_;  // row u occupies u + 1 entries
};

}  // namespace partest

#endif  // PARTEST_BINOMIAL_H_
