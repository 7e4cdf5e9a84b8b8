#ifndef PARTEST_SRC_KAHAN_H_
#define PARTEST_SRC_KAHAN_H_

namespace partest::detail {

// Compensated (Neumaier) accumulator.
class KahanSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace partest::detail

#endif  // PARTEST_SRC_KAHAN_H_
