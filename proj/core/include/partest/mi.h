#ifndef PARTEST_MI_H_
#define PARTEST_MI_H_

#include <string_view>

#include "partest/ranking.h"

namespace partest {

enum class MIEstimator { kAdp, kDdp, kHistogram, kKSample };

std::string_view to_string(MIEstimator estimator);

// Mutual information estimate in nats.
struct MIEstimate {
  double value = 0.0;
  MIEstimator estimator = MIEstimator::kAdp;
  int m = 0;
  int n = 0;
  bool miller_madow = false;
};

// Miller-Madow corrected plug-in MI from the nonempty cell counts of a joint
// table and its margins over n observations:
//   plugin - (joint - 1)/(2n) + (x - 1)/(2n) + (y - 1)/(2n).
double miller_madow(double plugin_mi, double nonempty_joint, double nonempty_x,
                    double nonempty_y, int n);

// Average plug-in MI over all m x m ADP partitions,
// S^ADP(LR) / (N C(N-1, m-1)^2). With Miller-Madow each partition's estimate
// is corrected before averaging. Throws unless 2 <= m <= N.
MIEstimate mi_adp(const RankedSample& x, const RankedSample& y, int m,
                  bool miller_madow = false, int threads = 1);

// Average plug-in MI over all m x m DDP partitions, each table holding the
// N - m + 1 points off its cut lines: S^DDP(LR) / ((N - m + 1) C(N, m-1)).
MIEstimate mi_ddp(const RankedSample& x, const RankedSample& y, int m,
                  bool miller_madow = false, int threads = 1);

// Plug-in MI of the single m x m partition with equal-count bins on each
// axis (rank r falls in bin floor((r - 1) m / N)).
MIEstimate mi_histogram(const RankedSample& x, const RankedSample& y, int m,
                        bool miller_madow = false);

// K-sample analogue S_m(LR) / (N C(N-1, m-1)).
MIEstimate mi_ksample(const GroupedSample& sample, int m);

}  // namespace partest

#endif  // PARTEST_MI_H_
