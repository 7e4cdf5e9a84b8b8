#include "partest/rng.h"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

namespace partest {

// Inverse-CDF transform: Phi^{-1}(u) = -sqrt(2) * erfc^{-1}(2u).
double Rng::normal() {
  const double u = uniform();
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

}  // namespace partest
