#include "cvtest/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace cvtest {

WeightFn::WeightFn(double lower, double upper, double ramp)
    : lower_(lower), upper_(upper), ramp_(ramp) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !std::isfinite(ramp)) {
    throw std::invalid_argument("weight bounds must be finite");
  }
  if (!(lower < upper)) {
    throw std::invalid_argument("weight requires lower < upper");
  }
  if (!(ramp > 0.0)) {
    throw std::invalid_argument("weight ramp must be positive");
  }
  if (2.0 * ramp > upper - lower) {
    throw std::invalid_argument("weight ramps overlap: 2 * ramp > upper - lower");
  }
}

WeightFn WeightFn::covering(double lo, double hi, double ramp) {
  return WeightFn(lo - ramp, hi + ramp, ramp);
}

}  // namespace cvtest
