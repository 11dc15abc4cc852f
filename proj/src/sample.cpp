#include "cvtest/sample.hpp"

#include <cmath>
#include <string>

#include "cvtest/errors.hpp"

namespace cvtest {

void Sample::validate() const {
  if (x.size() != y.size()) {
    throw InputError("sample columns have different lengths (" +
                     std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 5) {
    throw InputError("need at least 5 observations, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InputError("non-finite value at observation " + std::to_string(i + 1));
    }
  }
}

ValueRange value_range(std::span<const double> v) {
  ValueRange r{v.front(), v.front()};
  for (double t : v) {
    if (t < r.lo) r.lo = t;
    if (t > r.hi) r.hi = t;
  }
  return r;
}

}  // namespace cvtest
