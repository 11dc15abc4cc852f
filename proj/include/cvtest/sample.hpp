#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cvtest {

/// Paired observations (x_i, y_i). The full pipeline requires at least five
/// observations and finite values; call validate() at entry points. Small or
/// synthetic samples for low-level computations may skip validation.
struct Sample {
  std::vector<double> x;
  std::vector<double> y;

  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }

  /// Throws InputError when lengths differ, n < 5, or any value is not finite.
  void validate() const;
};

/// Smallest and largest value of a nonempty range of finite numbers.
struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double width() const noexcept { return hi - lo; }
};

[[nodiscard]] ValueRange value_range(std::span<const double> v);

}  // namespace cvtest
