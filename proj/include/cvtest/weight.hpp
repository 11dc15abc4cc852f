#pragma once

namespace cvtest {

/// Twice continuously differentiable trimming weight.
///
/// Equals 1 on [lower + ramp, upper - ramp], 0 outside [lower, upper], and
/// joins the two plateaus with the quintic smoothstep, whose first and second
/// derivatives vanish at every joint.
class WeightFn {
 public:
  /// Requires lower < upper, ramp > 0 and 2 * ramp <= upper - lower.
  WeightFn(double lower, double upper, double ramp);

  [[nodiscard]] double operator()(double x) const noexcept {
    if (x <= lower_ || x >= upper_) return 0.0;
    if (x < lower_ + ramp_) return smoothstep((x - lower_) / ramp_);
    if (x > upper_ - ramp_) return smoothstep((upper_ - x) / ramp_);
    return 1.0;
  }

  [[nodiscard]] double lower() const noexcept { return lower_; }
  [[nodiscard]] double upper() const noexcept { return upper_; }
  [[nodiscard]] double ramp() const noexcept { return ramp_; }

  /// A weight that equals exactly 1 on [lo, hi] (support padded by ramp on
  /// each side). Convenient when no trimming inside the data range is wanted.
  [[nodiscard]] static WeightFn covering(double lo, double hi, double ramp);

 private:
  [[nodiscard]] static double smoothstep(double t) noexcept {
    // 10 t^3 - 15 t^4 + 6 t^5 on [0, 1]; C^2 at both ends.
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  }

  double lower_;
  double upper_;
  double ramp_;
};

}  // namespace cvtest
