#pragma once

#include <cmath>
#include <string>

namespace cvtest {

enum class KernelFamily { epanechnikov, gaussian_truncated };

/// Symmetric second-order smoothing kernel with compact support.
///
///  - epanechnikov:       K(u) = 0.75 (1 - u^2) on [-1, 1]
///  - gaussian_truncated: standard normal density restricted to
///                        [-radius, radius] and renormalized to unit mass
///
/// Scaled evaluation K_h(u) = K(u / h) / h is left to call sites.
class Kernel {
 public:
  [[nodiscard]] static Kernel epanechnikov() {
    return Kernel(KernelFamily::epanechnikov, 1.0);
  }
  [[nodiscard]] static Kernel gaussian_truncated(double support_radius = 4.0);

  [[nodiscard]] double operator()(double u) const noexcept {
    if (family_ == KernelFamily::epanechnikov) {
      const double t = 1.0 - u * u;
      return t > 0.0 ? 0.75 * t : 0.0;
    }
    if (u < -radius_ || u > radius_) return 0.0;
    return norm_ * std::exp(-0.5 * u * u);
  }

  [[nodiscard]] KernelFamily family() const noexcept { return family_; }

  /// K vanishes outside [-support_radius, support_radius].
  [[nodiscard]] double support_radius() const noexcept { return radius_; }

  /// Integral of K(u)^2 (closed form; 3/5 for epanechnikov).
  [[nodiscard]] double squared_l2_norm() const noexcept;

  /// Integral of u^2 K(u) (closed form; 1/5 for epanechnikov).
  [[nodiscard]] double second_moment() const noexcept;

  [[nodiscard]] std::string name() const;

  /// Parses "epanechnikov" or "gaussian-truncated"; throws InputError.
  [[nodiscard]] static Kernel parse(const std::string& name);

 private:
  Kernel(KernelFamily family, double radius);

  KernelFamily family_;
  double radius_;
  double norm_ = 0.0;  // gaussian only: 1 / (sqrt(2 pi) * truncated mass)
};

}  // namespace cvtest
