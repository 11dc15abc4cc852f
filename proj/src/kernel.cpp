#include "cvtest/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2Pi = 2.5066282746310005024;

// Standard normal density.
double phi(double u) { return std::exp(-0.5 * u * u) / kSqrt2Pi; }

// Mass of the standard normal on [-r, r].
double central_mass(double r) { return std::erf(r / kSqrt2); }

}  // namespace

Kernel::Kernel(KernelFamily family, double radius)
    : family_(family), radius_(radius) {
  if (family_ == KernelFamily::gaussian_truncated) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw std::invalid_argument("kernel support radius must be positive and finite");
    }
    norm_ = 1.0 / (kSqrt2Pi * central_mass(radius));
  }
}

Kernel Kernel::gaussian_truncated(double support_radius) {
  return Kernel(KernelFamily::gaussian_truncated, support_radius);
}

double Kernel::squared_l2_norm() const noexcept {
  if (family_ == KernelFamily::epanechnikov) return 0.6;
  // (1/Z^2) * int_{-r}^{r} phi(u)^2 du with Z the truncated mass;
  // phi(u)^2 integrates to erf(r) / (2 sqrt(pi)).
  const double z = central_mass(radius_);
  return std::erf(radius_) / (2.0 * kSqrtPi * z * z);
}

double Kernel::second_moment() const noexcept {
  if (family_ == KernelFamily::epanechnikov) return 0.2;
  // int u^2 phi = Z - 2 r phi(r) on [-r, r]; normalize by Z.
  const double z = central_mass(radius_);
  return 1.0 - 2.0 * radius_ * phi(radius_) / z;
}

std::string Kernel::name() const {
  return family_ == KernelFamily::epanechnikov ? "epanechnikov"
                                               : "gaussian-truncated";
}

Kernel Kernel::parse(const std::string& name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "gaussian-truncated" || name == "gaussian") {
    return gaussian_truncated();
  }
  throw InputError("unknown kernel '" + name +
                   "' (expected epanechnikov or gaussian-truncated)");
}

}  // namespace cvtest
