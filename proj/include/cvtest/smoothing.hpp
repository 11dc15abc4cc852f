#pragma once

#include <span>
#include <vector>

#include "cvtest/kernel.hpp"
#include "cvtest/sample.hpp"
#include "cvtest/weight.hpp"

namespace cvtest {

/// The three smoothing scales of the test pipeline: h_mean for the mean fit,
/// h_var for the variance fit, g for the pair statistic.
struct Bandwidths {
  double h_mean = 0.0;
  double h_var = 0.0;
  double g = 0.0;

  /// Diagnostic for the regime g = o(h^2) the statistic's calibration
  /// assumes, in units of `scale` (typically range(x)): true when
  /// g/scale <= factor * (h_mean/scale)^2. Informative only, never fatal.
  [[nodiscard]] bool pair_bandwidth_in_regime(double scale,
                                              double factor = 10.0) const noexcept;
};

/// Local linear regression of `response` on `x`, evaluated at each point of
/// `eval`. When `inner_weight` is non-null it multiplies every observation's
/// kernel weight (used by the doubly-weighted pipeline variant).
///
/// Degeneracy policy: at an evaluation point whose 2x2 normal-equation
/// determinant falls below 1e-12 * (sum of kernel weights)^2 * h^4 the fit
/// falls back to the kernel-weighted local mean; if `allow_fallback` is false
/// that raises DegenerateNeighborhood instead. Zero total kernel mass at a
/// point always raises DegenerateNeighborhood.
[[nodiscard]] std::vector<double> local_linear_fit(
    std::span<const double> x, std::span<const double> response,
    std::span<const double> eval, double h, const Kernel& k,
    const WeightFn* inner_weight = nullptr, bool allow_fallback = true);

/// Mean fit evaluated at the sample's own predictors.
[[nodiscard]] std::vector<double> fit_mean(const Sample& s, double h,
                                           const Kernel& k,
                                           const WeightFn* inner_weight = nullptr);

/// Local linear fit of the squared residuals at the sample's own predictors,
/// floored away from zero: max(fit, 1e-8 * var(y), floor_frac * mean(residual^2)),
/// falling back to 1e-12 absolute when y is constant. The baseline floor keeps
/// later divisions by the estimated standard deviation finite; floor_frac > 0
/// additionally stops collapsing local fits from producing near-zero scales
/// (and hence exploding standardized residuals) where the response still has
/// spread.
[[nodiscard]] std::vector<double> fit_variance(const Sample& s,
                                               std::span<const double> residuals,
                                               double h, const Kernel& k,
                                               const WeightFn* inner_weight = nullptr,
                                               double floor_frac = 0.0);

/// Least-squares leave-one-out cross validation of the local linear fit of
/// `response` on s.x over `grid` (must be nonempty and ascending). Grid values
/// where some observation loses all kernel mass once removed are skipped;
/// scores within a small response-scale tolerance count as ties and resolve
/// toward the larger bandwidth. Throws AllBandwidthsDegenerate when every
/// grid value is skipped.
[[nodiscard]] double cv_bandwidth(const Sample& s, std::span<const double> response,
                                  const Kernel& k, std::span<const double> grid,
                                  const WeightFn* inner_weight = nullptr);

/// Log-spaced bandwidth grid between lo_frac and hi_frac of range(x).
[[nodiscard]] std::vector<double> default_bandwidth_grid(
    std::span<const double> x, std::size_t points = 20, double lo_frac = 0.05,
    double hi_frac = 0.5);

/// Mean fit, raw residuals and floored variance fit bundled together.
/// residuals[i] == y[i] - m_hat[i] holds exactly (same subtraction, no
/// re-smoothing in between).
struct SmootherFit {
  std::vector<double> m_hat;
  std::vector<double> sigma2_hat;
  std::vector<double> residuals;
  Bandwidths bandwidths;
};

/// Runs the two-stage smoother with the given bandwidths. `mean_inner` and
/// `var_inner` are the optional inner weights of the doubly-weighted variant;
/// `variance_floor_frac` is passed through to fit_variance.
[[nodiscard]] SmootherFit fit_smoother(const Sample& s, const Bandwidths& bw,
                                       const Kernel& k,
                                       const WeightFn* mean_inner = nullptr,
                                       const WeightFn* var_inner = nullptr,
                                       double variance_floor_frac = 0.0);

/// Standardized residuals: eta_i = residual_i / sqrt(sigma2_hat_i), then
/// (eta_i - mean(eta)) / sd(eta) with the n-1 divisor. The output has mean 0
/// and unit sample standard deviation. Throws ZeroResidualSpread when the
/// eta_i are all equal.
[[nodiscard]] std::vector<double> standardize_residuals(const SmootherFit& fit);

}  // namespace cvtest
