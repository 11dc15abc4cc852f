#pragma once

#include <functional>

#include "cvtest/smoothing.hpp"

namespace cvtest {

/// Everything the statistic-level operations read. `w` is the trimming
/// weight of the plain pipeline. When `w_star` is set, the doubly-weighted
/// variant is in effect: the pair statistic and the scale ratio use w_star
/// (and its cube) instead of w, and `fit` is expected to come from
/// fit_smoother with the matching inner weights (w for the mean stage,
/// w_star for the variance stage).
struct StatisticInput {
  const Sample& sample;
  const SmootherFit& fit;
  double g;
  const Kernel& kernel;
  const WeightFn& w;
  const WeightFn* w_star = nullptr;

  [[nodiscard]] const WeightFn& effective_weight() const noexcept {
    return w_star ? *w_star : w;
  }
};

/// Kernel-weighted pair statistic of the proportionality check. With
/// phi_i = (c2 * y_i^2 - (c2 + 1) * m_hat_i^2) * w(x_i), returns
///
///   (1 / (n (n-1))) * sum_{i != j} K((x_i - x_j) / g) / g * phi_i * phi_j.
///
/// Large values indicate the mean is not proportional to the standard
/// deviation with squared ratio c2. Evaluation prunes pairs outside the
/// kernel support by sorting x once; the result equals the naive double loop
/// up to summation-order rounding.
[[nodiscard]] double t_statistic(const StatisticInput& in, double c2);

/// Ratio estimate of the squared proportionality constant, with the pieces
/// it was formed from.
struct ScaleEstimate {
  double c2_hat = 0.0;
  double numerator = 0.0;    // (1/n) sum m_hat_i^2 r_i^2 weight_i over the trimmed range
  double denominator = 0.0;  // (1/n) sum (sigma2_hat_i)^2 weight_i over the trimmed range
};

/// Least-squares scale ratio over the trimmed predictor range (order
/// statistics floor(0.05 n) .. floor(0.95 n), lower index at least 1; ties at
/// the boundary value are all included). weight_i is w(x_i), or w_star(x_i)^3
/// in the doubly-weighted variant. Throws ZeroDenominator when nothing
/// contributes to the denominator.
[[nodiscard]] ScaleEstimate estimate_c2(const StatisticInput& in);

/// The six elementary pair averages the statistic splits into around the true
/// model functions. Each is a kernel-weighted pair average like t_statistic,
/// over products of per-point factors built from
///   delta_i   = m_hat_i^2 - m(x_i)^2                (squared-fit error)
///   drift_i   = m(x_i)^2 - c2 sigma(x_i)^2 eps_i^2  (null deviation)
///   noise_i   = m(x_i) sigma(x_i) eps_i             (signed noise)
/// with eps_i = (y_i - m(x_i)) / sigma(x_i):
///   t1: delta x delta,  t2: delta x noise,  t3: delta x drift,
///   t4: drift x drift,  t5: drift x noise,  t6: noise x noise.
struct Decomposition {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0, t6 = 0.0;

  /// Reassembles the statistic:
  /// (c2+1)^2 t1 - 2 (c2+1) (2 c2 t2 - t3) + t4 - 4 c2 (t5 - c2 t6).
  [[nodiscard]] double recombine(double c2) const noexcept;

  /// Scale of the recombination (sum of absolute contributions); the natural
  /// yardstick for relative identity checks.
  [[nodiscard]] double recombine_scale(double c2) const noexcept;
};

/// Splits the statistic around the true model functions (testing and
/// diagnostics; requires model truth, so it is not part of the data path).
/// Uses the same effective weight as t_statistic.
[[nodiscard]] Decomposition decompose(const StatisticInput& in, double c2,
                                      const std::function<double(double)>& m_true,
                                      const std::function<double(double)>& sigma_true);

/// Plug-in estimate of the asymptotic dispersion parameter of the scaled
/// statistic under the null:
///
///   mu0^2 = 2 * mean_i[ A^2 * m_hat_i^8 * f_hat(x_i) * w(x_i)^4 ] * int K^2,
///   A     = -1 + 4 c2 + 4 sqrt(c2) m3 + m4,
///
/// with m3, m4 the global sample moments of the standardized residuals and
/// f_hat a kernel density estimate with the Silverman bandwidth
/// 1.06 sd(x) n^{-1/5}. Diagnostic only; the test calibrates by bootstrap.
[[nodiscard]] double mu0_plugin(const StatisticInput& in, double c2);

/// Closed-form core of mu0_plugin, exposed for direct verification.
[[nodiscard]] double mu0_value(double m3, double m4, double c2,
                               double mean_m8_f_w4, double kernel_l2sq) noexcept;

}  // namespace cvtest
