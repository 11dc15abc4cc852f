#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cvtest/rng.hpp"
#include "cvtest/statistic.hpp"

namespace cvtest {

/// Calibration settings of the resampling test.
struct BootstrapConfig {
  std::size_t replicates_B = 100;
  double smoothing_v = 0.1;  // scale of the normal perturbation added to resampled errors
  std::vector<double> alphas = {0.025, 0.05, 0.10, 0.20};
  std::uint64_t seed = 1;
  bool reselect_bandwidths = false;  // rerun cross validation inside every replicate
  int redraw_budget = 3;             // extra attempts when a replicate fails

  /// Throws InputError when B < 1, v < 0, or alphas is empty, not strictly
  /// increasing, or outside (0, 1).
  void validate() const;
};

/// Smoothing choices resolved at the start of a test run.
struct SmoothingConfig {
  Kernel kernel = Kernel::epanechnikov();
  std::optional<double> h_mean;  // fixed mean bandwidth; cross-validated when absent
  std::optional<double> h_var;   // fixed variance bandwidth; cross-validated when absent
  std::optional<double> g;       // pair bandwidth; n^{-1/2} * range(x) when absent
  std::size_t grid_points = 20;
  double grid_lo_frac = 0.05;
  double grid_hi_frac_mean = 0.5;  // top of the mean-stage bandwidth grid, as a fraction of range(x)
  double grid_hi_frac_var = 0.5;   // top of the variance-stage bandwidth grid
  double weight_ramp_frac = 0.05;  // trimming-weight ramp width as a fraction of range(x)
  // sigma2_hat floor as a fraction of the mean squared residual. A collapsing
  // local variance fit otherwise produces near-zero scales whose standardized
  // residuals dominate the resampling pool and wreck the calibration; 0 keeps
  // only the absolute 1e-8 * var(y) guard.
  double variance_floor_frac = 0.01;
  bool doubly_weighted = false;    // inner-weight the fits and use the second trimming weight
};

/// Smoothed resample of the standardized residuals:
/// errors_i = eps_hat[J_i] + v * N_i with J_i uniform on the indices and N_i
/// standard normal. No recentering afterwards. With v = 0 every output value
/// is a member of eps_hat.
[[nodiscard]] std::vector<double> draw_bootstrap_errors(std::span<const double> eps_hat,
                                                        double v, std::size_t n,
                                                        rng::Stream& stream);

/// Data regenerated under the proportionality null on the original
/// predictors: y_i = c_hat * sigma_hat_i + sigma_hat_i * errors_i with
/// c_hat = sqrt(c2_hat) and sigma_hat_i = sqrt(sigma2_hat_i).
[[nodiscard]] Sample make_null_sample(const Sample& s, const SmootherFit& fit,
                                      double c2_hat, std::span<const double> errors);

/// Everything one test run produced.
struct TestOutcome {
  double t_observed = 0.0;
  double c2_hat = 0.0;
  double p_value = 0.0;
  std::vector<double> t_star;  // replicate statistics, in replicate order
  std::vector<std::pair<double, bool>> rejections;  // (alpha, reject), alphas ascending
  Bandwidths bandwidths_used;
  bool weighted = false;
};

/// The complete test: fit, scale estimate, observed statistic, B smooth
/// bootstrap replicates under the null, decisions per alpha.
///
/// Decision rule: reject at level alpha when t_observed strictly exceeds the
/// order statistic t*_(k), k = floor(B (1 - alpha)) clamped to [1, B].
/// p_value = (1 + #{b : t*_b >= t_observed}) / (B + 1).
///
/// Replicate b draws from a stream derived from (cfg.seed, b, attempt), so
/// replicates are order-independent; a failing replicate is redrawn up to
/// cfg.redraw_budget times before ReplicateFailure is raised.
[[nodiscard]] TestOutcome bootstrap_test(const Sample& s, const BootstrapConfig& cfg,
                                         const SmoothingConfig& sm = {});

}  // namespace cvtest
