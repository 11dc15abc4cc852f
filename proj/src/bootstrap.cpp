#include "cvtest/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

// Stream-derivation tag for bootstrap replicates (see rng::derive_seed).
constexpr std::uint64_t kReplicateTag = 0xB0;

// Everything that stays fixed across the replicates of one test run.
struct RunContext {
  const Sample& s;
  const SmoothingConfig& sm;
  const WeightFn& w;
  const WeightFn* w_star;  // non-null in the doubly-weighted variant
  const std::vector<double>& grid_mean;  // empty when h_mean is fixed
  const std::vector<double>& grid_var;   // empty when h_var is fixed
  Bandwidths bw;

  [[nodiscard]] const WeightFn* mean_inner() const noexcept {
    return w_star ? &w : nullptr;
  }
  [[nodiscard]] const WeightFn* var_inner() const noexcept { return w_star; }
};

// Fits the two-stage smoother, cross-validating whichever bandwidth is not
// fixed (the replicate path reuses the data-selected values unless
// reselection is requested).
SmootherFit fit_pipeline(const RunContext& ctx, const Sample& s, bool reselect) {
  Bandwidths bw = ctx.bw;
  if (reselect && !ctx.sm.h_mean) {
    bw.h_mean =
        cv_bandwidth(s, s.y, ctx.sm.kernel, ctx.grid_mean, ctx.mean_inner());
  }
  SmootherFit fit;
  fit.m_hat = fit_mean(s, bw.h_mean, ctx.sm.kernel, ctx.mean_inner());
  fit.residuals.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    fit.residuals[i] = s.y[i] - fit.m_hat[i];
  }
  if (reselect && !ctx.sm.h_var) {
    std::vector<double> sq(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      sq[i] = fit.residuals[i] * fit.residuals[i];
    }
    bw.h_var = cv_bandwidth(s, sq, ctx.sm.kernel, ctx.grid_var, ctx.var_inner());
  }
  fit.sigma2_hat = fit_variance(s, fit.residuals, bw.h_var, ctx.sm.kernel,
                                ctx.var_inner(), ctx.sm.variance_floor_frac);
  fit.bandwidths = bw;
  return fit;
}

// Statistic of one dataset given its fit: scale estimate, then the pair
// statistic at that scale.
double statistic_at_scale(const RunContext& ctx, const Sample& s,
                          const SmootherFit& fit, double* c2_out) {
  const StatisticInput in{s, fit, ctx.bw.g, ctx.sm.kernel, ctx.w, ctx.w_star};
  const double c2 = estimate_c2(in).c2_hat;
  if (!(c2 > 0.0)) {
    throw ZeroDenominator("scale estimate vanished");
  }
  if (c2_out) *c2_out = c2;
  return t_statistic(in, c2);
}

double one_replicate(const RunContext& ctx, const SmootherFit& data_fit,
                     std::span<const double> eps_hat, double c2_hat, double v,
                     bool reselect, rng::Stream& stream) {
  const std::vector<double> errors =
      draw_bootstrap_errors(eps_hat, v, ctx.s.size(), stream);
  const Sample s_star = make_null_sample(ctx.s, data_fit, c2_hat, errors);
  const SmootherFit fit_star = fit_pipeline(ctx, s_star, reselect);
  return statistic_at_scale(ctx, s_star, fit_star, nullptr);
}

// floor(B * (1 - alpha)) with a relative nudge so representation dust cannot
// pull an exact integer down (e.g. B = 3, alpha = 1/3 must land on 2).
std::size_t order_index(std::size_t B, double alpha) {
  const double k = std::floor(static_cast<double>(B) * (1.0 - alpha) + 1e-9);
  const auto idx = static_cast<std::size_t>(std::max(k, 0.0));
  return std::clamp<std::size_t>(idx, 1, B);
}

}  // namespace

void BootstrapConfig::validate() const {
  if (replicates_B < 1) throw InputError("need at least one bootstrap replicate");
  if (!(smoothing_v >= 0.0) || !std::isfinite(smoothing_v)) {
    throw InputError("bootstrap smoothing scale v must be >= 0");
  }
  if (alphas.empty()) throw InputError("need at least one test level");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || !(alphas[i] < 1.0)) {
      throw InputError("test levels must lie strictly between 0 and 1");
    }
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      throw InputError("test levels must be strictly increasing");
    }
  }
  if (redraw_budget < 0) throw InputError("redraw budget must be >= 0");
}

std::vector<double> draw_bootstrap_errors(std::span<const double> eps_hat, double v,
                                          std::size_t n, rng::Stream& stream) {
  if (eps_hat.empty()) throw std::invalid_argument("no residuals to resample");
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("smoothing scale v must be >= 0 and finite");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = stream.uniform_index(eps_hat.size());
    out[i] = eps_hat[j] + v * stream.normal();
  }
  return out;
}

Sample make_null_sample(const Sample& s, const SmootherFit& fit, double c2_hat,
                        std::span<const double> errors) {
  const std::size_t n = s.size();
  if (fit.sigma2_hat.size() != n || errors.size() != n) {
    throw std::invalid_argument("fit or errors do not match the sample");
  }
  if (!(c2_hat >= 0.0) || !std::isfinite(c2_hat)) {
    throw std::invalid_argument("c2_hat must be nonnegative and finite");
  }
  const double c_hat = std::sqrt(c2_hat);
  Sample out;
  out.x = s.x;
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = std::sqrt(fit.sigma2_hat[i]);
    out.y[i] = c_hat * sigma + sigma * errors[i];
  }
  return out;
}

TestOutcome bootstrap_test(const Sample& s, const BootstrapConfig& cfg,
                           const SmoothingConfig& sm) {
  s.validate();
  cfg.validate();
  if (!(sm.weight_ramp_frac > 0.0) || sm.weight_ramp_frac > 0.5) {
    throw InputError("weight ramp fraction must lie in (0, 0.5]");
  }

  const ValueRange range = value_range(s.x);
  const double width = range.width();
  if (!(width > 0.0)) throw InputError("predictor range is zero");

  const double ramp = sm.weight_ramp_frac * width;
  const WeightFn w(range.lo, range.hi, ramp);

  // Second trimming weight of the doubly-weighted variant, supported strictly
  // inside the support of w.
  std::optional<WeightFn> w_star;
  if (sm.doubly_weighted) {
    if (sm.weight_ramp_frac > 1.0 / 3.0) {
      throw InputError("weight ramp fraction must be <= 1/3 when doubly weighted");
    }
    w_star.emplace(range.lo + 0.5 * ramp, range.hi - 0.5 * ramp, ramp);
  }

  std::vector<double> grid_mean;
  if (!sm.h_mean) {
    grid_mean = default_bandwidth_grid(s.x, sm.grid_points, sm.grid_lo_frac,
                                       sm.grid_hi_frac_mean);
  }
  std::vector<double> grid_var;
  if (!sm.h_var) {
    grid_var = default_bandwidth_grid(s.x, sm.grid_points, sm.grid_lo_frac,
                                      sm.grid_hi_frac_var);
  }

  RunContext ctx{s,        sm,       w, w_star ? &*w_star : nullptr,
                 grid_mean, grid_var, Bandwidths{}};

  ctx.bw.g = sm.g.value_or(std::pow(static_cast<double>(s.size()), -0.5) * width);
  if (!(ctx.bw.g > 0.0) || !std::isfinite(ctx.bw.g)) {
    throw InputError("pair bandwidth g must be positive and finite");
  }
  ctx.bw.h_mean = sm.h_mean
                      ? *sm.h_mean
                      : cv_bandwidth(s, s.y, sm.kernel, grid_mean, ctx.mean_inner());

  // Mean fit and residuals once, to cross-validate the variance bandwidth.
  SmootherFit fit;
  fit.m_hat = fit_mean(s, ctx.bw.h_mean, sm.kernel, ctx.mean_inner());
  fit.residuals.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    fit.residuals[i] = s.y[i] - fit.m_hat[i];
  }
  if (sm.h_var) {
    ctx.bw.h_var = *sm.h_var;
  } else {
    std::vector<double> sq(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      sq[i] = fit.residuals[i] * fit.residuals[i];
    }
    ctx.bw.h_var = cv_bandwidth(s, sq, sm.kernel, grid_var, ctx.var_inner());
  }
  fit.sigma2_hat = fit_variance(s, fit.residuals, ctx.bw.h_var, sm.kernel,
                                ctx.var_inner(), sm.variance_floor_frac);
  fit.bandwidths = ctx.bw;

  TestOutcome outcome;
  outcome.weighted = sm.doubly_weighted;
  outcome.bandwidths_used = ctx.bw;
  outcome.t_observed = statistic_at_scale(ctx, s, fit, &outcome.c2_hat);

  const std::vector<double> eps_hat = standardize_residuals(fit);

  const std::size_t B = cfg.replicates_B;
  outcome.t_star.resize(B);
  for (std::size_t b = 0; b < B; ++b) {
    bool done = false;
    for (int attempt = 0; attempt <= cfg.redraw_budget && !done; ++attempt) {
      rng::Stream stream(rng::derive_seed(
          cfg.seed, {kReplicateTag, b, static_cast<std::uint64_t>(attempt)}));
      try {
        outcome.t_star[b] = one_replicate(ctx, fit, eps_hat, outcome.c2_hat,
                                          cfg.smoothing_v,
                                          cfg.reselect_bandwidths, stream);
        done = true;
      } catch (const Error& e) {
        if (attempt == cfg.redraw_budget) {
          throw ReplicateFailure("replicate " + std::to_string(b + 1) +
                                 " failed after " +
                                 std::to_string(cfg.redraw_budget + 1) +
                                 " attempts: " + e.what());
        }
      }
    }
  }

  std::size_t at_least = 0;
  for (double t : outcome.t_star) {
    if (t >= outcome.t_observed) ++at_least;
  }
  outcome.p_value = static_cast<double>(at_least + 1) / static_cast<double>(B + 1);

  std::vector<double> sorted(outcome.t_star);
  std::sort(sorted.begin(), sorted.end());
  outcome.rejections.reserve(cfg.alphas.size());
  for (double alpha : cfg.alphas) {
    const std::size_t k = order_index(B, alpha);
    outcome.rejections.emplace_back(alpha, outcome.t_observed > sorted[k - 1]);
  }
  return outcome;
}

}  // namespace cvtest
