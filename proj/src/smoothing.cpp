#include "cvtest/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

// Relative determinant guard: below this times (sum of kernel weights)^2 * h^4
// the 2x2 normal equations count as degenerate.
constexpr double kDetGuard = 1e-12;

// View of the predictors in ascending order, for windowing compact kernels.
struct SortedX {
  std::vector<double> values;       // x sorted ascending
  std::vector<std::size_t> order;   // original index of each sorted slot

  explicit SortedX(std::span<const double> x)
      : values(x.size()), order(x.size()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    for (std::size_t p = 0; p < order.size(); ++p) values[p] = x[order[p]];
  }
};

// Weighted sums of the local linear normal equations at one point.
struct LocalSums {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;  // kernel moments of (x_j - e)^l
  double t0 = 0.0, t1 = 0.0;            // response moments
};

// Accumulates the sums at evaluation point e over the kernel window.
LocalSums accumulate(const SortedX& sx, std::span<const double> x,
                     std::span<const double> response, double e, double h,
                     const Kernel& k, const WeightFn* inner_weight) {
  const double radius = h * k.support_radius();
  const auto first = std::lower_bound(sx.values.begin(), sx.values.end(), e - radius);
  const auto last = std::upper_bound(first, sx.values.end(), e + radius);
  const double inv_h = 1.0 / h;

  LocalSums acc;
  for (auto it = first; it != last; ++it) {
    const std::size_t j = sx.order[static_cast<std::size_t>(it - sx.values.begin())];
    double kw = k((x[j] - e) * inv_h) * inv_h;
    if (inner_weight) kw *= (*inner_weight)(x[j]);
    if (kw == 0.0) continue;
    const double d = x[j] - e;
    acc.s0 += kw;
    acc.s1 += kw * d;
    acc.s2 += kw * d * d;
    acc.t0 += kw * response[j];
    acc.t1 += kw * d * response[j];
  }
  return acc;
}

// Solves the accumulated normal equations for the intercept. NaN signals a
// disallowed degenerate point (caller raises with context).
double solve_point(const LocalSums& acc, double h, bool allow_fallback,
                   bool* degenerate_mass) {
  *degenerate_mass = false;
  if (!(acc.s0 > 0.0)) {
    *degenerate_mass = true;
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double det = acc.s0 * acc.s2 - acc.s1 * acc.s1;
  const double h2 = h * h;
  const double guard = kDetGuard * acc.s0 * acc.s0 * h2 * h2;
  if (det > guard) {
    return (acc.s2 * acc.t0 - acc.s1 * acc.t1) / det;
  }
  if (!allow_fallback) return std::numeric_limits<double>::quiet_NaN();
  return acc.t0 / acc.s0;  // kernel-weighted local mean
}

void check_fit_args(std::span<const double> x, std::span<const double> response,
                    double h) {
  if (x.size() != response.size()) {
    throw std::invalid_argument("x and response lengths differ");
  }
  if (x.empty()) throw std::invalid_argument("empty sample");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("bandwidth must be positive and finite");
  }
}

}  // namespace

bool Bandwidths::pair_bandwidth_in_regime(double scale, double factor) const noexcept {
  if (!(scale > 0.0)) return false;
  return g * scale <= factor * h_mean * h_mean;
}

std::vector<double> local_linear_fit(std::span<const double> x,
                                     std::span<const double> response,
                                     std::span<const double> eval, double h,
                                     const Kernel& k, const WeightFn* inner_weight,
                                     bool allow_fallback) {
  check_fit_args(x, response, h);
  const SortedX sx(x);

  std::vector<double> fit(eval.size());
  for (std::size_t p = 0; p < eval.size(); ++p) {
    const LocalSums acc = accumulate(sx, x, response, eval[p], h, k, inner_weight);
    bool degenerate_mass = false;
    const double value = solve_point(acc, h, allow_fallback, &degenerate_mass);
    if (std::isnan(value)) {
      throw DegenerateNeighborhood(
          (degenerate_mass ? std::string("no kernel mass at evaluation point ")
                           : std::string("degenerate local system at evaluation point ")) +
          std::to_string(p) + " (bandwidth " + std::to_string(h) + " too small)");
    }
    fit[p] = value;
  }
  return fit;
}

std::vector<double> fit_mean(const Sample& s, double h, const Kernel& k,
                             const WeightFn* inner_weight) {
  return local_linear_fit(s.x, s.y, s.x, h, k, inner_weight);
}

std::vector<double> fit_variance(const Sample& s, std::span<const double> residuals,
                                 double h, const Kernel& k,
                                 const WeightFn* inner_weight, double floor_frac) {
  if (residuals.size() != s.size()) {
    throw std::invalid_argument("residual length does not match sample");
  }
  if (!(floor_frac >= 0.0) || !std::isfinite(floor_frac)) {
    throw std::invalid_argument("variance floor fraction must be >= 0 and finite");
  }
  std::vector<double> sq(residuals.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = residuals[i] * residuals[i];

  std::vector<double> fit = local_linear_fit(s.x, sq, s.x, h, k, inner_weight);

  // Floor relative to the response scale so sqrt(sigma2_hat) divisions stay
  // finite; absolute floor when y carries no variance at all. floor_frac > 0
  // tightens this to a fraction of the mean squared residual, so a local fit
  // that collapses (or goes negative) cannot manufacture huge standardized
  // residuals at isolated predictors.
  const std::size_t n = s.size();
  double mean = 0.0;
  for (double v : s.y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : s.y) var += (v - mean) * (v - mean);
  var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
  double floor = var > 0.0 ? 1e-8 * var : 1e-12;
  if (floor_frac > 0.0) {
    double mean_sq = 0.0;
    for (double v : sq) mean_sq += v;
    mean_sq /= static_cast<double>(n);
    floor = std::max(floor, floor_frac * mean_sq);
  }

  for (double& v : fit) v = std::max(v, floor);
  return fit;
}

std::vector<double> default_bandwidth_grid(std::span<const double> x,
                                           std::size_t points, double lo_frac,
                                           double hi_frac) {
  if (points == 0) throw std::invalid_argument("grid needs at least one point");
  if (!(lo_frac > 0.0) || !(hi_frac >= lo_frac)) {
    throw std::invalid_argument("grid fractions must satisfy 0 < lo <= hi");
  }
  const double range = value_range(x).width();
  if (!(range > 0.0)) throw InputError("predictor range is zero");

  const double lo = lo_frac * range;
  const double hi = hi_frac * range;
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = hi;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t j = 0; j < points; ++j) {
    grid[j] = lo * std::exp(step * static_cast<double>(j));
  }
  grid.back() = hi;  // exact endpoint, no exp/log round-trip dust
  return grid;
}

double cv_bandwidth(const Sample& s, std::span<const double> response,
                    const Kernel& k, std::span<const double> grid,
                    const WeightFn* inner_weight) {
  if (grid.empty()) throw std::invalid_argument("empty bandwidth grid");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) {
      throw std::invalid_argument("bandwidth grid must be strictly ascending");
    }
  }
  if (!(grid.front() > 0.0)) {
    throw std::invalid_argument("bandwidths must be positive");
  }
  const std::size_t n = s.size();
  if (response.size() != n) {
    throw std::invalid_argument("response length does not match sample");
  }

  const SortedX sx(s.x);

  // Scores within this tolerance count as equal, so exact fits at several
  // bandwidths (all scores at rounding level) resolve toward the larger one.
  double response_scale = 0.0;
  for (double v : response) response_scale += v * v;
  const double tie_eps = 1e-9 * (1.0 + response_scale);

  double best_h = std::numeric_limits<double>::quiet_NaN();
  double best_score = std::numeric_limits<double>::infinity();

  for (double h : grid) {
    const double self_base = k(0.0) / h;
    double score = 0.0;
    bool valid = true;
    for (std::size_t i = 0; i < n; ++i) {
      LocalSums acc = accumulate(sx, s.x, response, s.x[i], h, k, inner_weight);
      // Observation i sits at distance zero, so it only ever contributed to
      // the zeroth-order sums; removing it leaves s1, s2, t1 untouched.
      double self = self_base;
      if (inner_weight) self *= (*inner_weight)(s.x[i]);
      acc.s0 -= self;
      acc.t0 -= self * response[i];
      if (!(acc.s0 > 0.0)) {
        valid = false;  // observation i has no leave-one-out kernel mass
        break;
      }
      bool degenerate_mass = false;
      const double pred = solve_point(acc, h, /*allow_fallback=*/true, &degenerate_mass);
      const double err = response[i] - pred;
      score += err * err;
    }
    if (!valid || !std::isfinite(score)) continue;
    if (score <= best_score + tie_eps) {
      best_h = h;
      best_score = std::min(score, best_score);
    }
  }

  if (std::isnan(best_h)) {
    throw AllBandwidthsDegenerate(
        "no bandwidth in the grid admits a leave-one-out fit at every observation");
  }
  return best_h;
}

SmootherFit fit_smoother(const Sample& s, const Bandwidths& bw, const Kernel& k,
                         const WeightFn* mean_inner, const WeightFn* var_inner,
                         double variance_floor_frac) {
  SmootherFit fit;
  fit.bandwidths = bw;
  fit.m_hat = fit_mean(s, bw.h_mean, k, mean_inner);
  fit.residuals.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    fit.residuals[i] = s.y[i] - fit.m_hat[i];
  }
  fit.sigma2_hat =
      fit_variance(s, fit.residuals, bw.h_var, k, var_inner, variance_floor_frac);
  return fit;
}

std::vector<double> standardize_residuals(const SmootherFit& fit) {
  const std::size_t n = fit.residuals.size();
  if (n < 2 || fit.sigma2_hat.size() != n) {
    throw std::invalid_argument("fit residuals/variances missing or too short");
  }
  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) {
    eta[i] = fit.residuals[i] / std::sqrt(fit.sigma2_hat[i]);
  }
  double mean = 0.0;
  for (double e : eta) mean += e;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double e : eta) var += (e - mean) * (e - mean);
  var /= static_cast<double>(n - 1);
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) {
    throw ZeroResidualSpread("residuals have no spread; cannot standardize");
  }
  for (double& e : eta) e = (e - mean) / sd;
  return eta;
}

}  // namespace cvtest
