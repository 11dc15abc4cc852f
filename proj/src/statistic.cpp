#include "cvtest/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

// Predictors in canonical order (by x, ties by y) so pair sums run in an
// input-permutation-independent order.
struct PairOrder {
  std::vector<double> xs;          // sorted x
  std::vector<std::size_t> order;  // original index per sorted slot

  explicit PairOrder(const Sample& s) : xs(s.size()), order(s.size()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (s.x[a] != s.x[b]) return s.x[a] < s.x[b];
      return s.y[a] < s.y[b];
    });
    for (std::size_t p = 0; p < order.size(); ++p) xs[p] = s.x[order[p]];
  }
};

// Kernel-weighted pair average (1/(n(n-1))) sum_{i != j} K_g(x_i - x_j) a_i b_j,
// evaluated over unordered pairs inside the kernel window; each contributes
// the symmetrized product, which also makes the sum independent of how a and
// b are assigned to the two slots.
double pair_average(const PairOrder& po, std::span<const double> a,
                    std::span<const double> b, double g, const Kernel& k) {
  const std::size_t n = po.xs.size();
  if (n < 2) throw std::invalid_argument("pair statistic needs n >= 2");
  const double radius = g * k.support_radius();
  const double inv_g = 1.0 / g;

  double total = 0.0;
  std::size_t w = 0;
  for (std::size_t q = 1; q < n; ++q) {
    while (po.xs[q] - po.xs[w] > radius) ++w;
    const std::size_t j = po.order[q];
    const double xq = po.xs[q];
    const double aj = a[j];
    const double bj = b[j];
    for (std::size_t p = w; p < q; ++p) {
      const std::size_t i = po.order[p];
      const double kg = k((xq - po.xs[p]) * inv_g) * inv_g;
      total += kg * (a[i] * bj + aj * b[i]);
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

void check_statistic_input(const StatisticInput& in, double c2) {
  const std::size_t n = in.sample.size();
  if (in.sample.y.size() != n) throw std::invalid_argument("sample columns differ");
  if (in.fit.m_hat.size() != n) {
    throw std::invalid_argument("fit does not match the sample");
  }
  if (!(in.g > 0.0) || !std::isfinite(in.g)) {
    throw std::invalid_argument("pair bandwidth g must be positive and finite");
  }
  if (!(c2 > 0.0) || !std::isfinite(c2)) {
    throw std::invalid_argument("squared ratio c2 must be positive and finite");
  }
}

}  // namespace

double t_statistic(const StatisticInput& in, double c2) {
  check_statistic_input(in, c2);
  const std::size_t n = in.sample.size();
  const WeightFn& w = in.effective_weight();

  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = in.sample.y[i];
    const double m = in.fit.m_hat[i];
    phi[i] = (c2 * y * y - (c2 + 1.0) * m * m) * w(in.sample.x[i]);
  }

  const PairOrder po(in.sample);
  return pair_average(po, phi, phi, in.g, in.kernel);
}

ScaleEstimate estimate_c2(const StatisticInput& in) {
  const std::size_t n = in.sample.size();
  if (in.fit.m_hat.size() != n || in.fit.residuals.size() != n ||
      in.fit.sigma2_hat.size() != n) {
    throw std::invalid_argument("fit does not match the sample");
  }

  // Trimmed predictor range: order statistics floor(0.05 n) and floor(0.95 n),
  // 1-indexed, lower index at least 1. Boundary ties are included by value.
  std::vector<double> xs(in.sample.x.begin(), in.sample.x.end());
  std::sort(xs.begin(), xs.end());
  const std::size_t lo_idx =
      std::max<std::size_t>(static_cast<std::size_t>(0.05 * static_cast<double>(n)), 1);
  std::size_t hi_idx = static_cast<std::size_t>(0.95 * static_cast<double>(n));
  hi_idx = std::clamp<std::size_t>(hi_idx, lo_idx, n);
  const double lo = xs[lo_idx - 1];
  const double hi = xs[hi_idx - 1];

  const bool cubed = in.w_star != nullptr;
  const WeightFn& w = in.effective_weight();

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = in.sample.x[i];
    if (x < lo || x > hi) continue;
    double weight = w(x);
    if (cubed) weight = weight * weight * weight;
    if (weight == 0.0) continue;
    const double m = in.fit.m_hat[i];
    const double r = in.fit.residuals[i];
    const double s2 = in.fit.sigma2_hat[i];
    num += m * m * r * r * weight;
    den += s2 * s2 * weight;
  }
  num /= static_cast<double>(n);
  den /= static_cast<double>(n);

  if (!(den > 0.0)) {
    throw ZeroDenominator(
        "all weighted variance estimates vanish over the trimmed range");
  }
  return ScaleEstimate{num / den, num, den};
}

double Decomposition::recombine(double c2) const noexcept {
  const double a = c2 + 1.0;
  return a * a * t1 - 2.0 * a * (2.0 * c2 * t2 - t3) + t4 -
         4.0 * c2 * (t5 - c2 * t6);
}

double Decomposition::recombine_scale(double c2) const noexcept {
  const double a = c2 + 1.0;
  return std::abs(a * a * t1) + std::abs(4.0 * a * c2 * t2) +
         std::abs(2.0 * a * t3) + std::abs(t4) + std::abs(4.0 * c2 * t5) +
         std::abs(4.0 * c2 * c2 * t6);
}

Decomposition decompose(const StatisticInput& in, double c2,
                        const std::function<double(double)>& m_true,
                        const std::function<double(double)>& sigma_true) {
  check_statistic_input(in, c2);
  const std::size_t n = in.sample.size();
  const WeightFn& w = in.effective_weight();

  std::vector<double> delta_w(n);  // (m_hat^2 - m^2) w
  std::vector<double> noise_w(n);  // m sigma eps w
  std::vector<double> drift_w(n);  // (m^2 - c2 sigma^2 eps^2) w
  for (std::size_t i = 0; i < n; ++i) {
    const double x = in.sample.x[i];
    const double m = m_true(x);
    const double sigma = sigma_true(x);
    if (!(sigma > 0.0)) {
      throw std::invalid_argument("sigma_true must be positive at observation " +
                                  std::to_string(i));
    }
    const double eps = (in.sample.y[i] - m) / sigma;
    const double wi = w(x);
    const double mh = in.fit.m_hat[i];
    delta_w[i] = (mh * mh - m * m) * wi;
    noise_w[i] = m * sigma * eps * wi;
    drift_w[i] = (m * m - c2 * sigma * sigma * eps * eps) * wi;
  }

  const PairOrder po(in.sample);
  Decomposition d;
  d.t1 = pair_average(po, delta_w, delta_w, in.g, in.kernel);
  d.t2 = pair_average(po, delta_w, noise_w, in.g, in.kernel);
  d.t3 = pair_average(po, delta_w, drift_w, in.g, in.kernel);
  d.t4 = pair_average(po, drift_w, drift_w, in.g, in.kernel);
  d.t5 = pair_average(po, drift_w, noise_w, in.g, in.kernel);
  d.t6 = pair_average(po, noise_w, noise_w, in.g, in.kernel);
  return d;
}

double mu0_value(double m3, double m4, double c2, double mean_m8_f_w4,
                 double kernel_l2sq) noexcept {
  const double a = -1.0 + 4.0 * c2 + 4.0 * std::sqrt(c2) * m3 + m4;
  return 2.0 * a * a * mean_m8_f_w4 * kernel_l2sq;
}

double mu0_plugin(const StatisticInput& in, double c2) {
  check_statistic_input(in, c2);
  const std::size_t n = in.sample.size();
  const std::vector<double> eps_hat = standardize_residuals(in.fit);

  double m3 = 0.0;
  double m4 = 0.0;
  for (double e : eps_hat) {
    const double e2 = e * e;
    m3 += e2 * e;
    m4 += e2 * e2;
  }
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);

  // Kernel density estimate at the observations, Silverman bandwidth.
  double mean_x = 0.0;
  for (double x : in.sample.x) mean_x += x;
  mean_x /= static_cast<double>(n);
  double var_x = 0.0;
  for (double x : in.sample.x) var_x += (x - mean_x) * (x - mean_x);
  var_x = n > 1 ? var_x / static_cast<double>(n - 1) : 0.0;
  const double sd_x = std::sqrt(var_x);
  if (!(sd_x > 0.0)) {
    throw std::invalid_argument("predictor spread is zero; no density estimate");
  }
  const double b = 1.06 * sd_x * std::pow(static_cast<double>(n), -0.2);

  const WeightFn& w = in.effective_weight();
  double mean_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      f += in.kernel((in.sample.x[j] - in.sample.x[i]) / b);
    }
    f /= static_cast<double>(n) * b;
    const double m = in.fit.m_hat[i];
    const double m2 = m * m;
    const double m4p = m2 * m2;
    const double wi = w(in.sample.x[i]);
    const double w2 = wi * wi;
    mean_term += m4p * m4p * f * w2 * w2;
  }
  mean_term /= static_cast<double>(n);

  return mu0_value(m3, m4, c2, mean_term, in.kernel.squared_l2_norm());
}

}  // namespace cvtest
