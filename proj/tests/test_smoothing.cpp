#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "cvtest/errors.hpp"
#include "cvtest/kernel.hpp"
#include "cvtest/rng.hpp"
#include "cvtest/sample.hpp"
#include "cvtest/smoothing.hpp"
#include "cvtest/weight.hpp"

using cvtest::Kernel;
using cvtest::Sample;
using cvtest::WeightFn;
using cvtest::rng::Stream;

namespace {

Sample noisy_sample(std::size_t n, std::uint64_t seed) {
  Stream s(seed);
  Sample out;
  out.x.resize(n);
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = 3.0 * s.uniform01();
  for (std::size_t i = 0; i < n; ++i) {
    out.y[i] = std::sin(2.0 * out.x[i]) + 0.3 * s.normal();
  }
  return out;
}

}  // namespace

TEST_CASE("local linear fit matches a dense normal-equations oracle") {
  const Sample s = noisy_sample(80, 11);
  const Kernel k = Kernel::epanechnikov();
  std::vector<double> eval = {0.1, 0.5, 1.0, 1.7, 2.2, 2.9};
  for (double h : {0.25, 0.5, 1.2}) {
    const auto fit = cvtest::local_linear_fit(s.x, s.y, eval, h, k);
    for (std::size_t p = 0; p < eval.size(); ++p) {
      const auto ref =
          oracles::dense_local_linear_point(s.x, s.y, eval[p], h, k);
      REQUIRE(ref.has_value());
      CHECK(fit[p] ==
            doctest::Approx(*ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("oracle agreement holds with an inner weight and at own points") {
  const Sample s = noisy_sample(60, 12);
  const Kernel k = Kernel::gaussian_truncated();
  const auto [lo, hi] = cvtest::value_range(s.x);
  const WeightFn w(lo, hi, 0.15 * (hi - lo));
  std::vector<double> inner(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) inner[i] = w(s.x[i]);

  const double h = 0.4;
  const auto fit = cvtest::local_linear_fit(s.x, s.y, s.x, h, k, &w);
  for (std::size_t p = 0; p < s.size(); ++p) {
    const auto ref =
        oracles::dense_local_linear_point(s.x, s.y, s.x[p], h, k, &inner);
    REQUIRE(ref.has_value());
    CHECK(fit[p] == doctest::Approx(*ref).epsilon(1e-9));
  }
}

TEST_CASE("affine relationships are reproduced to rounding error") {
  Stream rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 20 + rng.uniform_index(40);
    const double a = 4.0 * rng.normal();
    const double b = 4.0 * rng.normal();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform01();
    for (std::size_t i = 0; i < n; ++i) y[i] = a + b * x[i];
    const double h = 0.15 + 0.5 * rng.uniform01();
    const auto fit =
        cvtest::local_linear_fit(x, y, x, h, Kernel::epanechnikov());
    const double scale = std::abs(a) + std::abs(b) + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(fit[i] - y[i]) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("an inner weight that is identically one is a bitwise no-op") {
  const Sample s = noisy_sample(50, 31);
  const auto [lo, hi] = cvtest::value_range(s.x);
  const WeightFn unit = WeightFn::covering(lo, hi, 0.1 * (hi - lo));
  for (double xi : s.x) REQUIRE(unit(xi) == 1.0);
  const auto plain =
      cvtest::local_linear_fit(s.x, s.y, s.x, 0.4, Kernel::epanechnikov());
  const auto weighted = cvtest::local_linear_fit(s.x, s.y, s.x, 0.4,
                                                 Kernel::epanechnikov(), &unit);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(plain[i] == weighted[i]);
}

TEST_CASE("variance fit floors away from zero") {
  Sample s;
  for (int i = 0; i < 12; ++i) {
    s.x.push_back(i / 11.0);
    s.y.push_back(2.0 + s.x.back());
  }
  const std::vector<double> zero(s.size(), 0.0);
  const auto fit =
      cvtest::fit_variance(s, zero, 0.4, Kernel::epanechnikov());
  double mean = 0.0;
  for (double v : s.y) mean += v;
  mean /= static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s.y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(s.size() - 1);
  for (double v : fit) CHECK(v == 1e-8 * var);

  Sample flat;
  for (int i = 0; i < 12; ++i) {
    flat.x.push_back(i / 11.0);
    flat.y.push_back(5.0);
  }
  const auto flat_fit =
      cvtest::fit_variance(flat, zero, 0.4, Kernel::epanechnikov());
  for (double v : flat_fit) CHECK(v == 1e-12);

  const Sample noisy = noisy_sample(60, 77);
  std::vector<double> res(noisy.size());
  Stream rng(78);
  for (double& r : res) r = rng.normal();
  const auto floored =
      cvtest::fit_variance(noisy, res, 0.5, Kernel::epanechnikov());
  for (double v : floored) CHECK(v > 0.0);
}

TEST_CASE("fractional variance floor binds only where the local fit collapses") {
  // Residual spread grows linearly from zero, so the fitted squared scale
  // collapses toward (and below) zero at the left edge while staying healthy
  // on the right.
  Sample s;
  for (int i = 0; i < 40; ++i) {
    s.x.push_back(i / 39.0);
    s.y.push_back(1.0 + s.x.back());
  }
  std::vector<double> res(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) res[i] = s.x[i];
  double mean_sq = 0.0;
  for (double r : res) mean_sq += r * r;
  mean_sq /= static_cast<double>(res.size());
  const double floor = 0.01 * mean_sq;

  const Kernel k = Kernel::epanechnikov();
  const auto plain = cvtest::fit_variance(s, res, 0.15, k);
  const auto guarded = cvtest::fit_variance(s, res, 0.15, k, nullptr, 0.01);

  CHECK(*std::min_element(plain.begin(), plain.end()) < floor);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(guarded[i] >= floor);
    if (plain[i] >= floor) CHECK(guarded[i] == plain[i]);  // untouched when healthy
  }
  CHECK_THROWS_AS(
      (void)cvtest::fit_variance(s, res, 0.15, k, nullptr, -0.5),
      std::invalid_argument);
}

TEST_CASE("smoother forwards the variance floor fraction") {
  const Sample s = noisy_sample(70, 41);
  cvtest::Bandwidths bw{0.4, 0.5, 1.0};
  const Kernel k = Kernel::epanechnikov();
  const auto base = cvtest::fit_smoother(s, bw, k);
  const auto guarded = cvtest::fit_smoother(s, bw, k, nullptr, nullptr, 2.0);
  double mean_sq = 0.0;
  for (double r : base.residuals) mean_sq += r * r;
  mean_sq /= static_cast<double>(base.residuals.size());
  bool floored_somewhere = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(guarded.sigma2_hat[i] >= 2.0 * mean_sq);
    floored_somewhere = floored_somewhere || guarded.sigma2_hat[i] != base.sigma2_hat[i];
  }
  CHECK(floored_somewhere);
}

TEST_CASE("smoother residuals are exactly response minus fit") {
  const Sample s = noisy_sample(70, 41);
  cvtest::Bandwidths bw{0.4, 0.5, 1.0};
  const auto fit = cvtest::fit_smoother(s, bw, Kernel::epanechnikov());
  REQUIRE(fit.m_hat.size() == s.size());
  REQUIRE(fit.sigma2_hat.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(fit.residuals[i] == s.y[i] - fit.m_hat[i]);  // bitwise
    CHECK(fit.sigma2_hat[i] > 0.0);
  }
  CHECK(fit.bandwidths.h_mean == 0.4);
  CHECK(fit.bandwidths.h_var == 0.5);
}

TEST_CASE("cross validation agrees with brute-force leave-one-out") {
  const Sample s = noisy_sample(25, 51);
  const Kernel k = Kernel::epanechnikov();
  const std::vector<double> grid = {0.45, 0.8, 1.4, 2.5};

  double best_brute = std::numeric_limits<double>::infinity();
  double best_h = std::numeric_limits<double>::quiet_NaN();
  double resp_scale = 0.0;
  for (double v : s.y) resp_scale += v * v;
  const double tie_eps = 1e-9 * (1.0 + resp_scale);
  for (double h : grid) {
    const auto score = oracles::brute_cv_score(s.x, s.y, h, k);
    if (!score) continue;
    if (*score <= best_brute + tie_eps) {
      best_h = h;
      best_brute = std::min(*score, best_brute);
    }
  }
  REQUIRE(std::isfinite(best_h));
  CHECK(cvtest::cv_bandwidth(s, s.y, k, grid) == best_h);
}

TEST_CASE("cross validation with an inner weight matches brute force") {
  const Sample s = noisy_sample(22, 52);
  const Kernel k = Kernel::epanechnikov();
  const auto [lo, hi] = cvtest::value_range(s.x);
  const WeightFn w(lo, hi, 0.15 * (hi - lo));
  std::vector<double> inner(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) inner[i] = w(s.x[i]);

  const std::vector<double> grid = {0.5, 0.9, 1.6, 2.8};
  double best_brute = std::numeric_limits<double>::infinity();
  double best_h = std::numeric_limits<double>::quiet_NaN();
  double resp_scale = 0.0;
  for (double v : s.y) resp_scale += v * v;
  const double tie_eps = 1e-9 * (1.0 + resp_scale);
  for (double h : grid) {
    const auto score = oracles::brute_cv_score(s.x, s.y, h, k, &inner);
    if (!score) continue;
    if (*score <= best_brute + tie_eps) {
      best_h = h;
      best_brute = std::min(*score, best_brute);
    }
  }
  REQUIRE(std::isfinite(best_h));
  CHECK(cvtest::cv_bandwidth(s, s.y, k, grid, &w) == best_h);
}

TEST_CASE("ties between perfect fits resolve toward the larger bandwidth") {
  Sample lin;
  Stream rng(61);
  for (int i = 0; i < 30; ++i) {
    lin.x.push_back(rng.uniform01());
    lin.y.push_back(1.5 - 0.7 * lin.x.back());
  }
  const std::vector<double> grid = {0.4, 0.6, 0.9, 1.3};
  CHECK(cvtest::cv_bandwidth(lin, lin.y, Kernel::epanechnikov(), grid) == 1.3);

  Sample flat = lin;
  std::fill(flat.y.begin(), flat.y.end(), 4.0);
  CHECK(cvtest::cv_bandwidth(flat, flat.y, Kernel::epanechnikov(), grid) == 1.3);
}

TEST_CASE("single-value grids and invalid grids") {
  const Sample s = noisy_sample(20, 71);
  const std::vector<double> one = {0.8};
  CHECK(cvtest::cv_bandwidth(s, s.y, Kernel::epanechnikov(), one) == 0.8);
  const std::vector<double> empty;
  CHECK_THROWS_AS(
      (void)cvtest::cv_bandwidth(s, s.y, Kernel::epanechnikov(), empty),
      std::invalid_argument);
  const std::vector<double> unsorted = {0.5, 0.4};
  CHECK_THROWS_AS(
      (void)cvtest::cv_bandwidth(s, s.y, Kernel::epanechnikov(), unsorted),
      std::invalid_argument);
}

TEST_CASE("a grid of hopeless bandwidths throws") {
  Sample s;
  for (int i = 0; i < 10; ++i) {
    s.x.push_back(static_cast<double>(i));  // unit spacing
    s.y.push_back(static_cast<double>(i % 3));
  }
  // Epanechnikov support h < 1: every leave-one-out window is empty.
  const std::vector<double> grid = {0.05, 0.2, 0.6};
  CHECK_THROWS_AS(
      (void)cvtest::cv_bandwidth(s, s.y, Kernel::epanechnikov(), grid),
      cvtest::AllBandwidthsDegenerate);
}

TEST_CASE("degenerate neighborhoods: fallback mean or a clear error") {
  const std::vector<double> x = {0.0, 0.0, 0.0, 0.0, 1.0, 1.0};
  const std::vector<double> y = {1.0, 2.0, 3.0, 6.0, 9.0, 9.0};
  const std::vector<double> at_zero = {0.0};
  const Kernel k = Kernel::epanechnikov();

  // Window around 0 holds four identical predictors: the linear system is
  // singular and the fallback returns their kernel-weighted mean.
  const auto fit = cvtest::local_linear_fit(x, y, at_zero, 0.5, k);
  CHECK(fit[0] == doctest::Approx(3.0).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(
      (void)cvtest::local_linear_fit(x, y, at_zero, 0.5, k, nullptr,
                                     /*allow_fallback=*/false),
      doctest::Contains("degenerate local system"),
      cvtest::DegenerateNeighborhood);

  const std::vector<double> far = {5.0};
  CHECK_THROWS_WITH_AS((void)cvtest::local_linear_fit(x, y, far, 0.5, k),
                       doctest::Contains("no kernel mass"),
                       cvtest::DegenerateNeighborhood);
}

TEST_CASE("default bandwidth grid spans the requested fractions") {
  std::vector<double> x;
  for (int i = 0; i <= 50; ++i) x.push_back(0.2 + 1.6 * i / 50.0);
  const auto grid = cvtest::default_bandwidth_grid(x, 20, 0.05, 0.5);
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(0.05 * 1.6).epsilon(1e-14));
  CHECK(grid.back() == 0.5 * 1.6);
  for (std::size_t j = 1; j < grid.size(); ++j) CHECK(grid[j] > grid[j - 1]);
  // Log spacing: ratios between consecutive values are constant.
  const double ratio = grid[1] / grid[0];
  for (std::size_t j = 2; j < grid.size(); ++j) {
    CHECK(grid[j] / grid[j - 1] == doctest::Approx(ratio).epsilon(1e-9));
  }

  const std::vector<double> constant(10, 3.0);
  CHECK_THROWS_AS((void)cvtest::default_bandwidth_grid(constant),
                  cvtest::InputError);
}

TEST_CASE("standardized residuals: exact fixed point and moments") {
  cvtest::SmootherFit fit;
  fit.residuals = {-1.0, 0.0, 1.0};
  fit.sigma2_hat = {1.0, 1.0, 1.0};
  const auto eta = cvtest::standardize_residuals(fit);
  CHECK(eta[0] == -1.0);
  CHECK(eta[1] == 0.0);
  CHECK(eta[2] == 1.0);

  cvtest::SmootherFit flat;
  flat.residuals = {2.0, 2.0, 2.0};
  flat.sigma2_hat = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)cvtest::standardize_residuals(flat),
                  cvtest::ZeroResidualSpread);

  cvtest::SmootherFit random_fit;
  Stream rng(81);
  for (int i = 0; i < 200; ++i) {
    random_fit.residuals.push_back(rng.normal() * 2.0 + 0.5);
    random_fit.sigma2_hat.push_back(0.5 + rng.uniform01());
  }
  const auto z = cvtest::standardize_residuals(random_fit);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(z.size());
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= static_cast<double>(z.size() - 1);
  CHECK(std::abs(mean) < 1e-13);
  CHECK(std::abs(var - 1.0) < 1e-12);
}

TEST_CASE("pair-bandwidth regime diagnostic") {
  cvtest::Bandwidths bw;
  bw.h_mean = 0.1;
  bw.g = 0.05;
  CHECK(bw.pair_bandwidth_in_regime(1.0));
  bw.g = 0.2;
  CHECK_FALSE(bw.pair_bandwidth_in_regime(1.0));
  CHECK_FALSE(bw.pair_bandwidth_in_regime(0.0));
}
