#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "cvtest/weight.hpp"

using cvtest::WeightFn;

TEST_CASE("weight is zero outside, one on the plateau, monotone on ramps") {
  const WeightFn w(0.0, 1.0, 0.1);
  CHECK(w(-0.5) == 0.0);
  CHECK(w(0.0) == 0.0);
  CHECK(w(1.0) == 0.0);
  CHECK(w(1.5) == 0.0);
  CHECK(w(0.1) == 1.0);
  CHECK(w(0.5) == 1.0);
  CHECK(w(0.9) == 1.0);
  CHECK(w(0.05) == doctest::Approx(0.5).epsilon(1e-12));  // ramp midpoint
  double prev = 0.0;
  for (double t = 0.0; t <= 0.1 + 1e-12; t += 0.005) {
    const double cur = w(t);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("ramps are smooth: value and first two derivatives vanish/match") {
  const WeightFn w(0.0, 2.0, 0.25);
  const double eps = 1e-6;
  auto d1 = [&](double t) { return (w(t + eps) - w(t - eps)) / (2 * eps); };
  auto d2 = [&](double t) {
    return (w(t + eps) - 2 * w(t) + w(t - eps)) / (eps * eps);
  };
  // At the outer edge (t=0) and the plateau edge (t=0.25), the quintic ramp
  // has matching value, slope and curvature.
  CHECK(std::abs(w(0.0 + 1e-9) - 0.0) < 1e-8);
  CHECK(std::abs(w(0.25 - 1e-9) - 1.0) < 1e-8);
  CHECK(std::abs(d1(1e-4)) < 1e-3);
  CHECK(std::abs(d1(0.25 - 1e-4)) < 1e-3);
  // The curvature decays linearly to zero toward each joint: at distance d
  // it is about 60 d / ramp^3 (= 3.84 at d = 1e-3), a tenth of that at d/10.
  CHECK(std::abs(d2(1e-3)) < 4.5);
  CHECK(std::abs(d2(0.25 - 1e-3)) < 4.5);
  CHECK(std::abs(d2(1e-4)) < 0.45);
  CHECK(std::abs(d2(0.25 - 1e-4)) < 0.45);
  // Mirror symmetry of the two ramps.
  for (double t = 0.0; t <= 0.25; t += 0.01)
    CHECK(w(t) == doctest::Approx(w(2.0 - t)).epsilon(1e-14));
}

TEST_CASE("covering window contains the full interval with weight one-free") {
  const WeightFn w = WeightFn::covering(0.0, 1.0, 0.05);
  // Every point of [0, 1] sits on the plateau.
  for (double t = 0.0; t <= 1.0 + 1e-12; t += 0.01) CHECK(w(t) == 1.0);
  CHECK(w(-0.05) == 0.0);
  CHECK(w(1.05) == 0.0);
  CHECK(w(-0.025) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("weight construction validates its geometry") {
  CHECK_THROWS_AS(WeightFn(1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(WeightFn(0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFn(0.0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(WeightFn(0.0, 1.0, 0.6), std::invalid_argument);
  CHECK_NOTHROW(WeightFn(0.0, 1.0, 0.5));  // ramps may just touch
}
