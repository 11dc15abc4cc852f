#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "cvtest/errors.hpp"
#include "cvtest/kernel.hpp"

using cvtest::Kernel;

TEST_CASE("epanechnikov shape: peak, support edge, symmetry") {
  const Kernel k = Kernel::epanechnikov();
  CHECK(k(0.0) == 0.75);
  CHECK(k(1.0) == 0.0);
  CHECK(k(-1.0) == 0.0);
  CHECK(k(1.5) == 0.0);
  CHECK(k(-2.0) == 0.0);
  CHECK(k(0.5) == doctest::Approx(0.75 * 0.75).epsilon(1e-15));
  for (double u = 0.0; u <= 1.2; u += 0.01) CHECK(k(u) == k(-u));
  CHECK(k.support_radius() == 1.0);
}

TEST_CASE("epanechnikov integrates to one with closed-form moments") {
  const Kernel k = Kernel::epanechnikov();
  const double mass = oracles::simpson([&](double u) { return k(u); }, -1, 1);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  const double l2 =
      oracles::simpson([&](double u) { return k(u) * k(u); }, -1, 1);
  CHECK(l2 == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(k.squared_l2_norm() == doctest::Approx(0.6).epsilon(1e-12));
  const double mu2 =
      oracles::simpson([&](double u) { return u * u * k(u); }, -1, 1);
  CHECK(mu2 == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(k.second_moment() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("truncated gaussian: unit mass and closed forms match quadrature") {
  const Kernel k = Kernel::gaussian_truncated();
  const double r = k.support_radius();
  CHECK(r == 4.0);
  CHECK(k(r + 1e-9) == 0.0);
  CHECK(k(-(r + 1e-9)) == 0.0);
  CHECK(k(r - 1e-9) > 0.0);

  const double mass =
      oracles::simpson([&](double u) { return k(u); }, -r, r, 20000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  const double l2 =
      oracles::simpson([&](double u) { return k(u) * k(u); }, -r, r, 20000);
  CHECK(k.squared_l2_norm() == doctest::Approx(l2).epsilon(1e-10));

  const double mu2 =
      oracles::simpson([&](double u) { return u * u * k(u); }, -r, r, 20000);
  CHECK(k.second_moment() == doctest::Approx(mu2).epsilon(1e-10));

  // Taller than the untruncated normal density at 0 (renormalization).
  CHECK(k(0.0) > 1.0 / std::sqrt(2.0 * M_PI));
}

TEST_CASE("kernel parsing") {
  CHECK(Kernel::parse("epanechnikov").family() ==
        cvtest::KernelFamily::epanechnikov);
  CHECK(Kernel::parse("gaussian-truncated").family() ==
        cvtest::KernelFamily::gaussian_truncated);
  CHECK(Kernel::parse("gaussian").family() ==
        cvtest::KernelFamily::gaussian_truncated);
  CHECK_THROWS_AS((void)Kernel::parse("triangle"), cvtest::InputError);
  CHECK(Kernel::epanechnikov().name() == "epanechnikov");
  CHECK(Kernel::gaussian_truncated().name() == "gaussian-truncated");
}
