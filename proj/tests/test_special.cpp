// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>

#include "ginlab/quadrature.hpp"
#include "ginlab/special.hpp"

using namespace ginlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Kronrod quadrature", "[quadrature]") {
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  REQUIRE_THAT(r.value, WithinRel(std::sqrt(M_PI), 1e-13));
  const auto c = integrate([](double x) { return std::exp(std::complex<double>(0.0, 3.0) * x); }, 0.0, M_PI);
  REQUIRE(std::abs(c.value - (std::exp(std::complex<double>(0.0, 3.0 * M_PI)) - 1.0) / std::complex<double>(0.0, 3.0)) <
          1e-12);
  const auto v = integrate(
      [](double x) {
        Eigen::Vector3d out(1.0, x, x * x);
        return out;
      },
      0.0, 2.0);
  REQUIRE_THAT(v.value(2), WithinRel(8.0 / 3.0, 1e-14));
  // Integrable endpoint singularity forces refinement.
  const auto s = integrate([](double x) { return 1.0 / std::sqrt(x + 1e-300); }, 0.0, 1.0, {1e-9, 1e-9, 4000});
  REQUIRE_THAT(s.value, WithinAbs(2.0, 1e-8));
  REQUIRE(s.intervals > 10);

  // Failure carries the partial value.
  try {
    (void)integrate([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0, 1.0, {1e-15, 1e-15, 20});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    REQUIRE(std::isfinite(e.partial_value()));
  }
}

TEST_CASE("modified Bessel functions", "[special]") {
  for (double y : {0.0, 0.1, 1.0, 2.0, 7.9, 8.0, 15.0, 40.0, 59.9, 60.1, 100.0, 300.0})
    REQUIRE_THAT(bessel_i0(y), WithinRel(std::cyl_bessel_i(0.0, y), 1e-13));
  for (double y : {0.1, 1.0, 2.0, 8.0, 30.0, 60.1, 120.0})
    REQUIRE_THAT(bessel_i1(y), WithinRel(std::cyl_bessel_i(1.0, y), 1e-13));
  // Scaled form beyond overflow of I0.
  REQUIRE_THAT(bessel_i0_scaled(2000.0) * std::sqrt(2 * M_PI * 2000.0), WithinRel(1.0 + 1.0 / 16000.0 + 9.0 / (128.0 * 4e6), 1e-10));
  // Series and asymptotic branches meet.
  REQUIRE_THAT(bessel_i0_scaled(60.0), WithinRel(bessel_i0_scaled(std::nextafter(60.0, 61.0)), 1e-12));
  REQUIRE_THROWS_AS(bessel_i0(-1.0), UsageError);
}

TEST_CASE("Bessel ratio g", "[special]") {
  REQUIRE(bessel_ratio(0.0).g == 0.0);
  // 80-term series as the high-order oracle.
  REQUIRE_THAT(bessel_ratio(2.0).g, WithinRel(bessel_ratio_series(2.0, 80), 1e-15));
  REQUIRE_THAT(bessel_ratio(2.0).g, WithinRel(0.697774657964007982, 1e-14));
  REQUIRE(std::abs(bessel_ratio(50.0).g - 1.0) < 0.02);
  REQUIRE_THAT(bessel_ratio_series(kRatioSwitch), WithinRel(bessel_ratio_fraction(kRatioSwitch), 1e-9));
  REQUIRE_THAT(bessel_ratio(20.0).g, WithinRel(std::cyl_bessel_i(1.0, 20.0) / std::cyl_bessel_i(0.0, 20.0), 1e-13));

  double prev = 0.0;
  for (double y = 0.05; y < 40.0; y *= 1.1) {
    const auto r = bessel_ratio(y);
    REQUIRE(r.g > prev);
    REQUIRE(r.g < 1.0);
    prev = r.g;
    // g' identity against central differences.
    const double h = 1e-5 * std::max(1.0, y);
    const double fd = (bessel_ratio(y + h).g - bessel_ratio(y - h).g) / (2 * h);
    REQUIRE_THAT(r.dg, WithinAbs(fd, 1e-8));
    REQUIRE_THAT(r.log_dg, WithinRel(r.dg / r.g, 1e-15));
  }
  REQUIRE_THAT(bessel_ratio(1e-4).dg, WithinAbs(0.5, 1e-8));
}

TEST_CASE("V1 kernel", "[special]") {
  for (double x : {0.01, 0.3, 1.0, 2.0, 10.0, 50.0})
    REQUIRE_THAT(v_kernel(x), WithinRel(std::exp(x) * std::cyl_bessel_k(0.0, x), 1e-11));
  REQUIRE(std::abs(v_kernel(1e3) * std::sqrt(2e3 / M_PI) - 1.0) < 0.01);
  REQUIRE(v_kernel(1.0) > v_kernel(2.0));
  double prev = 1e300;
  for (double x = 0.05; x < 100; x *= 1.5) {
    const double v = v_kernel(x);
    REQUIRE(v > 0.0);
    REQUIRE(v < prev);
    prev = v;
  }
  REQUIRE_THROWS_AS(v_kernel(0.0), DomainError);
}

TEST_CASE("W4 kernel", "[special]") {
  for (double w : {0.05, 0.5, 1.0, 3.0, 20.0}) {
    const auto a = w_kernel(w), b = w_kernel(w, KernelScheme::direct);
    REQUIRE(std::abs(a - b) < 1e-9);
    REQUIRE_THAT(a.real(), WithinRel(std::exp(2 * w) * std::cyl_bessel_k(0.0, 2 * w), 1e-11));
    REQUIRE(std::abs(a.imag()) < 1e-15);
  }
  // Complex arguments along the contours used by the edge evaluator.
  for (std::complex<double> w : {std::complex<double>(0.5, -0.5), {1.0, 2.0}, {0.2, -1.0}, {3.0, 3.0}}) {
    REQUIRE(std::abs(w_kernel(w) - w_kernel(w, KernelScheme::direct)) < 1e-9);
    REQUIRE(std::abs(w_kernel(std::conj(w)) - std::conj(w_kernel(w))) < 1e-13);
  }
  REQUIRE(w_kernel(1.0).real() > w_kernel(2.0).real());
  REQUIRE_THROWS_AS(w_kernel({0.0, 1.0}), DomainError);
  REQUIRE_THROWS_AS(w_kernel({-1.0, 0.0}), DomainError);
}
