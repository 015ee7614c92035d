// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/special.hpp"

#include <cmath>
#include <limits>

#include "ginlab/errors.hpp"
#include "ginlab/quadrature.hpp"

namespace ginlab {

namespace {

constexpr double kSeriesLimit = 60.0;

/// sum_k (y/2)^{2k + nu} / (k! (k + nu)!), positive terms.
double bessel_series(double y, int nu) {
  const double q = 0.25 * y * y;
  double term = nu == 0 ? 1.0 : 0.5 * y;
  double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

/// e^{-y} I_nu(y) ~ (2 pi y)^{-1/2} sum_k (-1)^k a_k(nu) / y^k.
double bessel_asymptotic_scaled(double y, int nu) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double f = 2.0 * k - 1.0;
    const double next = -term * (mu - f * f) / (k * 8.0 * y);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * M_PI * y);
}

double scaled(double y, int nu) {
  if (y < 0.0) throw UsageError("modified Bessel function needs y >= 0");
  if (y <= kSeriesLimit) return std::exp(-y) * bessel_series(y, nu);
  return bessel_asymptotic_scaled(y, nu);
}

}  // namespace

double bessel_i0_scaled(double y) { return scaled(y, 0); }
double bessel_i1_scaled(double y) { return scaled(y, 1); }
double bessel_i0(double y) { return y >= 0.0 && y <= kSeriesLimit ? bessel_series(y, 0) : std::exp(y) * scaled(y, 0); }
double bessel_i1(double y) { return y >= 0.0 && y <= kSeriesLimit ? bessel_series(y, 1) : std::exp(y) * scaled(y, 1); }

double bessel_ratio_series(double y, int terms) {
  const double q = 0.25 * y * y;
  double t0 = 1.0, t1 = 0.5 * y, s0 = 1.0, s1 = t1;
  for (int k = 1; k < terms; ++k) {
    t0 *= q / (static_cast<double>(k) * k);
    t1 *= q / (static_cast<double>(k) * (k + 1));
    s0 += t0;
    s1 += t1;
  }
  return s1 / s0;
}

double bessel_ratio_fraction(double y) {
  if (y <= 0.0) return 0.0;
  // I1/I0 = 1/(2/y + 1/(4/y + 1/(6/y + ...))), modified Lentz.
  constexpr double tiny = 1e-300;
  double f = tiny, c = f, d = 0.0;
  for (int m = 1; m < 100000; ++m) {
    const double b = 2.0 * m / y;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

BesselRatio bessel_ratio(double y) {
  if (y < 0.0) throw UsageError("bessel_ratio needs y >= 0");
  BesselRatio r;
  if (y == 0.0) {
    r.dg = 0.5;
    r.log_dg = std::numeric_limits<double>::infinity();
    return r;
  }
  r.g = y <= kRatioSwitch ? bessel_ratio_series(y) : bessel_ratio_fraction(y);
  // 1 - g/y - g^2 cancels at small y; use the series there.
  r.dg = y < 1e-3 ? 0.5 - 3.0 * y * y / 16.0 + 5.0 * y * y * y * y / 192.0 : 1.0 - r.g / y - r.g * r.g;
  r.log_dg = r.dg / r.g;
  return r;
}

double v_kernel(double x) {
  if (!(x > 0.0)) throw DomainError("V1 needs x > 0");
  // v = sinh s: V1(x) = 2 int_0^inf e^{-2x sinh^2 s} ds; beyond the cut the
  // integrand is below e^{-60} and its tail below e^{-60}/(4x sinh s cosh s).
  const double s_cut = std::asinh(std::sqrt(60.0 / (2.0 * x)));
  const auto f = [x](double s) {
    const double sh = std::sinh(s);
    return std::exp(-2.0 * x * sh * sh);
  };
  return 2.0 * integrate(f, 0.0, s_cut, {1e-14, 1e-13}).value;
}

std::complex<double> w_kernel(std::complex<double> w, KernelScheme scheme) {
  if (!(w.real() > 0.0)) throw DomainError("W4 needs Re w > 0");
  const double re = w.real();
  if (scheme == KernelScheme::sinh_substitution) {
    // v = 2 sinh s: W4(w) = 2 int_0^inf e^{-4 w sinh^2 s} ds.
    const double s_cut = std::asinh(std::sqrt(60.0 / (4.0 * re)));
    const auto f = [w](double s) {
      const double sh = std::sinh(s);
      return std::exp(-4.0 * w * sh * sh);
    };
    return 2.0 * integrate(f, 0.0, s_cut, {1e-14, 1e-13}).value;
  }
  const double v_cut = std::sqrt(60.0 / re);
  const auto f = [w](double v) { return std::exp(-w * v * v) / std::sqrt(v * v + 4.0); };
  QuadratureOptions opt{1e-14, 1e-13, 20000};
  return 2.0 * integrate(f, 0.0, v_cut, opt).value;
}

}  // namespace ginlab
