// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file special.hpp
 * @brief Modified Bessel functions of order 0 and 1, their ratio, and the
 *        V1 and W4 kernels.
 */

#pragma once

#include <complex>

namespace ginlab {

/// e^{-y} I0(y) and e^{-y} I1(y) for y >= 0.
[[nodiscard]] double bessel_i0_scaled(double y);
[[nodiscard]] double bessel_i1_scaled(double y);
[[nodiscard]] double bessel_i0(double y);
[[nodiscard]] double bessel_i1(double y);

/// Switch between the power series and the continued fraction in bessel_ratio.
inline constexpr double kRatioSwitch = 8.0;

struct BesselRatio {
  double g = 0.0;       ///< I1(y) / I0(y)
  double dg = 0.0;      ///< g'(y) = 1 - g/y - g^2
  double log_dg = 0.0;  ///< g'/g; 1/y + O(y) at small y, set to +inf at y = 0
};

/// g(y) = I1(y)/I0(y): 30-term power series for y <= 8, continued fraction above.
[[nodiscard]] BesselRatio bessel_ratio(double y);
[[nodiscard]] double bessel_ratio_series(double y, int terms = 30);
[[nodiscard]] double bessel_ratio_fraction(double y);

/// V1(x) = int_R e^{-2 x v^2} (v^2 + 1)^{-1/2} dv, x > 0.
[[nodiscard]] double v_kernel(double x);

enum class KernelScheme { sinh_substitution, direct };

/// W4(w) = int_R e^{-w v^2} (v^2 + 4)^{-1/2} dv, Re w > 0.
[[nodiscard]] std::complex<double> w_kernel(std::complex<double> w,
                                            KernelScheme scheme = KernelScheme::sinh_substitution);

}  // namespace ginlab
