// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file asymptotics.hpp
 * @brief Leading-order evaluators of T(z, eps) = E n^{-1} Tr (Y(z) + eps^2)^{-1}
 *        at the edge, in the bulk and in between, and the tail-bound scale.
 */

#pragma once

#include <string>

#include "ginlab/geometry.hpp"

namespace ginlab {

enum class Regime { edge, bulk, transition };

[[nodiscard]] std::string to_string(Regime r);
[[nodiscard]] Regime parse_regime(const std::string& s);

struct RegimeInput {
  Regime regime = Regime::bulk;
  double n = 1.0;
  double eps_tilde = 1.0;
  /// Edge: dist = delta_tilde^2 n^{-1/2}.  Bulk and transition: dist = delta^2.
  double delta_tilde = 0.0;
  double delta = 0.0;
  SaddleCoefficients coeffs;

  /// eps^2 = eps_tilde^2 n^{-3/2} at the edge, eps = eps_tilde / (delta n) otherwise.
  [[nodiscard]] double eps() const;
  void validate() const;

  /// Fills delta or delta_tilde from coeffs.dist.
  [[nodiscard]] static RegimeInput from_coefficients(Regime r, double n, double eps_tilde, const SaddleCoefficients& c);
};

/// Polynomial factor of the edge integrand,
/// (-k d^2 + c2 (u^2 - t^2))^2 + c2^2 t^2 u^2 with d = delta_tilde.
[[nodiscard]] cd edge_polynomial(double u, cd t, double k_delta2, double c2);

struct EdgeOptions {
  /// Height of the t contour above the saddle i (k d^2 / c2)^{1/2}, in units of
  /// min(c2^{-1/4}, (k d^2)^{-1/2}).
  double contour_offset = 0.5;
  double rel_tol = 1e-10;
};

struct EdgeResult {
  cd I = 0.0;       ///< I(delta_tilde, eps_tilde); imaginary part is quadrature noise
  double T = 0.0;   ///< n^{1/2} Re I
  double u_cut = 0.0, t_cut = 0.0;
};

[[nodiscard]] EdgeResult edge_integral(double k, double c2, double delta_tilde, double eps_tilde,
                                       const EdgeOptions& opt = {});
[[nodiscard]] EdgeResult edge_T(const RegimeInput& in, const EdgeOptions& opt = {});

/// T = (1/eps) g(y) [u* + (1 + y g'(y)/g(y)) u* e^{-y} I0(y) V1(y)], y = 2 eps_tilde u* / delta.
[[nodiscard]] double bulk_T(const RegimeInput& in);
/// Same with explicit u*; used by the transition evaluator.
[[nodiscard]] double bulk_formula(double n, double eps_tilde, double delta, double u_star);

struct TransitionResult {
  double value = 0.0;
  double error_scale = 0.0;  ///< (delta^4 n)^{-1/2}
  double u_star = 0.0;       ///< sqrt(k / c2) delta
};

[[nodiscard]] TransitionResult transition_T(const RegimeInput& in);

/// c(n, z) = min(n^{-3/2}, 1 / (n^2 dist)).
[[nodiscard]] double tail_scale(double n, double dist);
/// (1 + |log x|) x.
[[nodiscard]] double tail_bound(double x);

/// h(x) = L_n(x^2) - x^2.
[[nodiscard]] cd h_fn(const SpectrumCache& c, cd x);
/// F~(t) = -L_n(-t^2) - (t - i eps)^2.
[[nodiscard]] cd F_tilde_edge(const SpectrumCache& c, cd t, double eps);

}  // namespace ginlab
