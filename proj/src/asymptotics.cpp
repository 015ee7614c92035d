// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/asymptotics.hpp"

#include <cmath>

#include "ginlab/quadrature.hpp"
#include "ginlab/special.hpp"

namespace ginlab {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::edge: return "edge";
    case Regime::bulk: return "bulk";
    case Regime::transition: return "transition";
  }
  return "unknown";
}

Regime parse_regime(const std::string& s) {
  if (s == "edge") return Regime::edge;
  if (s == "bulk") return Regime::bulk;
  if (s == "transition") return Regime::transition;
  throw UsageError("unknown regime '" + s + "'");
}

double RegimeInput::eps() const {
  if (regime == Regime::edge) return eps_tilde * std::pow(n, -0.75);
  return eps_tilde / (delta * n);
}

void RegimeInput::validate() const {
  if (!(n >= 1.0)) throw UsageError("n must be >= 1");
  if (!(eps_tilde > 0.0)) throw UsageError("eps_tilde must be positive");
  if (regime == Regime::edge) {
    if (!(delta_tilde >= 0.0)) throw UsageError("delta_tilde must be non-negative");
    if (!(coeffs.c2 > 0.0)) throw UsageError("edge evaluator needs c2 > 0");
    return;
  }
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
}

RegimeInput RegimeInput::from_coefficients(Regime r, double n, double eps_tilde, const SaddleCoefficients& c) {
  RegimeInput in;
  in.regime = r;
  in.n = n;
  in.eps_tilde = eps_tilde;
  in.coeffs = c;
  if (r == Regime::edge)
    in.delta_tilde = std::sqrt(c.dist * std::sqrt(n));
  else
    in.delta = c.delta;
  return in;
}

cd edge_polynomial(double u, cd t, double k_delta2, double c2) {
  const cd a = -k_delta2 + c2 * (u * u - t * t);
  return a * a + c2 * c2 * t * t * u * u;
}

namespace {

constexpr cd kI{0.0, 1.0};

/// Coefficient of u^{2p} t^{2q} in edge_polynomial.
double poly_coeff(int p, int q, double kd, double c2) {
  if (p == 0 && q == 0) return kd * kd;
  if (p == 1 && q == 0) return -2.0 * kd * c2;
  if (p == 0 && q == 1) return 2.0 * kd * c2;
  if (p == 2 && q == 0) return c2 * c2;
  if (p == 0 && q == 2) return c2 * c2;
  if (p == 1 && q == 1) return -c2 * c2;
  return 0.0;
}

}  // namespace

EdgeResult edge_integral(double k, double c2, double delta_tilde, double eps_tilde, const EdgeOptions& opt) {
  if (!(c2 > 0.0)) throw UsageError("edge integral needs c2 > 0");
  if (!(eps_tilde > 0.0)) throw UsageError("eps_tilde must be positive");
  if (!(opt.contour_offset > 0.0)) throw UsageError("contour offset must be positive");
  const double kd = k * delta_tilde * delta_tilde;
  const double width = std::pow(c2, -0.25);
  EdgeResult res;

  // u integrals: exponent U + 2 eps u with U = kd u^2 - c2 u^4 / 2, Bessel
  // factors scaled by e^{-2 eps u}.
  const auto expo = [&](double u) { return kd * u * u - 0.5 * c2 * u * u * u * u + 2.0 * eps_tilde * u; };
  const double u_hi = 8.0 * width + 2.0 * std::sqrt(std::max(kd, 0.0) / c2) + 2.0 * std::cbrt(eps_tilde / c2);
  double peak = 0.0, u_peak = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double u = u_hi * i / 4000.0;
    if (expo(u) > peak) {
      peak = expo(u);
      u_peak = u;
    }
  }
  double u_cut = std::max(8.0 * width, 2.0 * u_peak);
  while (expo(u_cut) - peak > -40.0) u_cut *= 1.25;
  res.u_cut = u_cut;
  const auto u_integrand = [&](double u) {
    const double y = 2.0 * eps_tilde * u;
    const double w = std::exp(expo(u) - peak);
    const double num = u * u * bessel_i1_scaled(y) * w, den = u * bessel_i0_scaled(y) * w;
    const double u2 = u * u;
    Eigen::Matrix<double, 6, 1> v;
    v << num, num * u2, num * u2 * u2, den, den * u2, den * u2 * u2;
    return v;
  };
  QuadratureOptions qopt{1e-300, opt.rel_tol, 4000};
  const Eigen::Matrix<double, 6, 1> uv = integrate(u_integrand, 0.0, u_cut, qopt).value;

  // t integrals: segment [i a - b, i a + b] at the height of the saddle
  // t^2 = -kd/c2, then rays e^{i pi/4} and e^{3 i pi/4} from its ends.
  // The vertical curvature of the exponent at the saddle is 4 kd, so the
  // offset is measured in min(c2^{-1/4}, kd^{-1/2}); a larger lift makes the
  // integrand peak exceed the integral by e^{2 offset^2 kd} and cancel.
  const double s0 = std::sqrt(std::max(kd, 0.0) / c2);
  const double lift = kd > 0.0 ? std::min(width, 1.0 / std::sqrt(kd)) : width;
  const double a = opt.contour_offset * lift + s0, b = std::sqrt(2.0) * s0;
  const cd right = std::polar(1.0, M_PI / 4), left = std::polar(1.0, 3 * M_PI / 4);
  const auto t_expo = [&](cd t) { return kd * t * t + 0.5 * c2 * t * t * t * t + 2.0 * kI * eps_tilde * t; };
  double t_ref = -1e300;
  for (int i = 0; i <= 400; ++i) {
    const double x = i / 400.0;
    t_ref = std::max({t_ref, t_expo(cd(-b + 2.0 * b * x, a)).real(), t_expo(cd(b, a) + right * (8.0 * width * x)).real()});
  }
  double t_cut = 8.0 * width;
  while (t_expo(cd(b, a) + right * t_cut).real() - t_ref > -40.0) t_cut *= 1.25;
  res.t_cut = t_cut;
  const auto kernel = [&](cd t, cd dir) {
    const cd kern = t * std::exp(t_expo(t) - t_ref) * w_kernel(-kI * eps_tilde * t) * dir;
    const cd t2 = t * t;
    Eigen::Vector3cd v(kern, kern * t2, kern * t2 * t2);
    return v;
  };
  const auto ray_integrand = [&](double tau) -> Eigen::Vector3cd {
    return kernel(cd(b, a) + right * tau, right) - kernel(cd(-b, a) + left * tau, left);
  };
  Eigen::Vector3cd tv = integrate(ray_integrand, 0.0, t_cut, qopt).value;
  if (b > 0.0) {
    const auto seg_integrand = [&](double x) -> Eigen::Vector3cd { return kernel(cd(x, a), 1.0); };
    tv += integrate(seg_integrand, -b, b, qopt).value;
  }

  cd num = 0.0, den = 0.0;
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const double c = poly_coeff(p, q, kd, c2);
      if (c == 0.0) continue;
      num += c * uv(p) * tv(q);
      den += c * uv(3 + p) * tv(q);
    }
  if (std::abs(den) == 0.0) throw NumericError("edge integral normalisation vanished");
  res.I = num / (eps_tilde * den);
  return res;
}

EdgeResult edge_T(const RegimeInput& in, const EdgeOptions& opt) {
  if (in.regime != Regime::edge) throw RegimeError("edge_T called with a non-edge regime");
  in.validate();
  EdgeResult r = edge_integral(in.coeffs.k, in.coeffs.c2, in.delta_tilde, in.eps_tilde, opt);
  r.T = std::sqrt(in.n) * r.I.real();
  return r;
}

double bulk_formula(double n, double eps_tilde, double delta, double u_star) {
  if (!(u_star > 0.0)) throw RegimeError("bulk formula needs u* > 0");
  if (!(delta > 0.0) || !(eps_tilde > 0.0) || !(n >= 1.0)) throw UsageError("bulk formula needs positive n, eps, delta");
  const double eps = eps_tilde / (delta * n);
  const double y = 2.0 * eps_tilde * u_star / delta;
  const BesselRatio r = bessel_ratio(y);
  // g [u + (1 + y g'/g) u e^{-y} I0 V1] written without the division by g.
  const double corr = u_star * bessel_i0_scaled(y) * v_kernel(y);
  return (r.g * u_star + (r.g + y * r.dg) * corr) / eps;
}

double bulk_T(const RegimeInput& in) {
  if (in.regime != Regime::bulk) throw RegimeError("bulk_T called with a non-bulk regime");
  in.validate();
  if (in.coeffs.location != Location::inside || !(in.coeffs.u_star > 0.0)) throw RegimeError("bulk_T needs z inside D");
  return bulk_formula(in.n, in.eps_tilde, in.delta, in.coeffs.u_star);
}

TransitionResult transition_T(const RegimeInput& in) {
  if (in.regime != Regime::transition) throw RegimeError("transition_T called with a non-transition regime");
  in.validate();
  const double d4n = std::pow(in.delta, 4) * in.n;
  if (d4n <= 10.0) throw RegimeError("transition regime needs delta^4 n > 10");
  if (!(in.coeffs.c2 > 0.0) || !(in.coeffs.k > 0.0)) throw UsageError("transition needs k, c2 > 0");
  TransitionResult r;
  r.error_scale = 1.0 / std::sqrt(d4n);
  r.u_star = std::sqrt(in.coeffs.k / in.coeffs.c2) * in.delta;
  r.value = bulk_formula(in.n, in.eps_tilde, in.delta, r.u_star);
  return r;
}

double tail_scale(double n, double dist) {
  if (!(n >= 1.0) || !(dist > 0.0)) throw UsageError("tail_scale needs n >= 1 and dist > 0");
  return std::min(std::pow(n, -1.5), 1.0 / (n * n * dist));
}

double tail_bound(double x) {
  if (!(x > 0.0)) throw UsageError("tail_bound needs x > 0");
  return (1.0 + std::abs(std::log(x))) * x;
}

cd h_fn(const SpectrumCache& c, cd x) { return log_det_L(c, x * x) - x * x; }

cd F_tilde_edge(const SpectrumCache& c, cd t, double eps) {
  const cd s = t - kI * eps;
  return -log_det_L(c, -t * t) - s * s;
}

}  // namespace ginlab
