// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file quadrature.hpp
 * @brief Adaptive Gauss-Kronrod 7/15 quadrature for scalar, complex and
 *        Eigen-vector valued integrands.
 */

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

#include "ginlab/errors.hpp"

namespace ginlab {

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double scalar_part(double v) { return v; }
inline double scalar_part(const std::complex<double>& v) { return v.real(); }
template <typename Derived>
double scalar_part(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : std::real(v(0));
}

// Kronrod abscissae on [0, 1]; odd indices are the Gauss 7-point nodes.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

template <typename T>
struct QuadratureResult {
  T value;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

/// Integral of f over [a, b].  Intervals with the largest error estimate are
/// bisected until the summed estimate meets max(abs_tol, rel_tol |I|).
/// Throws NumericError carrying the partial value otherwise.
template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>> {
  using T = std::decay_t<decltype(f(a))>;
  struct Piece {
    double a, b;
    T value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  int evals = 0;
  const auto rule = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const T fc = f(c);
    T kronrod = fc * detail::kWgk[7];
    T gauss = fc * detail::kWg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = h * detail::kXgk[j];
      const T sum = f(c - dx) + f(c + dx);
      kronrod = kronrod + sum * detail::kWgk[j];
      if (j % 2 == 1) gauss = gauss + sum * detail::kWg[j / 2];
    }
    evals += 15;
    const T value = kronrod * h;
    const T diff = (kronrod - gauss) * h;
    return Piece{lo, hi, value, detail::magnitude(diff)};
  };

  std::priority_queue<Piece> heap;
  Piece first = rule(a, b);
  T total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
    if (static_cast<int>(heap.size()) >= opt.max_intervals)
      throw NumericError("quadrature did not converge", detail::scalar_part(total));
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Piece l = rule(worst.a, mid), r = rule(mid, worst.b);
    total = total - worst.value + l.value + r.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    // Re-sum occasionally so the running error does not drift.
    if (heap.size() % 64 == 0) {
      auto copy = heap;
      err = 0.0;
      while (!copy.empty()) {
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, err, evals, static_cast<int>(heap.size())};
}

}  // namespace ginlab
