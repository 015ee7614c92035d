// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file geometry.hpp
 * @brief The support map F(z) = n^{-1} Tr Y0(z)^{-1}, its level line F = 1,
 *        and the saddle-point coefficients derived from Y0.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ginlab/ensembles.hpp"

namespace ginlab {

struct FValue {
  double value = 0.0;            ///< +infinity when Y0 is singular
  bool inside_spectrum = false;  ///< z within kPoleTolerance of an eigenvalue of A0
};

/// Evaluates F and its gradient for one A0.  A complex Schur form is computed
/// once; diagonal A0 takes an O(n) path.
class SupportMap {
 public:
  explicit SupportMap(const Eigen::MatrixXcd& a0);

  [[nodiscard]] Index n() const noexcept { return n_; }
  [[nodiscard]] const Eigen::VectorXcd& eigenvalues() const noexcept { return eig_; }

  [[nodiscard]] FValue operator()(cd z) const;
  /// dF/dx + i dF/dy = 2 n^{-1} Tr G^2(0)(A0 - z), G from Y0(z).
  [[nodiscard]] cd gradient(cd z) const;

 private:
  Index n_ = 0;
  bool diagonal_ = false;
  Eigen::VectorXcd eig_;
  Eigen::MatrixXcd t_;  // upper triangular Schur factor
};

[[nodiscard]] FValue F_of_z(const Eigen::MatrixXcd& a0, cd z);

struct Box {
  double re_min = -2.0, re_max = 2.0, im_min = -2.0, im_max = 2.0;
  [[nodiscard]] bool contains(cd z) const noexcept {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
  }
};

struct BoundaryContour {
  std::vector<std::vector<cd>> polylines;  ///< closed ones repeat the first point at the end
  double grid_step = 0.0;
  double refinement_tolerance = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] bool empty() const noexcept { return polylines.empty(); }
  [[nodiscard]] std::size_t vertex_count() const noexcept;
};

inline constexpr double kBoundaryTolerance = 1e-8;

/// Marching squares on F - 1 over `box`, crossings refined by bisection along
/// grid edges until |F - 1| <= tol.  Every eigenvalue of A0 must lie in the box.
[[nodiscard]] BoundaryContour trace_boundary(const Eigen::MatrixXcd& a0, const Box& box, double grid_step,
                                             double tol = kBoundaryTolerance);
[[nodiscard]] BoundaryContour trace_boundary(const SupportMap& f, const Box& box, double grid_step,
                                             double tol = kBoundaryTolerance);

struct NearestPoint {
  cd z_star = 0.0;
  double dist = 0.0;
  std::size_t component = 0;
};

/// Closest point of the polylines to z, interpolating along segments.
[[nodiscard]] NearestPoint nearest_boundary(cd z, const BoundaryContour& contour);

/// Moves p onto F = 1 and along the level line until z - p is normal to it.
[[nodiscard]] cd refine_foot_point(const SupportMap& f, cd z, cd p, double tol = 1e-13);

enum class Location { inside, boundary, outside };

[[nodiscard]] std::string to_string(Location l);

struct UStar {
  double value = 0.0;
  Location location = Location::inside;
  std::vector<double> bracket_widths;  ///< one entry per bisection step
};

/// Positive root of n^{-1} Tr G(u^2) = 1 by bisection on [0, 1] to width 1e-12.
/// Returns 0 with a boundary or outside flag when n^{-1} Tr G(0) <= 1.
[[nodiscard]] UStar solve_u_star(const SpectrumCache& cache, double width = 1e-12);

/// Base point of the resolvent powers c_k = n^{-1} Tr G^k(x0).
enum class BasePoint { zero, u_star_squared };

struct SaddleCoefficients {
  double u_star = 0.0;
  double c2 = 0.0, c3 = 0.0;
  double k = 0.0;     ///< closed form at z_star
  double k_fd = 0.0;  ///< central differences of F at z_star
  double dist = 0.0;
  double delta = 0.0;  ///< sqrt(dist)
  cd z = 0.0, z_star = 0.0;
  BasePoint base = BasePoint::zero;
  Location location = Location::inside;
};

/// c2, c3 from Y0(z) at the chosen base point; u_star at z; k at the refined
/// foot point of z on the contour.  z must lie in the closure of D.
[[nodiscard]] SaddleCoefficients saddle_coefficients(const Eigen::MatrixXcd& a0, cd z, const BoundaryContour& contour,
                                                     BasePoint base);
[[nodiscard]] SaddleCoefficients saddle_coefficients(const SupportMap& f, const Eigen::MatrixXcd& a0, cd z,
                                                     const BoundaryContour& contour, BasePoint base);

/// F~(t) = -L_n(-t^2) - t^2.
[[nodiscard]] cd F_tilde_bulk(const SpectrumCache& c, cd t);

struct DominanceReport {
  double value_at_saddle = 0.0;  ///< Re F~(i u*)
  double segment_max = 0.0;      ///< over [i u* + kappa, C0 + i C0] and its mirror
  double ray_max = 0.0;          ///< over C0 + i C0 + tau, tau > 0, and its mirror
  double margin = 0.0;           ///< max(segment_max, ray_max) - value_at_saddle
  double second_difference = 0.0;  ///< of Re F~(i u* + x) at x = 0
  bool c0_condition = false;     ///< log C0^2 > L_n(0) + 2
  [[nodiscard]] bool dominated() const noexcept { return margin < 0.0 && c0_condition; }
};

[[nodiscard]] DominanceReport verify_saddle_dominance(const SpectrumCache& c, double u_star, double kappa, double C0,
                                                      int samples = 2000);

/// CSV rows `component_id,re,im`.
void write_contour_csv(const std::string& path, const BoundaryContour& contour);
/// JSON sidecar with grid step, tolerance, deformation digest and seed.
void write_contour_sidecar(const std::string& path, const BoundaryContour& contour, const std::string& a0_digest,
                           std::optional<std::uint64_t> seed);

/// FNV-1a digest of the matrix entries, as 16 hex digits.
[[nodiscard]] std::string matrix_digest(const Eigen::MatrixXcd& m);

}  // namespace ginlab
