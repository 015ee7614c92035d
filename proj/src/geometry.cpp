// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <json.hpp>

namespace ginlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SupportMap::SupportMap(const Eigen::MatrixXcd& a0) : n_(a0.rows()) {
  if (a0.rows() != a0.cols() || a0.rows() == 0) throw UsageError("A0 must be square and non-empty");
  diagonal_ = a0.isDiagonal(0.0);
  if (diagonal_) {
    eig_ = a0.diagonal();
    return;
  }
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(a0, false);
  if (schur.info() != Eigen::Success) throw NumericError("Schur decomposition of A0 failed");
  t_ = schur.matrixT().triangularView<Eigen::Upper>();
  eig_ = t_.diagonal();
}

FValue SupportMap::operator()(cd z) const {
  FValue out;
  if ((eig_.array() - z).abs().minCoeff() < kPoleTolerance) {
    out.value = kInf;
    out.inside_spectrum = true;
    return out;
  }
  const double nd = static_cast<double>(n_);
  if (diagonal_) {
    out.value = (1.0 / (eig_.array() - z).abs2()).sum() / nd;
  } else {
    Eigen::MatrixXcd m = t_;
    m.diagonal().array() -= z;
    const Eigen::MatrixXcd r = m.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(n_, n_));
    out.value = r.squaredNorm() / nd;
  }
  if (!std::isfinite(out.value)) {
    out.value = kInf;
    out.inside_spectrum = true;
  }
  return out;
}

cd SupportMap::gradient(cd z) const {
  if ((eig_.array() - z).abs().minCoeff() < kPoleTolerance) throw DomainError("gradient of F at an eigenvalue of A0");
  const double nd = static_cast<double>(n_);
  if (diagonal_) {
    const Eigen::ArrayXcd s = eig_.array() - z;
    return 2.0 * (s / s.abs2().square()).sum() / nd;
  }
  Eigen::MatrixXcd m = t_;
  m.diagonal().array() -= z;
  const Eigen::MatrixXcd r = m.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(n_, n_));
  // Tr G^2 (A0 - z) = Tr R^* R R^* with R = (T - z)^{-1}.
  return 2.0 * (r.adjoint() * r * r.adjoint()).trace() / nd;
}

FValue F_of_z(const Eigen::MatrixXcd& a0, cd z) { return SupportMap(a0)(z); }

std::size_t BoundaryContour::vertex_count() const noexcept {
  std::size_t c = 0;
  for (const auto& p : polylines) c += p.size();
  return c;
}

namespace {

/// a outside (F < 1), b inside.
cd bisect_crossing(const SupportMap& f, cd a, cd b, double tol, bool& ok) {
  cd best = a;
  double best_err = std::abs(f(a).value - 1.0);
  for (int it = 0; it < 200; ++it) {
    const cd m = 0.5 * (a + b);
    const double v = f(m).value;
    const double err = std::abs(v - 1.0);
    if (err < best_err) {
      best = m;
      best_err = err;
    }
    if (err <= 0.5 * tol) break;
    (v > 1.0 ? b : a) = m;
    if (std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(m))) break;
  }
  ok = best_err <= tol;
  return best;
}

}  // namespace

BoundaryContour trace_boundary(const Eigen::MatrixXcd& a0, const Box& box, double grid_step, double tol) {
  return trace_boundary(SupportMap(a0), box, grid_step, tol);
}

BoundaryContour trace_boundary(const SupportMap& f, const Box& box, double grid_step, double tol) {
  if (!(grid_step > 0.0)) throw UsageError("grid_step must be positive");
  if (!(box.re_max > box.re_min) || !(box.im_max > box.im_min)) throw UsageError("empty bounding box");
  for (Index i = 0; i < f.eigenvalues().size(); ++i)
    if (!box.contains(f.eigenvalues()(i))) throw UsageError("bounding box does not contain every eigenvalue of A0");

  const auto nx = static_cast<Index>(std::floor((box.re_max - box.re_min) / grid_step + 1e-9)) + 1;
  const auto ny = static_cast<Index>(std::floor((box.im_max - box.im_min) / grid_step + 1e-9)) + 1;
  if (nx < 2 || ny < 2) throw UsageError("grid_step larger than the box");
  if (static_cast<double>(nx) * static_cast<double>(ny) > 4e7) throw CapacityError("grid too fine for the box");

  BoundaryContour out;
  out.grid_step = grid_step;
  out.refinement_tolerance = tol;

  const auto node = [&](Index i, Index j) {
    return cd(box.re_min + static_cast<double>(i) * grid_step, box.im_min + static_cast<double>(j) * grid_step);
  };
  std::vector<char> in(static_cast<std::size_t>(nx * ny));
  const auto at = [&](Index i, Index j) -> char& { return in[static_cast<std::size_t>(j * nx + i)]; };
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) at(i, j) = f(node(i, j)).value > 1.0;

  bool touches = false;
  for (Index i = 0; i < nx; ++i) touches |= at(i, 0) || at(i, ny - 1);
  for (Index j = 0; j < ny; ++j) touches |= at(0, j) || at(nx - 1, j);
  if (touches) out.warnings.push_back("level set reaches the bounding box; contour is clipped");

  // Crossing points keyed by grid edge: 2*(j*nx+i) horizontal, +1 vertical.
  std::vector<cd> points;
  std::unordered_map<std::int64_t, std::int64_t> index_of;
  bool all_ok = true;
  const auto crossing = [&](Index i0, Index j0, Index i1, Index j1, bool vertical) {
    const std::int64_t key = 2 * (j0 * nx + i0) + (vertical ? 1 : 0);
    if (auto it = index_of.find(key); it != index_of.end()) return it->second;
    cd a = node(i0, j0), b = node(i1, j1);
    if (at(i0, j0)) std::swap(a, b);
    bool ok = true;
    points.push_back(bisect_crossing(f, a, b, tol, ok));
    all_ok &= ok;
    const auto idx = static_cast<std::int64_t>(points.size()) - 1;
    index_of.emplace(key, idx);
    return idx;
  };

  std::vector<std::vector<std::int64_t>> adj;
  const auto link = [&](std::int64_t a, std::int64_t b) {
    adj.resize(points.size());
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  };

  for (Index j = 0; j + 1 < ny; ++j)
    for (Index i = 0; i + 1 < nx; ++i) {
      const bool s0 = at(i, j), s1 = at(i + 1, j), s2 = at(i + 1, j + 1), s3 = at(i, j + 1);
      const int crossed = (s0 != s1) + (s1 != s2) + (s2 != s3) + (s3 != s0);
      if (crossed == 0) continue;
      const auto e0 = [&] { return crossing(i, j, i + 1, j, false); };
      const auto e1 = [&] { return crossing(i + 1, j, i + 1, j + 1, true); };
      const auto e2 = [&] { return crossing(i, j + 1, i + 1, j + 1, false); };
      const auto e3 = [&] { return crossing(i, j, i, j + 1, true); };
      if (crossed == 4) {
        const bool centre = f(node(i, j) + cd(0.5 * grid_step, 0.5 * grid_step)).value > 1.0;
        if (centre == s0) {
          link(e0(), e1());
          link(e2(), e3());
        } else {
          link(e0(), e3());
          link(e1(), e2());
        }
        continue;
      }
      std::vector<std::int64_t> ends;
      if (s0 != s1) ends.push_back(e0());
      if (s1 != s2) ends.push_back(e1());
      if (s2 != s3) ends.push_back(e2());
      if (s3 != s0) ends.push_back(e3());
      link(ends[0], ends[1]);
    }
  adj.resize(points.size());
  if (!all_ok) out.warnings.push_back("some crossings did not reach the refinement tolerance");

  std::vector<char> used(points.size(), 0);
  const auto walk = [&](std::int64_t start) {
    std::vector<cd> line{points[static_cast<std::size_t>(start)]};
    used[static_cast<std::size_t>(start)] = 1;
    std::int64_t prev = -1, cur = start;
    for (;;) {
      std::int64_t next = -1;
      for (auto nb : adj[static_cast<std::size_t>(cur)])
        if (nb != prev && !used[static_cast<std::size_t>(nb)]) {
          next = nb;
          break;
        }
      if (next < 0) {
        // Closed when the walk returns to its start.
        for (auto nb : adj[static_cast<std::size_t>(cur)])
          if (nb == start && nb != prev && line.size() > 2) line.push_back(line.front());
        break;
      }
      used[static_cast<std::size_t>(next)] = 1;
      line.push_back(points[static_cast<std::size_t>(next)]);
      prev = cur;
      cur = next;
    }
    return line;
  };
  for (std::size_t p = 0; p < points.size(); ++p)
    if (!used[p] && adj[p].size() == 1) out.polylines.push_back(walk(static_cast<std::int64_t>(p)));
  for (std::size_t p = 0; p < points.size(); ++p)
    if (!used[p]) out.polylines.push_back(walk(static_cast<std::int64_t>(p)));

  if (out.polylines.empty()) out.warnings.push_back("no level crossing F = 1 found in the box");
  return out;
}

NearestPoint nearest_boundary(cd z, const BoundaryContour& contour) {
  if (contour.empty()) throw UsageError("nearest_boundary on an empty contour");
  NearestPoint best;
  best.dist = kInf;
  for (std::size_t c = 0; c < contour.polylines.size(); ++c) {
    const auto& line = contour.polylines[c];
    const auto consider = [&](cd p) {
      const double d = std::abs(z - p);
      if (d < best.dist) best = {p, d, c};
    };
    if (line.size() == 1) consider(line.front());
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const cd a = line[i], b = line[i + 1], ab = b - a;
      const double len2 = std::norm(ab);
      const double s = len2 > 0.0 ? std::clamp(std::real((z - a) * std::conj(ab)) / len2, 0.0, 1.0) : 0.0;
      consider(a + s * ab);
    }
  }
  return best;
}

cd refine_foot_point(const SupportMap& f, cd z, cd p, double tol) {
  for (int it = 0; it < 100; ++it) {
    const cd g = f.gradient(p);
    const double gg = std::norm(g);
    if (gg == 0.0) throw NumericError("vanishing gradient of F on the boundary");
    const cd normal = g / std::sqrt(gg), tangent = cd(0.0, 1.0) * normal;
    const cd newton = -(f(p).value - 1.0) * g / gg;
    const cd slide = std::real((z - p - newton) * std::conj(tangent)) * tangent;
    const cd step = newton + slide;
    p += step;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(p))) return p;
  }
  throw NumericError("foot point refinement did not converge");
}

std::string to_string(Location l) {
  switch (l) {
    case Location::inside: return "inside";
    case Location::boundary: return "boundary";
    case Location::outside: return "outside";
  }
  return "unknown";
}

UStar solve_u_star(const SpectrumCache& cache, double width) {
  UStar out;
  if (cache.eigenvalues()(0) > kPoleTolerance) {
    const double f0 = resolvent_trace(cache, 0.0).real();
    if (f0 <= 1.0) {
      out.location = std::abs(f0 - 1.0) <= 1e-12 ? Location::boundary : Location::outside;
      return out;
    }
  }
  // n^{-1} Tr G(u^2) <= u^{-2}, so the root lies in (0, 1].
  double lo = 0.0, hi = 1.0;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (resolvent_trace(cache, mid * mid).real() > 1.0 ? lo : hi) = mid;
    out.bracket_widths.push_back(hi - lo);
  }
  out.value = 0.5 * (lo + hi);
  return out;
}

SaddleCoefficients saddle_coefficients(const Eigen::MatrixXcd& a0, cd z, const BoundaryContour& contour,
                                       BasePoint base) {
  return saddle_coefficients(SupportMap(a0), a0, z, contour, base);
}

SaddleCoefficients saddle_coefficients(const SupportMap& f, const Eigen::MatrixXcd& a0, cd z,
                                       const BoundaryContour& contour, BasePoint base) {
  const SpectrumCache cache = build_Y0_spectrum(a0, z);
  const UStar us = solve_u_star(cache);
  if (us.location == Location::outside) throw DomainError("z lies outside D");
  SaddleCoefficients s;
  s.z = z;
  s.base = base;
  s.location = us.location;
  s.u_star = us.value;
  const double x0 = base == BasePoint::zero ? 0.0 : us.value * us.value;
  s.c2 = resolvent_trace(cache, x0, 2).real();
  s.c3 = resolvent_trace(cache, x0, 3).real();

  const NearestPoint near = nearest_boundary(z, contour);
  s.z_star = refine_foot_point(f, z, near.z_star);
  s.dist = std::abs(z - s.z_star);
  s.delta = std::sqrt(s.dist);
  s.k = std::abs(f.gradient(s.z_star));
  const double h = 1e-5;
  const double dx = (f(s.z_star + h).value - f(s.z_star - h).value) / (2 * h);
  const double dy = (f(s.z_star + cd(0, h)).value - f(s.z_star - cd(0, h)).value) / (2 * h);
  s.k_fd = std::hypot(dx, dy);
  return s;
}

cd F_tilde_bulk(const SpectrumCache& c, cd t) { return -log_det_L(c, -t * t) - t * t; }

DominanceReport verify_saddle_dominance(const SpectrumCache& c, double u_star, double kappa, double C0, int samples) {
  if (!(u_star > 0.0)) throw UsageError("dominance check needs u* > 0");
  if (!(kappa > 0.0 && kappa < u_star)) throw UsageError("kappa must lie in (0, u*)");
  if (samples < 2) throw UsageError("need at least two samples");
  DominanceReport r;
  const cd saddle(0.0, u_star);
  r.value_at_saddle = F_tilde_bulk(c, saddle).real();
  r.c0_condition = c.eigenvalues()(0) <= kPoleTolerance || std::log(C0 * C0) > log_det_L(c, 0.0).real() + 2.0;

  const double h = 1e-4;
  r.second_difference = (F_tilde_bulk(c, saddle + h).real() - 2.0 * r.value_at_saddle +
                         F_tilde_bulk(c, saddle - h).real()) / (h * h);

  r.segment_max = r.ray_max = -kInf;
  const cd corner(C0, C0);
  // Far enough that -L_n(-t^2) - t^2 is dominated by the quadratic decrease.
  const double ray_len = 10.0 * std::max(1.0, C0);
  for (int side : {1, -1}) {
    const auto mirror = [side](cd t) { return side > 0 ? t : -std::conj(t); };
    const cd a = saddle + kappa;
    for (int i = 0; i <= samples; ++i) {
      const double s = static_cast<double>(i) / samples;
      r.segment_max = std::max(r.segment_max, F_tilde_bulk(c, mirror(a + s * (corner - a))).real());
      const double tau = ray_len * std::pow(s, 2.0);
      if (i > 0) r.ray_max = std::max(r.ray_max, F_tilde_bulk(c, mirror(corner + tau)).real());
    }
  }
  r.margin = std::max(r.segment_max, r.ray_max) - r.value_at_saddle;
  return r;
}

void write_contour_csv(const std::string& path, const BoundaryContour& contour) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "component_id,re,im\n";
  char buf[96];
  for (std::size_t c = 0; c < contour.polylines.size(); ++c)
    for (const cd& p : contour.polylines[c]) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", c, p.real(), p.imag());
      out << buf;
    }
}

void write_contour_sidecar(const std::string& path, const BoundaryContour& contour, const std::string& a0_digest,
                           std::optional<std::uint64_t> seed) {
  nlohmann::json j;
  j["grid_step"] = contour.grid_step;
  j["refinement_tolerance"] = contour.refinement_tolerance;
  j["components"] = contour.polylines.size();
  j["vertices"] = contour.vertex_count();
  j["a0_digest"] = a0_digest;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["warnings"] = contour.warnings;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string matrix_digest(const Eigen::MatrixXcd& m) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) h = (h ^ b[i]) * 1099511628211ULL;
  };
  const long long dims[2] = {static_cast<long long>(m.rows()), static_cast<long long>(m.cols())};
  mix(dims, sizeof dims);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const double v[2] = {m(i, j).real(), m(i, j).imag()};
      mix(v, sizeof v);
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ginlab
