// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <queue>

#include <json.hpp>

#include "ginlab/geometry.hpp"
#include "ginlab/rng.hpp"

using namespace ginlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXcd zeros(Index n) { return Eigen::MatrixXcd::Zero(n, n); }

Eigen::MatrixXcd plus_minus(double a, Index half) {
  std::vector<cd> d;
  for (Index i = 0; i < half; ++i) d.emplace_back(a);
  for (Index i = 0; i < half; ++i) d.emplace_back(-a);
  return realize_deformation(DeformationSpec::diag(d));
}

/// Two-sided Hausdorff distance between the polylines and the unit circle,
/// both sampled densely.
double hausdorff_to_unit_circle(const BoundaryContour& c) {
  double to_circle = 0.0;
  std::vector<cd> pts;
  for (const auto& line : c.polylines)
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
      for (int s = 0; s < 8; ++s) {
        const cd p = line[i] + (line[i + 1] - line[i]) * (s / 8.0);
        pts.push_back(p);
        to_circle = std::max(to_circle, std::abs(std::abs(p) - 1.0));
      }
  double from_circle = 0.0;
  for (int k = 0; k < 4000; ++k) {
    const cd q = std::polar(1.0, 2 * M_PI * k / 4000.0);
    double best = 1e300;
    for (const cd& p : pts) best = std::min(best, std::abs(p - q));
    from_circle = std::max(from_circle, best);
  }
  return std::max(to_circle, from_circle);
}

/// Connected components of {F > 1} on a grid, by flood fill.
int count_inside_components(const SupportMap& f, const Box& b, double h) {
  const int nx = static_cast<int>((b.re_max - b.re_min) / h) + 1, ny = static_cast<int>((b.im_max - b.im_min) / h) + 1;
  std::vector<int> mark(static_cast<std::size_t>(nx * ny), -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) mark[j * nx + i] = f(cd(b.re_min + i * h, b.im_min + j * h)).value > 1.0 ? 0 : -1;
  int comps = 0;
  for (int s = 0; s < nx * ny; ++s) {
    if (mark[s] != 0) continue;
    ++comps;
    std::queue<int> q;
    q.push(s);
    mark[s] = comps;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      const int i = c % nx, j = c / nx;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int a = i + di, bb = j + dj;
        if (a < 0 || bb < 0 || a >= nx || bb >= ny || mark[bb * nx + a] != 0) continue;
        mark[bb * nx + a] = comps;
        q.push(bb * nx + a);
      }
    }
  }
  return comps;
}

}  // namespace

TEST_CASE("F of z", "[geometry]") {
  REQUIRE_THAT(F_of_z(zeros(3), 0.5).value, WithinRel(4.0, 1e-15));
  REQUIRE_THAT(F_of_z(plus_minus(1.0, 1), 0.0).value, WithinRel(1.0, 1e-15));
  REQUIRE(F_of_z(zeros(3), cd(600.0, 800.0)).value < 1e-5);
  const auto at_eigen = F_of_z(plus_minus(1.0, 1), 1.0);
  REQUIRE(at_eigen.inside_spectrum);
  REQUIRE(std::isinf(at_eigen.value));

  // Schur route vs the spectral sum of Y0.
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Eigen::MatrixXcd a0 = sample_ginibre(12, stream_seed(3, s));
    const cd z(0.3, -0.2);
    const double direct = resolvent_trace(build_Y0_spectrum(a0, z), 0.0).real();
    REQUIRE_THAT(F_of_z(a0, z).value, WithinRel(direct, 1e-10));
  }
}

TEST_CASE("gradient of F", "[geometry]") {
  const SupportMap circle(zeros(2));
  REQUIRE_THAT(std::abs(circle.gradient(cd(0.6, 0.8))), WithinRel(2.0, 1e-14));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Eigen::MatrixXcd a0 = sample_ginibre(10, stream_seed(4, s));
    const SupportMap f(a0);
    const cd z(0.9, 0.4);
    const double h = 1e-5;
    const double dx = (f(z + h).value - f(z - h).value) / (2 * h);
    const double dy = (f(z + cd(0, h)).value - f(z - cd(0, h)).value) / (2 * h);
    const cd g = f.gradient(z);
    REQUIRE(std::abs(g - cd(dx, dy)) <= 1e-6 * std::abs(g));
  }
}

TEST_CASE("boundary of the circular law", "[geometry]") {
  const auto c = trace_boundary(zeros(4), Box{-1.5, 1.5, -1.5, 1.5}, 1e-2);
  REQUIRE(c.polylines.size() == 1);
  REQUIRE(c.warnings.empty());
  const auto& line = c.polylines.front();
  REQUIRE(line.front() == line.back());
  for (const cd& v : line) REQUIRE(std::abs(1.0 / std::norm(v) - 1.0) <= 1e-8);
  REQUIRE(hausdorff_to_unit_circle(c) <= 1e-3);
}

TEST_CASE("two components around plus and minus two", "[geometry]") {
  const Eigen::MatrixXcd a0 = plus_minus(2.0, 3);
  const SupportMap f(a0);
  const Box box{-4, 4, -2, 2};
  const auto c = trace_boundary(f, box, 2e-2);
  REQUIRE(c.polylines.size() == 2);
  REQUIRE(count_inside_components(f, box, 1e-2) == 2);
  for (const auto& line : c.polylines) {
    REQUIRE(line.front() == line.back());
    cd centre = 0.0;
    for (const cd& v : line) {
      REQUIRE(std::abs(f(v).value - 1.0) <= 1e-8);
      centre += v;
    }
    centre /= static_cast<double>(line.size());
    REQUIRE(std::abs(std::abs(centre.real()) - 2.0) < 0.2);
  }
  // Marching squares consistency: points F > 1 are enclosed by some polyline.
  const auto winding = [&](cd p) {
    int w = 0;
    for (const auto& line : c.polylines)
      for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const cd a = line[i] - p, b = line[i + 1] - p;
        if (a.imag() <= 0 && b.imag() > 0 && std::imag(std::conj(a) * b) > 0) ++w;
        if (a.imag() > 0 && b.imag() <= 0 && std::imag(std::conj(a) * b) < 0) --w;
      }
    return w;
  };
  for (double x = -3.9; x < 4; x += 0.13)
    for (double y = -1.9; y < 2; y += 0.11) {
      const double v = f(cd(x, y)).value;
      if (std::abs(v - 1.0) < 0.05) continue;
      REQUIRE((winding(cd(x, y)) != 0) == (v > 1.0));
    }
}

TEST_CASE("trace_boundary errors and warnings", "[geometry]") {
  REQUIRE_THROWS_AS(trace_boundary(plus_minus(2.0, 1), Box{-1, 1, -1, 1}, 0.1), UsageError);
  REQUIRE_THROWS_AS(trace_boundary(zeros(2), Box{-1, 1, -1, 1}, 0.0), UsageError);
  // Box inside the support: no crossings.
  const auto c = trace_boundary(zeros(2), Box{-0.5, 0.5, -0.5, 0.5}, 0.1);
  REQUIRE(c.empty());
  REQUIRE_FALSE(c.warnings.empty());
  REQUIRE_THROWS_AS(nearest_boundary(0.0, c), UsageError);
}

TEST_CASE("nearest boundary point", "[geometry]") {
  const auto c = trace_boundary(zeros(2), Box{-1.5, 1.5, -1.5, 1.5}, 1e-2);
  const auto np = nearest_boundary(0.9, c);
  REQUIRE_THAT(np.dist, WithinAbs(0.1, 1e-4));
  REQUIRE(std::abs(np.z_star - 1.0) < 1e-3);
  const SupportMap f(zeros(2));
  const cd refined = refine_foot_point(f, 0.9, np.z_star);
  REQUIRE(std::abs(refined - 1.0) < 1e-12);
  const cd v = c.polylines[0][17];
  REQUIRE(nearest_boundary(v, c).dist == 0.0);
  const cd z(0.3, -0.55);
  const double d = nearest_boundary(z, c).dist;
  for (const cd& p : c.polylines[0]) REQUIRE(d <= std::abs(z - p));
}

TEST_CASE("u star", "[geometry]") {
  const auto u = solve_u_star(build_Y0_spectrum(zeros(5), 0.6));
  REQUIRE(u.location == Location::inside);
  REQUIRE_THAT(u.value, WithinAbs(0.8, 1e-10));
  for (std::size_t i = 1; i < u.bracket_widths.size(); ++i) REQUIRE(u.bracket_widths[i] < u.bracket_widths[i - 1]);
  REQUIRE(u.bracket_widths.back() <= 1e-12);

  const auto b = solve_u_star(build_Y0_spectrum(plus_minus(1.0, 1), 0.0));
  REQUIRE(b.location == Location::boundary);
  REQUIRE(b.value == 0.0);
  REQUIRE(solve_u_star(build_Y0_spectrum(zeros(2), 1.5)).location == Location::outside);

  // A0 = 0: u*^2 = 1 - |z|^2.
  for (double r : {0.0, 0.2, 0.55, 0.9}) {
    const double us = solve_u_star(build_Y0_spectrum(zeros(3), cd(0.0, r))).value;
    REQUIRE_THAT(us * us, WithinAbs(1.0 - r * r, 1e-11));
  }

  // Root of a random instance satisfies the defining equation.
  const Eigen::MatrixXcd a0 = sample_ginibre(20, 99) * 0.5;
  const auto cache = build_Y0_spectrum(a0, cd(0.1, 0.1));
  const double us = solve_u_star(cache).value;
  REQUIRE_THAT(resolvent_trace(cache, us * us).real(), WithinAbs(1.0, 1e-10));
}

TEST_CASE("u star near the boundary follows sqrt(k/c2) delta", "[geometry]") {
  // A0 = 0: dist = delta^2 gives u*/(sqrt(k/c2) delta) - 1 = O(delta^2); fitted constant stable.
  const auto c = trace_boundary(zeros(2), Box{-1.5, 1.5, -1.5, 1.5}, 1e-2);
  std::vector<double> consts;
  for (double delta : {0.05, 0.1, 0.15, 0.2}) {
    const cd z = 1.0 - delta * delta;
    const auto s = saddle_coefficients(zeros(2), z, c, BasePoint::u_star_squared);
    const double lead = std::sqrt(s.k / s.c2) * s.delta;
    consts.push_back((s.u_star / lead - 1.0) / (delta * delta));
  }
  for (double k : consts) REQUIRE(std::abs(k - consts.front()) < 0.05 * std::abs(consts.front()) + 0.05);
}

TEST_CASE("saddle coefficients", "[geometry]") {
  const auto c = trace_boundary(zeros(3), Box{-1.5, 1.5, -1.5, 1.5}, 1e-2);
  const SupportMap circle(zeros(3));
  const cd on_boundary = refine_foot_point(circle, cd(0.7, 0.3), nearest_boundary(cd(0.7, 0.3), c).z_star);
  const auto s = saddle_coefficients(zeros(3), on_boundary, c, BasePoint::zero);
  REQUIRE_THAT(s.k, WithinAbs(2.0, 1e-8));
  REQUIRE_THAT(s.c2, WithinAbs(1.0, 1e-8));
  REQUIRE(s.dist < 1e-12);
  REQUIRE_THROWS_AS(saddle_coefficients(zeros(3), 1.3, c, BasePoint::zero), DomainError);

  // Bulk base point.
  const auto b = saddle_coefficients(zeros(3), 0.6, c, BasePoint::u_star_squared);
  REQUIRE_THAT(b.u_star, WithinAbs(0.8, 1e-10));
  REQUIRE_THAT(b.c2, WithinRel(1.0, 1e-10));  // 1 / (0.36 + 0.64)^2
  REQUIRE_THAT(b.dist, WithinAbs(0.4, 1e-10));

  // Closed-form k against central differences on random deformations.
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Eigen::MatrixXcd a0 = sample_ginibre(8, stream_seed(17, seed)) * 0.5;
    const SupportMap f(a0);
    const auto cc = trace_boundary(f, Box{-2.5, 2.5, -2.5, 2.5}, 4e-2);
    REQUIRE_FALSE(cc.empty());
    const cd z = f.eigenvalues()(0);
    const cd zz = z + 0.01;
    if (f(zz).value <= 1.0) continue;
    const auto r = saddle_coefficients(f, a0, zz, cc, BasePoint::zero);
    REQUIRE(std::abs(f(r.z_star).value - 1.0) < 1e-10);
    REQUIRE_THAT(r.k_fd, WithinRel(r.k, 1e-6));
    REQUIRE(r.c2 > 0.0);
    REQUIRE(r.k >= 0.0);
  }
}

TEST_CASE("saddle dominance", "[geometry]") {
  const auto cache = build_Y0_spectrum(zeros(4), 0.0);
  const auto r = verify_saddle_dominance(cache, 1.0, 0.5, 3.0);
  REQUIRE(r.dominated());
  REQUIRE_THAT(r.value_at_saddle, WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(r.margin, WithinAbs(-0.4731435513, 1e-6));
  // -4 u*^2 c2 at the saddle.
  REQUIRE_THAT(r.second_difference, WithinAbs(-4.0, 1e-5));

  double prev = 1e300;
  for (double C0 : {2.0, 3.0, 5.0, 8.0}) {
    const auto rr = verify_saddle_dominance(cache, 1.0, 0.5, C0);
    REQUIRE(rr.ray_max < prev);
    prev = rr.ray_max;
  }

  const Eigen::MatrixXcd a0 = sample_ginibre(30, 5) * 0.6;
  const auto rc = build_Y0_spectrum(a0, cd(0.1, 0.0));
  const double us = solve_u_star(rc).value;
  const auto rd = verify_saddle_dominance(rc, us, 0.3 * us, 4.0);
  REQUIRE(rd.second_difference < 0.0);
  REQUIRE(rd.dominated());
  REQUIRE_THROWS_AS(verify_saddle_dominance(cache, 1.0, 1.5, 3.0), UsageError);
}

TEST_CASE("contour export", "[geometry]") {
  const auto c = trace_boundary(zeros(2), Box{-1.5, 1.5, -1.5, 1.5}, 5e-2);
  const std::string csv = "geometry_contour_test.csv", side = "geometry_contour_test.json";
  write_contour_csv(csv, c);
  write_contour_sidecar(side, c, matrix_digest(zeros(2)), std::nullopt);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "component_id,re,im");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    unsigned comp = 0;
    double re = 0, im = 0;
    REQUIRE(std::sscanf(line.c_str(), "%u,%lf,%lf", &comp, &re, &im) == 3);
    REQUIRE(std::abs(std::hypot(re, im) - 1.0) < 1e-8);
    ++rows;
  }
  REQUIRE(rows == c.vertex_count());
  const auto j = nlohmann::json::parse(std::ifstream(side));
  REQUIRE(j["grid_step"].get<double>() == 5e-2);
  REQUIRE(j["a0_digest"].get<std::string>().size() == 16);
  REQUIRE(j["seed"].is_null());
  REQUIRE(matrix_digest(zeros(2)) != matrix_digest(zeros(3)));
  std::remove(csv.c_str());
  std::remove(side.c_str());
}
