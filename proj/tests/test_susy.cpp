// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "ginlab/rng.hpp"
#include "ginlab/susy.hpp"

using namespace ginlab;

namespace {

struct Instance {
  Eigen::MatrixXcd a0;
  cd z, u, t1, t2;
};

Instance draw(std::uint64_t seed, Index n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> un(-1.0, 1.0), pos(0.2, 1.5);
  Instance in;
  in.a0 = sample_ginibre(n, seed);
  in.z = cd(0.5 * un(rng), 0.5 * un(rng));
  in.u = cd(un(rng), un(rng));
  in.t1 = cd(un(rng), pos(rng));
  in.t2 = cd(un(rng), pos(rng));
  return in;
}

}  // namespace

TEST_CASE("phi equals the block-trace scalar", "[susy]") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto in = draw(stream_seed(2025, s), 5);
    const auto c = build_Y0_spectrum(in.a0, in.z);
    const auto p = BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2);
    const cd i_val = I_from_blocks(p);
    REQUIRE(std::abs(phi(c, in.u, in.t1, in.t2) - i_val) <= 1e-9 * (1.0 + std::abs(i_val)));
  }
  for (Index n = 1; n <= 8; ++n) {
    const auto in = draw(stream_seed(77, static_cast<std::uint64_t>(n)), n);
    const auto c = build_Y0_spectrum(in.a0, in.z);
    const cd i_val = I_from_blocks(BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2));
    REQUIRE(std::abs(phi(c, in.u, in.t1, in.t2) - i_val) <= 1e-9 * (1.0 + std::abs(i_val)));
  }
}

TEST_CASE("Berezin integration reproduces the block-trace scalar", "[susy][grassmann]") {
  for (Index n = 1; n <= 3; ++n)
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto in = draw(stream_seed(5, s) + static_cast<std::uint64_t>(n), n);
      const auto p = BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2);
      const cd blocks = I_from_blocks(p);
      REQUIRE(std::abs(I_from_berezin(p) - blocks) <= 1e-10 * (1.0 + std::abs(blocks)));

      // Literal right multiplication by eta-hat flips the quartic block traces,
      // i.e. the sign of the last line of phi.
      const auto c = build_Y0_spectrum(in.a0, in.z);
      const double uu = std::norm(in.u), nd = double(n);
      const cd tt = in.t1 * in.t2;
      const cd last = (uu + tt) / nd *
                      (mixed_resolvent_trace(c, uu, -tt, 1, 2) - uu * mixed_resolvent_trace(c, uu, -tt, 2, 2));
      const cd literal = I_from_berezin(p, EtaPlacement::literal_product);
      REQUIRE(std::abs(literal - (blocks + 2.0 * last)) <= 1e-10 * (1.0 + std::abs(blocks)));
      REQUIRE(std::abs(literal - blocks) > 1e-6);
    }
}

TEST_CASE("Schur inverses and trace identities", "[susy]") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto in = draw(stream_seed(2025, s), 5);
    const auto c = build_Y0_spectrum(in.a0, in.z);
    const auto rep = check_block_identities(BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2), c);
    REQUIRE(rep.schur_A <= 1e-10);
    REQUIRE(rep.schur_B <= 1e-10);
    for (double t : rep.traces) REQUIRE(t <= 1e-10);
  }
}

TEST_CASE("phi at the circular-law saddle", "[susy]") {
  const auto c = build_Y0_spectrum(Eigen::MatrixXcd::Zero(4, 4), 0.0);
  const cd i(0.0, 1.0);
  REQUIRE(std::abs(phi(c, 1.0, i, i)) < 1e-15);
  REQUIRE(std::abs(phi(c, cd(0.6, 0.8), i, i)) < 1e-15);
  // |u| = 0 puts G(|u|^2) on the zero eigenvalue of Y0.
  REQUIRE_THROWS_AS(phi(c, 0.0, i, i), DomainError);
  // Nearby nonsingular point, compared with the block route.
  const auto p = BlockPair::build(Eigen::MatrixXcd::Zero(4, 4), 0.0, 0.5, i, i);
  REQUIRE(std::abs(phi(c, 0.5, i, i) - I_from_blocks(p)) < 1e-12);
  // A0 = 0, z = 0: G(x) = 1/x, closed form.
  const double uu = 0.25;
  const cd tt = -1.0, gt = 1.0, gut = 1.0 / uu;
  const cd expected = std::pow(1.0 - gt + uu * gut, 2) + tt * uu * gut * gut - (uu + tt) / 4.0 * (gut * 1.0 - uu * gut * gut);
  REQUIRE(std::abs(phi(c, 0.5, i, i) - expected) < 1e-14);
}

TEST_CASE("phi symmetries", "[susy][property]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto in = draw(stream_seed(31, s), 6);
    const auto c = build_Y0_spectrum(in.a0, in.z);
    const cd base = phi(c, in.u, in.t1, in.t2);
    REQUIRE(std::abs(phi(c, in.u, in.t2, in.t1) - base) <= 1e-12 * (1 + std::abs(base)));
    REQUIRE(std::abs(phi(c, std::conj(in.u), in.t1, in.t2) - base) <= 1e-12 * (1 + std::abs(base)));
  }
}

TEST_CASE("determinant identities", "[susy]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto in = draw(stream_seed(9, s), 4);
    const auto c = build_Y0_spectrum(in.a0, in.z);
    REQUIRE(verify_det_identities(BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2), c).max() <= 1e-8);
  }
  const auto in = draw(123, 4);
  const auto c = build_Y0_spectrum(in.a0, in.z);
  const auto p0 = BlockPair::build(in.a0, in.z, 0.0, in.t1, in.t2);
  const auto r0 = verify_det_identities(p0, c);
  REQUIRE(r0.dev_A <= 1e-8);
  REQUIRE(std::abs(std::exp(r0.log_det_A) - std::exp(4.0 * log_det_L(c, 0.0))) <=
          1e-8 * std::abs(std::exp(r0.log_det_A)));
  // t1 t2 real and negative: det B is real and positive.
  const auto pb = BlockPair::build(in.a0, in.z, in.u, cd(0.0, 0.7), cd(0.0, 1.3));
  const cd det_b = pb.B_matrix.determinant();
  REQUIRE(det_b.real() > 0.0);
  REQUIRE(std::abs(det_b.imag()) <= 1e-10 * det_b.real());

  // Large n: log-space comparison does not overflow.
  const auto big = draw(44, 60);
  const auto cb = build_Y0_spectrum(big.a0 * 4.0, big.z);
  REQUIRE(verify_det_identities(BlockPair::build(big.a0 * 4.0, big.z, big.u, big.t1, big.t2), cb).max() <= 1e-8);
}

TEST_CASE("F1 and F2", "[susy]") {
  const auto c = build_Y0_spectrum(Eigen::MatrixXcd::Zero(3, 3), 0.0);
  REQUIRE(std::abs(F1(c, 0.3, 0.4, 0.1) - (std::log(0.25) - 0.16 - 0.16)) < 1e-15);
  const auto in = draw(8, 5);
  const auto cr = build_Y0_spectrum(in.a0, in.z);
  REQUIRE(std::abs(F2(cr, in.t1, in.t2, 1e-300, 1e-300, 0.2) + log_det_L(cr, -in.t1 * in.t2)) < 1e-15);

  // In s = (t1 - t2)/2, t = (t1 + t2)/2 the s-gradient of F2 vanishes at s = 0.
  const cd t(0.3, 0.6);
  const double h = 1e-5;
  const auto f = [&](double s) { return F2(cr, t + s, t - s, 0.8, 1.1, 0.05); };
  REQUIRE(std::abs((f(h) - f(-h)) / (2 * h)) < 1e-8);
  REQUIRE(std::abs((f(0.3 + h) - f(0.3 - h)) / (2 * h)) > 1e-3);

  IntegrandPoint bad{0.1, 0.2, t, t, -1.0, 1.0, 0.1};
  REQUIRE_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("no poles along the shifted real line", "[susy][property]") {
  const auto in = draw(10, 6);
  const auto c = build_Y0_spectrum(in.a0, in.z);
  const double eps0 = 0.05;
  double min_gap = 1e300;
  for (double x1 = -3.0; x1 <= 3.0; x1 += 0.05)
    for (double x2 = -3.0; x2 <= 3.0; x2 += 0.05) {
      const cd tt = cd(x1, eps0) * cd(x2, eps0);
      for (Index i = 0; i < c.n(); ++i) min_gap = std::min(min_gap, std::abs(c.eigenvalues()(i) - tt));
      REQUIRE(std::isfinite(std::abs(F2(c, cd(x1, eps0), cd(x2, eps0), 0.5, 0.5, 0.1))));
    }
  REQUIRE(min_gap > 0.0);
}
