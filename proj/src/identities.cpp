// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/identities.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <random>

#include "ginlab/grassmann.hpp"
#include "ginlab/rng.hpp"
#include "ginlab/susy.hpp"

namespace ginlab {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Eigen::MatrixXcd gaussian_matrix(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = cd(nd(rng), nd(rng));
  return m;
}

struct Instance {
  Eigen::MatrixXcd a0;
  cd z, u, t1, t2;
};

/// n = 5, Im t1, Im t2 > 0.
Instance draw_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> un(-1.0, 1.0), pos(0.2, 1.5);
  Instance in;
  in.a0 = sample_ginibre(5, seed);
  in.z = cd(0.5 * un(rng), 0.5 * un(rng));
  in.u = cd(un(rng), un(rng));
  in.t1 = cd(un(rng), pos(rng));
  in.t2 = cd(un(rng), pos(rng));
  return in;
}

constexpr int kInstances = 30;

}  // namespace

IdentityCheck check_berezin_determinant(std::uint64_t seed) {
  const auto t0 = Clock::now();
  IdentityCheck c{"berezin_determinant", 0.0, 1e-12, 0.0, 50};
  std::mt19937_64 rng(stream_seed(seed, 1));
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXcd m = gaussian_matrix(1 + i % 3, rng);
    const cd det = cofactor_determinant(m);
    c.deviation = std::max(c.deviation, std::abs(gaussian_berezin_det(m) - det) / std::max(1.0, std::abs(det)));
  }
  c.seconds = since(t0);
  return c;
}

IdentityCheck check_hubbard_grassmann() {
  const auto t0 = Clock::now();
  IdentityCheck c{"hubbard_stratonovich_grassmann", 0.0, 0.0, 0.0, 0};
  std::array<int, 4> slots{0, 1, 2, 3};
  do {
    ++c.instances;
    if (!verify_hubbard_grassmann(slots)) c.deviation += 1.0;
  } while (std::next_permutation(slots.begin(), slots.end()));
  c.seconds = since(t0);
  return c;
}

IdentityCheck check_sdet_expansion(std::uint64_t seed) {
  const auto t0 = Clock::now();
  IdentityCheck c{"sdet_expansion", 0.0, 1e-10, 0.0, 0};
  std::mt19937_64 rng(stream_seed(seed, 3));
  for (Index k = 1; k <= 2; ++k)
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXcd a = gaussian_matrix(k, rng), b = gaussian_matrix(k, rng);
      c.deviation = std::max(c.deviation, verify_sdet_expansion(a, b, 0.5 + 0.4 * trial).max_deviation);
      ++c.instances;
    }
  c.seconds = since(t0);
  return c;
}

IdentityCheck check_phi_equivalence(std::uint64_t seed) {
  const auto t0 = Clock::now();
  IdentityCheck c{"phi_equals_I", 0.0, 1e-9, 0.0, kInstances};
  for (int s = 0; s < kInstances; ++s) {
    const Instance in = draw_instance(stream_seed(seed, static_cast<std::uint64_t>(s)));
    const SpectrumCache cache = build_Y0_spectrum(in.a0, in.z);
    const cd i_val = I_from_blocks(BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2));
    c.deviation = std::max(c.deviation, std::abs(phi(cache, in.u, in.t1, in.t2) - i_val) / std::abs(i_val));
  }
  c.seconds = since(t0);
  return c;
}

IdentityCheck check_block_traces(std::uint64_t seed) {
  const auto t0 = Clock::now();
  IdentityCheck c{"schur_and_trace_identities", 0.0, 1e-10, 0.0, kInstances};
  for (int s = 0; s < kInstances; ++s) {
    const Instance in = draw_instance(stream_seed(seed, static_cast<std::uint64_t>(s)));
    const SpectrumCache cache = build_Y0_spectrum(in.a0, in.z);
    c.deviation = std::max(c.deviation,
                           check_block_identities(BlockPair::build(in.a0, in.z, in.u, in.t1, in.t2), cache).max());
  }
  c.seconds = since(t0);
  return c;
}

std::vector<IdentityCheck> verify_identities(std::uint64_t seed) {
  return {check_berezin_determinant(seed), check_hubbard_grassmann(), check_sdet_expansion(seed),
          check_phi_equivalence(seed), check_block_traces(seed)};
}

}  // namespace ginlab
