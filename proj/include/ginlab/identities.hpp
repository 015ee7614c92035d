// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file identities.hpp
 * @brief Seeded batteries of the exact identities behind the supersymmetric
 *        representation, shared by the CLI and the acceptance suite.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ginlab {

struct IdentityCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  int instances = 0;

  [[nodiscard]] bool pass() const noexcept { return deviation <= tolerance; }
};

/// Gaussian Berezin integral against cofactor determinants, 50 matrices of
/// dimension 1 to 3; relative deviation.
[[nodiscard]] IdentityCheck check_berezin_determinant(std::uint64_t seed);
/// Grassmann Hubbard-Stratonovich identity for all 24 generator assignments;
/// deviation is the number of failures.
[[nodiscard]] IdentityCheck check_hubbard_grassmann();
/// Both routes to Sdet^{-1} Q for blocks of size 1 and 2.
[[nodiscard]] IdentityCheck check_sdet_expansion(std::uint64_t seed);
/// phi from spectral sums against explicit block inverses, 30 instances, n = 5.
[[nodiscard]] IdentityCheck check_phi_equivalence(std::uint64_t seed);
/// Schur inverses and the block-trace identities on the same instances.
[[nodiscard]] IdentityCheck check_block_traces(std::uint64_t seed);

[[nodiscard]] std::vector<IdentityCheck> verify_identities(std::uint64_t seed);

}  // namespace ginlab
