// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file susy.hpp
 * @brief Block matrices A(u), B(t1, t2) and the reduced integrand phi.
 */

#pragma once

#include <array>

#include "ginlab/ensembles.hpp"

namespace ginlab {

/// A(u) = [[u I, i(A0 - z)], [i(A0 - z)^*, conj(u) I]],
/// B(t1, t2) = [[i t1 I, i(A0 - z)], [i(A0 - z)^*, i t2 I]].
struct BlockPair {
  cd u = 0.0, t1 = 0.0, t2 = 0.0;
  Eigen::MatrixXcd shifted;  // A0 - z
  Eigen::MatrixXcd A_matrix;
  Eigen::MatrixXcd B_matrix;

  [[nodiscard]] static BlockPair build(const Eigen::MatrixXcd& a0, cd z, cd u, cd t1, cd t2);
  [[nodiscard]] Index n() const noexcept { return shifted.rows(); }
};

struct IntegrandPoint {
  double u1 = 0.0, u2 = 0.0;
  cd t1 = 0.0, t2 = 0.0;
  double r1 = 1.0, r2 = 1.0;
  double eps = 1.0;

  void validate() const;
  [[nodiscard]] cd u() const noexcept { return {u1, u2}; }
};

/// Reduced integrand built from spectral sums of Y0.
[[nodiscard]] cd phi(const SpectrumCache& c, cd u, cd t1, cd t2);

/// The same scalar from explicit block inverses of A and B.
[[nodiscard]] cd I_from_blocks(const BlockPair& p);

/// Which eta multiplies entry (i, j) of M = A^{-1} chi B^{-1} eta.
enum class EtaPlacement {
  row_block,       ///< eta2 on block row 1, eta1 on block row 2
  literal_product  ///< eta-hat = diag(eta2 I, eta1 I) multiplied from the right
};

/// Berezin integral over chi1, chi2, eta1, eta2 of
/// e^{chi1 eta1 + chi2 eta2} (1 + Tr M / n + (Tr M)^2 / 2n^2 - Tr M^2 / 2n^2).
/// Row-block placement reproduces I_from_blocks; the literal product flips
/// the sign of the quartic block traces.  Practical for n <= 4.
[[nodiscard]] cd I_from_berezin(const BlockPair& p, EtaPlacement placement = EtaPlacement::row_block);

struct BlockIdentityReport {
  double schur_A = 0.0;  ///< max entry deviation of A^{-1} from its closed form
  double schur_B = 0.0;
  /// Relative deviations of the four block-trace identities.
  std::array<double, 4> traces{};
  [[nodiscard]] double max() const noexcept;
};

[[nodiscard]] BlockIdentityReport check_block_identities(const BlockPair& p, const SpectrumCache& c);

[[nodiscard]] cd F1(const SpectrumCache& c, double u1, double u2, double eps);
[[nodiscard]] cd F2(const SpectrumCache& c, cd t1, cd t2, double r1, double r2, double eps);

struct DetIdentityReport {
  double dev_A = 0.0;
  double dev_B = 0.0;
  cd log_det_A = 0.0;
  cd log_det_B = 0.0;
  [[nodiscard]] double max() const noexcept { return std::max(dev_A, dev_B); }
};

/// Compares det A with det(Y0 + |u|^2) and det B with det(Y0 - t1 t2) in log space.
[[nodiscard]] DetIdentityReport verify_det_identities(const BlockPair& p, const SpectrumCache& c);

}  // namespace ginlab
