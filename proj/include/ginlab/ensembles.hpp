// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ensembles.hpp
 * @brief Deformed Ginibre sampling and spectral sums of Y0(z).
 */

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ginlab/errors.hpp"

namespace ginlab {

using cd = std::complex<double>;
using Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

/// n x n matrix of independent complex Gaussians with E|h|^2 = 1/n, E h^2 = 0.
template <typename Real = double>
[[nodiscard]] ComplexMatrix<Real> sample_ginibre(Index n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample_ginibre needs n >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> nd(Real(0), std::sqrt(Real(1) / Real(2 * n)));
  ComplexMatrix<Real> h(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Real re = nd(rng);
      h(i, j) = std::complex<Real>(re, nd(rng));
    }
  return h;
}

enum class DeformationKind { zero, diagonal, hermitian_wigner, ginibre, user_matrix };

[[nodiscard]] std::string to_string(DeformationKind k);
[[nodiscard]] DeformationKind parse_deformation_kind(const std::string& s);

struct DeformationSpec {
  DeformationKind kind = DeformationKind::zero;
  Index n = 0;
  std::vector<cd> diagonal;
  std::string path;
  std::optional<std::uint64_t> seed;

  [[nodiscard]] static DeformationSpec zero(Index n);
  [[nodiscard]] static DeformationSpec diag(std::vector<cd> values);
  [[nodiscard]] static DeformationSpec wigner(Index n, std::uint64_t seed);
  [[nodiscard]] static DeformationSpec ginibre(Index n, std::uint64_t seed);
  [[nodiscard]] static DeformationSpec user(std::string path, Index n = 0);

  [[nodiscard]] bool is_random() const noexcept {
    return kind == DeformationKind::hermitian_wigner || kind == DeformationKind::ginibre;
  }
  void validate() const;
};

/// Concrete A0.  Random kinds use `seed_override` when given, else spec.seed.
[[nodiscard]] Eigen::MatrixXcd realize_deformation(const DeformationSpec& spec,
                                                   std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads the text format: a line with n, then n rows of n `re,im` pairs.
[[nodiscard]] Eigen::MatrixXcd read_user_matrix(const std::string& path);
void write_user_matrix(const std::string& path, const Eigen::MatrixXcd& m);

/// n^{-1} sum |A_ij|^2.
[[nodiscard]] double mean_square_entry(const Eigen::MatrixXcd& a);

/// Spectrum of Y0(z) = (A0 - z)(A0 - z)^*, ascending.
class SpectrumCache {
 public:
  [[nodiscard]] static SpectrumCache build(const Eigen::MatrixXcd& a0, cd z, bool keep_vectors = false);
  [[nodiscard]] static SpectrumCache from_eigenvalues(Eigen::VectorXd eigenvalues, cd z = 0.0);

  [[nodiscard]] cd z() const noexcept { return z_; }
  [[nodiscard]] Index n() const noexcept { return lambda_.size(); }
  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  [[nodiscard]] const std::optional<Eigen::MatrixXcd>& vectors() const noexcept { return vectors_; }

 private:
  cd z_ = 0.0;
  Eigen::VectorXd lambda_;
  std::optional<Eigen::MatrixXcd> vectors_;
};

[[nodiscard]] inline SpectrumCache build_Y0_spectrum(const Eigen::MatrixXcd& a0, cd z, bool keep_vectors = false) {
  return SpectrumCache::build(a0, z, keep_vectors);
}

inline constexpr double kPoleTolerance = 1e-14;

/// n^{-1} sum (lambda_i + x)^{-k}.
[[nodiscard]] cd resolvent_trace(const SpectrumCache& c, cd x, int k = 1);

/// n^{-1} sum (lambda_i + x)^{-j} (lambda_i + y)^{-k}.
[[nodiscard]] cd mixed_resolvent_trace(const SpectrumCache& c, cd x, cd y, int j, int k);

/// n^{-1} sum log(lambda_i + x), principal branch per term.
[[nodiscard]] cd log_det_L(const SpectrumCache& c, cd x);

/// lambda_1(Y(z)) as the squared least singular value of A0 + H0 - z.
[[nodiscard]] double smallest_eigenvalue_Y(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z);

/// Same quantity from the Hermitian eigensolver on Y(z).
[[nodiscard]] double smallest_eigenvalue_Y_eigen(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z);

struct SampleObservables {
  double lambda1 = 0.0;
  double trace_resolvent = 0.0;
  std::uint64_t seed = 0;
};

/// lambda_1(Y(z)) and n^{-1} Tr (Y(z) + eps^2)^{-1} from one singular value decomposition.
[[nodiscard]] SampleObservables observe(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z, double eps,
                                        std::uint64_t seed = 0);

}  // namespace ginlab
