// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file grassmann.hpp
 * @brief Finite Grassmann algebra with Berezin integration.
 *
 * Elements are sparse maps from monomials to coefficients.  A monomial is a
 * bitmask over the generators, read in ascending index order, so the mask
 * 0b101 stands for psi_0 psi_2.
 */

#pragma once

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ginlab/errors.hpp"

namespace ginlab {

using Mask = std::uint32_t;

inline constexpr int kMaxGenerators = 24;

/// Sign of reordering the concatenation a|b into ascending order.
[[nodiscard]] constexpr int reorder_sign(Mask a, Mask b) noexcept {
  int inversions = 0;
  while (b != 0) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

template <typename Scalar>
class Grassmann {
 public:
  using scalar_type = Scalar;
  using TermMap = std::map<Mask, Scalar>;

  Grassmann() = default;
  explicit Grassmann(int num_generators) : m_(num_generators) {
    if (num_generators < 0 || num_generators > kMaxGenerators)
      throw CapacityError("generator count " + std::to_string(num_generators) +
                          " outside [0, " + std::to_string(kMaxGenerators) + "]");
  }

  [[nodiscard]] static Grassmann constant(int m, Scalar c) {
    Grassmann e(m);
    e.add_term(0, c);
    return e;
  }

  [[nodiscard]] static Grassmann generator(int m, int j, Scalar c = Scalar(1)) {
    if (j < 0 || j >= m) throw UsageError("generator index out of range");
    Grassmann e(m);
    e.add_term(Mask{1} << j, c);
    return e;
  }

  [[nodiscard]] int num_generators() const noexcept { return m_; }
  [[nodiscard]] const TermMap& terms() const noexcept { return terms_; }
  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

  [[nodiscard]] Scalar coefficient(Mask mono) const {
    auto it = terms_.find(mono);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  /// Coefficient of the empty monomial.
  [[nodiscard]] Scalar body() const { return coefficient(0); }

  [[nodiscard]] Grassmann soul() const {
    Grassmann s = *this;
    s.terms_.erase(0);
    return s;
  }

  /// Returns +1 / -1 if all monomials are even / odd, 0 if mixed.  Zero is even.
  [[nodiscard]] int parity() const noexcept {
    int p = -2;
    for (const auto& [mono, c] : terms_) {
      const int q = std::popcount(mono) & 1;
      if (p == -2) p = q;
      else if (p != q) return 0;
    }
    return p == 1 ? -1 : 1;
  }
  [[nodiscard]] bool is_even() const noexcept { return parity() == 1; }
  [[nodiscard]] bool is_odd() const noexcept { return !terms_.empty() && parity() == -1; }

  /// Adds c to the coefficient of mono, keeping the map free of zeros.
  void add_term(Mask mono, Scalar c) {
    if (m_ < 32 && (mono >> m_) != 0) throw UsageError("monomial outside generator range");
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(mono, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  /// Drops coefficients with |c| <= tol.
  [[nodiscard]] Grassmann pruned(double tol) const {
    Grassmann e(m_);
    for (const auto& [mono, c] : terms_)
      if (std::abs(c) > tol) e.terms_.emplace(mono, c);
    return e;
  }

  Grassmann& operator+=(const Grassmann& o) {
    check_same(o);
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
  }
  Grassmann& operator-=(const Grassmann& o) {
    check_same(o);
    for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
    return *this;
  }
  Grassmann& operator*=(Scalar s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = it->second == Scalar(0) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend Grassmann operator+(Grassmann a, const Grassmann& b) { return a += b; }
  friend Grassmann operator-(Grassmann a, const Grassmann& b) { return a -= b; }
  friend Grassmann operator-(Grassmann a) { return a *= Scalar(-1); }
  friend Grassmann operator*(Grassmann a, Scalar s) { return a *= s; }
  friend Grassmann operator*(Scalar s, Grassmann a) { return a *= s; }
  friend Grassmann operator+(Grassmann a, Scalar s) {
    a.add_term(0, s);
    return a;
  }

  friend Grassmann operator*(const Grassmann& a, const Grassmann& b) {
    if (a.m_ != b.m_) throw UsageError("mismatched generator counts");
    Grassmann out(a.m_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        if (ma & mb) continue;
        const Scalar c = ca * cb;
        out.add_term(ma | mb, reorder_sign(ma, mb) > 0 ? c : -c);
      }
    return out;
  }

  friend bool operator==(const Grassmann& a, const Grassmann& b) {
    return a.m_ == b.m_ && a.terms_ == b.terms_;
  }

 private:
  void check_same(const Grassmann& o) const {
    if (o.m_ != m_) throw UsageError("mismatched generator counts");
  }

  int m_ = 0;
  TermMap terms_;
};

using GrassmannElement = Grassmann<std::complex<double>>;

template <typename Scalar>
[[nodiscard]] Grassmann<Scalar> multiply(const Grassmann<Scalar>& a, const Grassmann<Scalar>& b) {
  return a * b;
}

/// Berezin integral over generator j.  psi_j is moved to the right end of
/// each monomial before it is stripped, so that the iterated integral
/// taken innermost-first over d psi_k ... d psi_1 returns the top coefficient.
template <typename Scalar>
[[nodiscard]] Grassmann<Scalar> berezin_integrate(const Grassmann<Scalar>& e, int j) {
  if (j < 0 || j >= e.num_generators()) throw UsageError("Berezin index out of range");
  const Mask bit = Mask{1} << j;
  Grassmann<Scalar> out(e.num_generators());
  for (const auto& [mono, c] : e.terms()) {
    if (!(mono & bit)) continue;
    const bool odd = std::popcount(mono >> (j + 1)) & 1;
    out.add_term(mono & ~bit, odd ? -c : c);
  }
  return out;
}

/// Iterated integral for the measure written f d psi_{order[0]} d psi_{order[1]} ...;
/// the differential next to the integrand acts first.
template <typename Scalar>
[[nodiscard]] Grassmann<Scalar> berezin_integrate(Grassmann<Scalar> e, const std::vector<int>& order) {
  for (int j : order) e = berezin_integrate(e, j);
  return e;
}

template <typename Scalar>
[[nodiscard]] Grassmann<Scalar> exp_element(const Grassmann<Scalar>& e) {
  const Scalar a = e.body();
  const Grassmann<Scalar> nil = e.soul();
  Grassmann<Scalar> sum = Grassmann<Scalar>::constant(e.num_generators(), Scalar(1));
  Grassmann<Scalar> power = sum;
  for (int l = 1; !power.is_zero(); ++l) {
    power = power * nil;
    power *= Scalar(1) / Scalar(l);
    sum += power;
  }
  sum *= std::exp(a);
  return sum;
}

/// Inverse of an element with non-zero body.
template <typename Scalar>
[[nodiscard]] Grassmann<Scalar> inverse(const Grassmann<Scalar>& e) {
  const Scalar a = e.body();
  if (a == Scalar(0)) throw DomainError("Grassmann inverse of nilpotent element");
  Grassmann<Scalar> x = e.soul();
  x *= -Scalar(1) / a;
  Grassmann<Scalar> sum = Grassmann<Scalar>::constant(e.num_generators(), Scalar(1));
  Grassmann<Scalar> power = sum;
  while (true) {
    power = power * x;
    if (power.is_zero()) break;
    sum += power;
  }
  sum *= Scalar(1) / a;
  return sum;
}

/// Largest coefficient difference over the union of monomials.
template <typename Scalar>
[[nodiscard]] double max_deviation(const Grassmann<Scalar>& a, const Grassmann<Scalar>& b) {
  double d = 0.0;
  for (const auto& [mono, c] : a.terms()) d = std::max(d, std::abs(c - b.coefficient(mono)));
  for (const auto& [mono, c] : b.terms()) d = std::max(d, std::abs(c - a.coefficient(mono)));
  return d;
}

[[nodiscard]] std::string to_string(const GrassmannElement& e);

/// Dense row-major matrix of Grassmann elements.  Entry products keep the
/// left-to-right order so odd entries anticommute correctly.
class GrassmannMatrix {
 public:
  GrassmannMatrix(Eigen::Index rows, Eigen::Index cols, int num_generators);
  static GrassmannMatrix from_complex(const Eigen::MatrixXcd& m, int num_generators);

  [[nodiscard]] Eigen::Index rows() const noexcept { return rows_; }
  [[nodiscard]] Eigen::Index cols() const noexcept { return cols_; }
  [[nodiscard]] int num_generators() const noexcept { return m_; }

  GrassmannElement& operator()(Eigen::Index i, Eigen::Index j) { return data_[i * cols_ + j]; }
  const GrassmannElement& operator()(Eigen::Index i, Eigen::Index j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] GrassmannElement trace() const;

  friend GrassmannMatrix operator*(const GrassmannMatrix& a, const GrassmannMatrix& b);
  friend GrassmannMatrix operator*(const Eigen::MatrixXcd& a, const GrassmannMatrix& b);
  friend GrassmannMatrix operator*(const GrassmannMatrix& a, const Eigen::MatrixXcd& b);
  friend GrassmannMatrix operator+(const GrassmannMatrix& a, const GrassmannMatrix& b);
  friend GrassmannMatrix operator-(const GrassmannMatrix& a, const GrassmannMatrix& b);
  GrassmannMatrix& operator*=(std::complex<double> s);

 private:
  Eigen::Index rows_, cols_;
  int m_;
  std::vector<GrassmannElement> data_;
};

/// Leibniz determinant of a square matrix with even (mutually commuting) entries.
[[nodiscard]] GrassmannElement even_determinant(const GrassmannMatrix& m);

/// Block matrix F = [[A, chi], [eta, B]] with numeric A (fermion), B (boson)
/// and odd off-diagonal blocks.
struct SuperMatrixInstance {
  Eigen::MatrixXcd fermion_block;
  Eigen::MatrixXcd boson_block;
  GrassmannMatrix chi;
  GrassmannMatrix eta;

  void validate() const;
};

/// det(B - eta A^{-1} chi) / det A evaluated in the algebra.
[[nodiscard]] GrassmannElement sdet(const SuperMatrixInstance& f);

inline constexpr int kDefaultSymbolicLimit = 6;

/// Integral of exp{-sum A_jk psibar_j psi_k} against prod dpsibar_j dpsi_j.
[[nodiscard]] std::complex<double> gaussian_berezin_det(const Eigen::MatrixXcd& a,
                                                        int symbolic_limit = kDefaultSymbolicLimit);

/// Determinant by cofactor expansion, independent of any factorisation.
[[nodiscard]] std::complex<double> cofactor_determinant(const Eigen::MatrixXcd& a);

/// Checks e^{-rho tau} = int e^{rho chi + tau eta + chi eta} d eta d chi exactly.
/// `slots` gives the generator indices used for (rho, tau, chi, eta).
[[nodiscard]] bool verify_hubbard_grassmann(const std::array<int, 4>& slots = {0, 1, 2, 3});

struct SdetReport {
  GrassmannElement schur_route;
  GrassmannElement expansion_route;
  double max_deviation = 0.0;
  std::complex<double> body = 0.0;
};

/// Compares two evaluations of Sdet^{-1} Q for Q = [[A, s chi], [s eta, R B]]
/// with s = (R/k)^{1/2} and four generators chi1, chi2, eta1, eta2.
[[nodiscard]] SdetReport verify_sdet_expansion(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                               double r = 1.0);

}  // namespace ginlab
