// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/grassmann.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ginlab {

using cd = std::complex<double>;

std::string to_string(const GrassmannElement& e) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, c] : e.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
    for (int j = 0; j < e.num_generators(); ++j)
      if (mono & (Mask{1} << j)) os << "*g" << j;
  }
  return os.str();
}

GrassmannMatrix::GrassmannMatrix(Eigen::Index rows, Eigen::Index cols, int num_generators)
    : rows_(rows), cols_(cols), m_(num_generators),
      data_(static_cast<std::size_t>(rows * cols), GrassmannElement(num_generators)) {}

GrassmannMatrix GrassmannMatrix::from_complex(const Eigen::MatrixXcd& m, int num_generators) {
  GrassmannMatrix g(m.rows(), m.cols(), num_generators);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g(i, j) = GrassmannElement::constant(num_generators, m(i, j));
  return g;
}

GrassmannElement GrassmannMatrix::trace() const {
  if (rows_ != cols_) throw UsageError("trace of non-square matrix");
  GrassmannElement t(m_);
  for (Eigen::Index i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

GrassmannMatrix operator*(const GrassmannMatrix& a, const GrassmannMatrix& b) {
  if (a.cols() != b.rows() || a.m_ != b.m_) throw UsageError("GrassmannMatrix product shape mismatch");
  GrassmannMatrix out(a.rows(), b.cols(), a.m_);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        if (!a(i, k).is_zero() && !b(k, j).is_zero()) out(i, j) += a(i, k) * b(k, j);
  return out;
}

GrassmannMatrix operator*(const Eigen::MatrixXcd& a, const GrassmannMatrix& b) {
  if (a.cols() != b.rows()) throw UsageError("GrassmannMatrix product shape mismatch");
  GrassmannMatrix out(a.rows(), b.cols(), b.m_);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

GrassmannMatrix operator*(const GrassmannMatrix& a, const Eigen::MatrixXcd& b) {
  if (a.cols() != b.rows()) throw UsageError("GrassmannMatrix product shape mismatch");
  GrassmannMatrix out(a.rows(), b.cols(), a.m_);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

GrassmannMatrix operator+(const GrassmannMatrix& a, const GrassmannMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("GrassmannMatrix sum shape mismatch");
  GrassmannMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

GrassmannMatrix operator-(const GrassmannMatrix& a, const GrassmannMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("GrassmannMatrix sum shape mismatch");
  GrassmannMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
  return out;
}

GrassmannMatrix& GrassmannMatrix::operator*=(cd s) {
  for (auto& e : data_) e *= s;
  return *this;
}

GrassmannElement even_determinant(const GrassmannMatrix& m) {
  if (m.rows() != m.cols()) throw UsageError("determinant of non-square matrix");
  const int k = static_cast<int>(m.rows());
  if (k > 8) throw CapacityError("symbolic determinant limited to 8x8");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (!m(i, j).is_even()) throw UsageError("determinant needs even entries");
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  GrassmannElement det(m.num_generators());
  do {
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) inversions += perm[i] > perm[j];
    GrassmannElement term = GrassmannElement::constant(m.num_generators(), inversions & 1 ? -1.0 : 1.0);
    for (int i = 0; i < k && !term.is_zero(); ++i) term = term * m(i, perm[i]);
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

void SuperMatrixInstance::validate() const {
  const auto p = fermion_block.rows();
  const auto q = boson_block.rows();
  if (fermion_block.cols() != p || boson_block.cols() != q) throw UsageError("diagonal blocks must be square");
  if (chi.rows() != p || chi.cols() != q || eta.rows() != q || eta.cols() != p)
    throw UsageError("off-diagonal block shapes inconsistent");
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < q; ++j)
      if (!chi(i, j).is_zero() && !chi(i, j).is_odd()) throw UsageError("chi block must be odd");
  for (Eigen::Index i = 0; i < q; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (!eta(i, j).is_zero() && !eta(i, j).is_odd()) throw UsageError("eta block must be odd");
}

GrassmannElement sdet(const SuperMatrixInstance& f) {
  f.validate();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(f.fermion_block);
  if (!lu.isInvertible()) throw UsageError("fermion block singular");
  const int m = f.chi.num_generators();
  const Eigen::MatrixXcd a_inv = lu.inverse();
  const GrassmannMatrix schur = GrassmannMatrix::from_complex(f.boson_block, m) - f.eta * (a_inv * f.chi);
  return even_determinant(schur) * (1.0 / lu.determinant());
}

cd cofactor_determinant(const Eigen::MatrixXcd& a) {
  const auto n = a.rows();
  if (a.cols() != n) throw UsageError("determinant of non-square matrix");
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  cd det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::MatrixXcd minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = a(r, c);
    const cd cof = cofactor_determinant(minor) * ((j % 2) ? -1.0 : 1.0);
    det += a(0, j) * cof;
  }
  return det;
}

cd gaussian_berezin_det(const Eigen::MatrixXcd& a, int symbolic_limit) {
  const auto n = static_cast<int>(a.rows());
  if (a.cols() != n) throw UsageError("square matrix required");
  if (n > symbolic_limit || 2 * n > kMaxGenerators)
    throw CapacityError("dimension " + std::to_string(n) + " above symbolic limit " +
                        std::to_string(symbolic_limit));
  // psibar_j -> generator 2j, psi_j -> generator 2j+1.
  const int m = 2 * n;
  GrassmannElement exponent(m);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      exponent -= a(j, k) * (GrassmannElement::generator(m, 2 * j) * GrassmannElement::generator(m, 2 * k + 1));
  std::vector<int> order;
  for (int j = 0; j < n; ++j) {
    order.push_back(2 * j);
    order.push_back(2 * j + 1);
  }
  return berezin_integrate(exp_element(exponent), order).body();
}

bool verify_hubbard_grassmann(const std::array<int, 4>& slots) {
  const int m = 1 + *std::max_element(slots.begin(), slots.end());
  const auto g = [m](int j) { return GrassmannElement::generator(m, j); };
  const auto rho = g(slots[0]), tau = g(slots[1]), chi = g(slots[2]), eta = g(slots[3]);
  const GrassmannElement lhs = exp_element(-(rho * tau));
  const GrassmannElement rhs = berezin_integrate(exp_element(rho * chi + tau * eta + chi * eta), {slots[3], slots[2]});
  return lhs == rhs;
}

namespace {

GrassmannMatrix diag_generators(Eigen::Index k, int m, int first, int second, cd scale) {
  GrassmannMatrix d(k, k, m);
  const Eigen::Index half = (k + 1) / 2;
  for (Eigen::Index i = 0; i < k; ++i) d(i, i) = GrassmannElement::generator(m, i < half ? first : second, scale);
  return d;
}

}  // namespace

SdetReport verify_sdet_expansion(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double r) {
  const auto k = a.rows();
  if (a.cols() != k || b.rows() != k || b.cols() != k) throw UsageError("A and B must be k x k");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu_a(a), lu_b(b);
  if (!lu_a.isInvertible() || !lu_b.isInvertible()) throw UsageError("A and B must be invertible");
  constexpr int m = 4;  // chi1, chi2, eta1, eta2
  const cd s = std::sqrt(r / static_cast<double>(k));
  const GrassmannMatrix chi = diag_generators(k, m, 0, 1, s);
  const GrassmannMatrix eta = diag_generators(k, m, 3, 2, s);
  const Eigen::MatrixXcd rb = r * b;

  SdetReport rep;
  rep.schur_route = inverse(sdet({a, rb, chi, eta}));

  const GrassmannMatrix x = lu_a.inverse() * chi;
  const GrassmannMatrix y = rb.inverse() * eta;
  const GrassmannMatrix xy = x * y, yx = y * x;
  GrassmannElement exponent = (yx.trace() - xy.trace()) * 0.5;
  exponent += ((yx * yx).trace() - (xy * xy).trace()) * 0.25;
  rep.body = lu_a.determinant() / rb.determinant();
  rep.expansion_route = exp_element(exponent) * rep.body;
  rep.max_deviation = max_deviation(rep.schur_route, rep.expansion_route);
  return rep;
}

}  // namespace ginlab
