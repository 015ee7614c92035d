// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/ensembles.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ginlab {

std::string to_string(DeformationKind k) {
  switch (k) {
    case DeformationKind::zero: return "zero";
    case DeformationKind::diagonal: return "diagonal";
    case DeformationKind::hermitian_wigner: return "hermitian_wigner";
    case DeformationKind::ginibre: return "ginibre";
    case DeformationKind::user_matrix: return "user_matrix";
  }
  return "unknown";
}

DeformationKind parse_deformation_kind(const std::string& s) {
  if (s == "zero") return DeformationKind::zero;
  if (s == "diagonal") return DeformationKind::diagonal;
  if (s == "hermitian_wigner" || s == "wigner") return DeformationKind::hermitian_wigner;
  if (s == "ginibre") return DeformationKind::ginibre;
  if (s == "user_matrix" || s == "user") return DeformationKind::user_matrix;
  throw UsageError("unknown deformation kind '" + s + "'");
}

DeformationSpec DeformationSpec::zero(Index n) { return {DeformationKind::zero, n, {}, {}, std::nullopt}; }

DeformationSpec DeformationSpec::diag(std::vector<cd> values) {
  const auto n = static_cast<Index>(values.size());
  return {DeformationKind::diagonal, n, std::move(values), {}, std::nullopt};
}

DeformationSpec DeformationSpec::wigner(Index n, std::uint64_t seed) {
  return {DeformationKind::hermitian_wigner, n, {}, {}, seed};
}

DeformationSpec DeformationSpec::ginibre(Index n, std::uint64_t seed) {
  return {DeformationKind::ginibre, n, {}, {}, seed};
}

DeformationSpec DeformationSpec::user(std::string path, Index n) {
  return {DeformationKind::user_matrix, n, {}, std::move(path), std::nullopt};
}

void DeformationSpec::validate() const {
  if (kind == DeformationKind::user_matrix) {
    if (path.empty()) throw UsageError("user_matrix deformation needs a path");
    return;
  }
  if (n < 1) throw UsageError("deformation dimension must be >= 1");
  if (kind == DeformationKind::diagonal && static_cast<Index>(diagonal.size()) != n)
    throw UsageError("diagonal values list length must equal n");
}

Eigen::MatrixXcd realize_deformation(const DeformationSpec& spec, std::optional<std::uint64_t> seed_override) {
  spec.validate();
  const std::uint64_t seed = seed_override.value_or(spec.seed.value_or(0));
  switch (spec.kind) {
    case DeformationKind::zero: return Eigen::MatrixXcd::Zero(spec.n, spec.n);
    case DeformationKind::diagonal: {
      Eigen::VectorXcd d(spec.n);
      for (Index i = 0; i < spec.n; ++i) d(i) = spec.diagonal[static_cast<std::size_t>(i)];
      return d.asDiagonal();
    }
    case DeformationKind::hermitian_wigner: {
      const Eigen::MatrixXcd x = sample_ginibre(spec.n, seed);
      return (x + x.adjoint()) / std::sqrt(2.0);
    }
    case DeformationKind::ginibre: return sample_ginibre(spec.n, seed);
    case DeformationKind::user_matrix: {
      Eigen::MatrixXcd m = read_user_matrix(spec.path);
      if (spec.n != 0 && m.rows() != spec.n) throw InputError("user matrix dimension differs from configured n");
      return m;
    }
  }
  throw UsageError("unknown deformation kind");
}

namespace {

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad number '" + std::string(s) + "' " + where);
  return v;
}

}  // namespace

Eigen::MatrixXcd read_user_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open user matrix file " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty user matrix file " + path);
  long long n = 0;
  {
    std::istringstream head(line);
    std::string tok, extra;
    head >> tok;
    if (head >> extra) throw InputError("first line must hold n only");
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || n < 1) throw InputError("bad dimension line in " + path);
  }
  Eigen::MatrixXcd m(n, n);
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw InputError("user matrix file has fewer than n rows");
    std::istringstream row(line);
    std::string tok;
    long long j = 0;
    while (row >> tok) {
      if (j >= n) throw InputError("row " + std::to_string(i) + " has more than n entries");
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw InputError("entry without comma in row " + std::to_string(i));
      const std::string where = "at row " + std::to_string(i);
      const std::string_view sv(tok);
      m(i, j++) = cd(parse_double(sv.substr(0, comma), where), parse_double(sv.substr(comma + 1), where));
    }
    if (j != n) throw InputError("row " + std::to_string(i) + " has " + std::to_string(j) + " entries, expected n");
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw InputError("trailing data after n rows");
  return m;
}

void write_user_matrix(const std::string& path, const Eigen::MatrixXcd& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << m.rows() << '\n';
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", m(i, j).real(), m(i, j).imag());
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

double mean_square_entry(const Eigen::MatrixXcd& a) { return a.squaredNorm() / static_cast<double>(a.rows()); }

SpectrumCache SpectrumCache::build(const Eigen::MatrixXcd& a0, cd z, bool keep_vectors) {
  if (a0.rows() != a0.cols() || a0.rows() == 0) throw UsageError("A0 must be square and non-empty");
  const Index n = a0.rows();
  SpectrumCache c;
  c.z_ = z;
  if (!keep_vectors && a0.isDiagonal(0.0)) {
    c.lambda_.resize(n);
    for (Index i = 0; i < n; ++i) c.lambda_(i) = std::norm(a0(i, i) - z);
    std::sort(c.lambda_.begin(), c.lambda_.end());
    return c;
  }
  const Eigen::MatrixXcd shifted = a0 - z * Eigen::MatrixXcd::Identity(n, n);
  // Squared singular values keep relative accuracy for the small eigenvalues.
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted, keep_vectors ? Eigen::ComputeFullU : 0);
  if (svd.info() != Eigen::Success) throw NumericError("SVD of A0 - z failed");
  const Eigen::VectorXd s = svd.singularValues();
  c.lambda_ = s.reverse().array().square();
  if (keep_vectors) c.vectors_ = svd.matrixU().rowwise().reverse();
  return c;
}

SpectrumCache SpectrumCache::from_eigenvalues(Eigen::VectorXd eigenvalues, cd z) {
  if (eigenvalues.size() == 0) throw UsageError("empty spectrum");
  if (eigenvalues.minCoeff() < -1e-10) throw UsageError("spectrum must be non-negative");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  SpectrumCache c;
  c.z_ = z;
  c.lambda_ = std::move(eigenvalues);
  return c;
}

namespace {

cd checked(cd v) {
  if (std::abs(v) < kPoleTolerance) throw DomainError("spectral sum hit a pole");
  return v;
}

cd ipow(cd v, int k) {
  cd r = 1.0;
  for (int i = 0; i < k; ++i) r *= v;
  return r;
}

}  // namespace

cd resolvent_trace(const SpectrumCache& c, cd x, int k) {
  if (k < 1) throw UsageError("resolvent power must be >= 1");
  cd sum = 0.0;
  for (Index i = 0; i < c.n(); ++i) sum += 1.0 / ipow(checked(c.eigenvalues()(i) + x), k);
  return sum / static_cast<double>(c.n());
}

cd mixed_resolvent_trace(const SpectrumCache& c, cd x, cd y, int j, int k) {
  if (j < 0 || k < 0) throw UsageError("resolvent powers must be >= 0");
  cd sum = 0.0;
  for (Index i = 0; i < c.n(); ++i) {
    const double l = c.eigenvalues()(i);
    sum += 1.0 / (ipow(checked(l + x), j) * ipow(checked(l + y), k));
  }
  return sum / static_cast<double>(c.n());
}

cd log_det_L(const SpectrumCache& c, cd x) {
  cd sum = 0.0;
  for (Index i = 0; i < c.n(); ++i) sum += std::log(checked(c.eigenvalues()(i) + x));
  return sum / static_cast<double>(c.n());
}

namespace {

Eigen::MatrixXcd shifted_h(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z) {
  if (a0.rows() != h0.rows() || a0.cols() != h0.cols() || a0.rows() != a0.cols())
    throw UsageError("A0 and H0 shapes differ");
  Eigen::MatrixXcd m = a0 + h0;
  m.diagonal().array() -= z;
  return m;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  if (svd.info() != Eigen::Success) throw NumericError("SVD failed");
  return svd.singularValues();
}

}  // namespace

double smallest_eigenvalue_Y(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z) {
  const Eigen::VectorXd s = singular_values(shifted_h(a0, h0, z));
  return s(s.size() - 1) * s(s.size() - 1);
}

double smallest_eigenvalue_Y_eigen(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z) {
  const Eigen::MatrixXcd m = shifted_h(a0, h0, z);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m * m.adjoint(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");
  return es.eigenvalues()(0);
}

SampleObservables observe(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& h0, cd z, double eps,
                          std::uint64_t seed) {
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  const Eigen::VectorXd s = singular_values(shifted_h(a0, h0, z));
  SampleObservables o;
  o.seed = seed;
  o.lambda1 = s(s.size() - 1) * s(s.size() - 1);
  const double e2 = eps * eps;
  o.trace_resolvent = (1.0 / (s.array().square() + e2)).sum() / static_cast<double>(s.size());
  return o;
}

}  // namespace ginlab
