// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/susy.hpp"

#include <algorithm>

#include "ginlab/grassmann.hpp"

namespace ginlab {

namespace {

constexpr cd I1{0.0, 1.0};

using Mat = Eigen::MatrixXcd;

Mat assemble(const Mat& s, cd d11, cd d22) {
  const Index n = s.rows();
  Mat m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = d11 * Mat::Identity(n, n);
  m.topRightCorner(n, n) = I1 * s;
  m.bottomLeftCorner(n, n) = I1 * s.adjoint();
  m.bottomRightCorner(n, n) = d22 * Mat::Identity(n, n);
  return m;
}

Mat dense_inverse(const Mat& m, const char* what) {
  Eigen::PartialPivLU<Mat> lu(m);
  const Mat inv = lu.inverse();
  if (!inv.allFinite() || std::abs(lu.determinant()) == 0.0)
    throw NumericError(std::string("singular block matrix ") + what);
  return inv;
}

struct Inverses {
  Mat a, b;
  Index n;
  [[nodiscard]] auto A(int i, int j) const { return a.block((i - 1) * n, (j - 1) * n, n, n); }
  [[nodiscard]] auto B(int i, int j) const { return b.block((i - 1) * n, (j - 1) * n, n, n); }
};

Inverses inverses(const BlockPair& p) { return {dense_inverse(p.A_matrix, "A"), dense_inverse(p.B_matrix, "B"), p.n()}; }

cd exp_log_dev(cd a, cd b) { return std::exp(a - b) - 1.0; }

}  // namespace

BlockPair BlockPair::build(const Eigen::MatrixXcd& a0, cd z, cd u, cd t1, cd t2) {
  if (a0.rows() != a0.cols() || a0.rows() == 0) throw UsageError("A0 must be square and non-empty");
  BlockPair p;
  p.u = u;
  p.t1 = t1;
  p.t2 = t2;
  p.shifted = a0;
  p.shifted.diagonal().array() -= z;
  p.A_matrix = assemble(p.shifted, u, std::conj(u));
  p.B_matrix = assemble(p.shifted, I1 * t1, I1 * t2);
  return p;
}

void IntegrandPoint::validate() const {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw UsageError("r1, r2 must be positive");
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
}

cd phi(const SpectrumCache& c, cd u, cd t1, cd t2) {
  const double uu = std::norm(u);
  const cd tt = t1 * t2;
  const cd x = uu, y = -tt;
  const cd g_t = resolvent_trace(c, y, 1);
  const cd g_ut = mixed_resolvent_trace(c, x, y, 1, 1);
  const cd g_utt = mixed_resolvent_trace(c, x, y, 1, 2);
  const cd g_uutt = mixed_resolvent_trace(c, x, y, 2, 2);
  const double n = static_cast<double>(c.n());
  const cd first = 1.0 - g_t + uu * g_ut;
  return first * first + tt * uu * g_ut * g_ut - (uu + tt) / n * (g_utt - uu * g_uutt);
}

cd I_from_blocks(const BlockPair& p) {
  const Inverses inv = inverses(p);
  const double n = static_cast<double>(p.n());
  const cd t1221 = (inv.A(1, 2) * inv.B(2, 1)).trace();
  const cd t2112 = (inv.A(2, 1) * inv.B(1, 2)).trace();
  const cd t1111 = (inv.A(1, 1) * inv.B(1, 1)).trace();
  const cd t2222 = (inv.A(2, 2) * inv.B(2, 2)).trace();
  const cd quad1 = (inv.A(1, 2) * inv.B(2, 2) * inv.A(2, 1) * inv.B(1, 1)).trace();
  const cd quad2 = (inv.A(1, 1) * inv.B(1, 2) * inv.A(2, 2) * inv.B(2, 1)).trace();
  return (1.0 + t1221 / n) * (1.0 + t2112 / n) - t1111 * t2222 / (n * n) - (quad1 - quad2) / (n * n);
}

cd I_from_berezin(const BlockPair& p, EtaPlacement placement) {
  const Index n = p.n();
  if (n > 4) throw CapacityError("Berezin route limited to n <= 4");
  const Inverses inv = inverses(p);
  constexpr int m = 4;  // chi1, chi2, eta1, eta2
  const auto g = [](int j) { return GrassmannElement::generator(m, j); };
  const auto eta_of_block = [&](Index i) { return i < n ? g(3) : g(2); };
  GrassmannMatrix chi(2 * n, 2 * n, m);
  for (Index i = 0; i < 2 * n; ++i) chi(i, i) = i < n ? g(0) : g(1);
  GrassmannMatrix mm = inv.a * chi * inv.b;
  for (Index i = 0; i < 2 * n; ++i)
    for (Index j = 0; j < 2 * n; ++j)
      mm(i, j) = mm(i, j) * eta_of_block(placement == EtaPlacement::row_block ? i : j);
  const GrassmannElement tr = mm.trace();
  const GrassmannElement tr2 = (mm * mm).trace();
  const double nd = static_cast<double>(n);
  GrassmannElement body = GrassmannElement::constant(m, 1.0) + tr * (1.0 / nd) + (tr * tr) * (0.5 / (nd * nd)) -
                          tr2 * (0.5 / (nd * nd));
  const GrassmannElement weight = exp_element(g(0) * g(2) + g(1) * g(3));
  // d eta d chi = d eta1 d chi1 d eta2 d chi2.
  return berezin_integrate(weight * body, {2, 0, 3, 1}).body();
}

double BlockIdentityReport::max() const noexcept {
  return std::max({schur_A, schur_B, traces[0], traces[1], traces[2], traces[3]});
}

BlockIdentityReport check_block_identities(const BlockPair& p, const SpectrumCache& c) {
  if (c.n() != p.n()) throw UsageError("spectrum and block pair dimensions differ");
  const Inverses inv = inverses(p);
  const Index n = p.n();
  const Mat& s = p.shifted;
  const Mat id = Mat::Identity(n, n);
  const double uu = std::norm(p.u);
  const cd tt = p.t1 * p.t2;
  const Mat y0 = s * s.adjoint(), y0t = s.adjoint() * s;
  const Mat gu = (y0 + uu * id).inverse(), gut = (y0t + uu * id).inverse();
  const Mat gt = (y0 - tt * id).inverse(), gtt = (y0t - tt * id).inverse();

  Mat a_cf(2 * n, 2 * n), b_cf(2 * n, 2 * n);
  a_cf << std::conj(p.u) * gu, -I1 * gu * s, -I1 * s.adjoint() * gu, p.u * gut;
  b_cf << I1 * p.t2 * gt, -I1 * gt * s, -I1 * s.adjoint() * gt, I1 * p.t1 * gtt;

  BlockIdentityReport r;
  r.schur_A = (inv.a - a_cf).cwiseAbs().maxCoeff();
  r.schur_B = (inv.b - b_cf).cwiseAbs().maxCoeff();

  const double nd = static_cast<double>(n);
  const cd x = uu, y = -tt;
  const cd tr_t = resolvent_trace(c, y) * nd;
  const cd tr_ut = mixed_resolvent_trace(c, x, y, 1, 1) * nd;
  const cd tr_utt = mixed_resolvent_trace(c, x, y, 1, 2) * nd;
  const cd tr_uutt = mixed_resolvent_trace(c, x, y, 2, 2) * nd;
  const auto rel = [](cd lhs, cd rhs) { return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)); };

  const cd rhs0 = -tr_t + uu * tr_ut;
  r.traces[0] = std::max(rel((inv.A(2, 1) * inv.B(1, 2)).trace(), rhs0), rel((inv.A(1, 2) * inv.B(2, 1)).trace(), rhs0));
  r.traces[1] = rel((inv.A(1, 1) * inv.B(1, 1)).trace() * (inv.A(2, 2) * inv.B(2, 2)).trace(), -tt * uu * tr_ut * tr_ut);
  r.traces[2] = rel((inv.A(1, 2) * inv.B(2, 2) * inv.A(2, 1) * inv.B(1, 1)).trace(), tt * tr_utt - tt * uu * tr_uutt);
  r.traces[3] = rel((inv.A(1, 1) * inv.B(1, 2) * inv.A(2, 2) * inv.B(2, 1)).trace(), -uu * tr_utt + uu * uu * tr_uutt);
  return r;
}

cd F1(const SpectrumCache& c, double u1, double u2, double eps) {
  return log_det_L(c, u1 * u1 + u2 * u2) - (u1 + eps) * (u1 + eps) - u2 * u2;
}

cd F2(const SpectrumCache& c, cd t1, cd t2, double r1, double r2, double eps) {
  const double rr = r1 * r2;
  return -log_det_L(c, -t1 * t2) - rr * rr - I1 * rr * (t1 + t2) - eps * (r1 * r1 + r2 * r2);
}

DetIdentityReport verify_det_identities(const BlockPair& p, const SpectrumCache& c) {
  if (c.n() != p.n()) throw UsageError("spectrum and block pair dimensions differ");
  const auto log_det = [](const Mat& m) {
    Eigen::PartialPivLU<Mat> lu(m);
    const Mat& lu_m = lu.matrixLU();
    cd acc = 0.0;
    for (Index i = 0; i < m.rows(); ++i) acc += std::log(lu_m(i, i));
    if (lu.permutationP().determinant() < 0) acc += cd(0.0, M_PI);
    return acc;
  };
  const double nd = static_cast<double>(p.n());
  DetIdentityReport r;
  r.log_det_A = log_det(p.A_matrix);
  r.log_det_B = log_det(p.B_matrix);
  r.dev_A = std::abs(exp_log_dev(r.log_det_A, nd * log_det_L(c, std::norm(p.u))));
  r.dev_B = std::abs(exp_log_dev(r.log_det_B, nd * log_det_L(c, -p.t1 * p.t2)));
  return r;
}

}  // namespace ginlab
