// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "ginlab/grassmann.hpp"

using namespace ginlab;
using cd = std::complex<double>;

namespace {

GrassmannElement gen(int m, int j) { return GrassmannElement::generator(m, j); }
GrassmannElement one(int m) { return GrassmannElement::constant(m, 1.0); }

// Dense oracle: coefficient array indexed by monomial, product by explicit
// bubble sort of the concatenated generator list.
using Dense = std::vector<cd>;

Dense to_dense(const GrassmannElement& e) {
  Dense d(std::size_t{1} << e.num_generators(), 0.0);
  for (const auto& [mono, c] : e.terms()) d[mono] = c;
  return d;
}

int bubble_sign(std::vector<int> seq) {
  int swaps = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = 0; j + 1 < seq.size() - i; ++j)
      if (seq[j] > seq[j + 1]) {
        std::swap(seq[j], seq[j + 1]);
        ++swaps;
      }
  return swaps % 2 ? -1 : 1;
}

Dense dense_mul(const Dense& a, const Dense& b, int m) {
  Dense out(a.size(), 0.0);
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < b.size(); ++y) {
      if (a[x] == 0.0 || b[y] == 0.0 || (x & y)) continue;
      std::vector<int> seq;
      for (int j = 0; j < m; ++j)
        if (x >> j & 1) seq.push_back(j);
      for (int j = 0; j < m; ++j)
        if (y >> j & 1) seq.push_back(j);
      out[x | y] += double(bubble_sign(seq)) * a[x] * b[y];
    }
  return out;
}

double dense_dev(const Dense& a, const Dense& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

GrassmannElement random_element(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::bernoulli_distribution keep(0.4);
  GrassmannElement e(m);
  for (Mask mono = 0; mono < (Mask{1} << m); ++mono)
    if (keep(rng)) e.add_term(mono, cd(u(rng), u(rng)));
  return e;
}

}  // namespace

TEST_CASE("generators anticommute", "[grassmann]") {
  const int m = 5;
  GrassmannElement p12(m);
  p12.add_term(0b11, 1.0);
  REQUIRE(gen(m, 0) * gen(m, 1) == p12);
  REQUIRE(gen(m, 1) * gen(m, 0) == -p12);
  REQUIRE((gen(m, 0) * gen(m, 0)).is_zero());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) REQUIRE(gen(m, j) * gen(m, k) == -(gen(m, k) * gen(m, j)));
}

TEST_CASE("canonical sparse form", "[grassmann]") {
  const int m = 3;
  auto e = gen(m, 0) + gen(m, 1);
  e -= gen(m, 0);
  REQUIRE(e.size() == 1);
  const auto prod = e * gen(m, 2) + one(m);
  for (const auto& [mono, c] : prod.terms()) {
    REQUIRE(c != cd(0.0));
    REQUIRE((mono >> m) == 0u);
  }
  REQUIRE_THROWS_AS(GrassmannElement(kMaxGenerators + 1), CapacityError);
  REQUIRE_THROWS_AS(gen(2, 0) * gen(3, 0), UsageError);
}

TEST_CASE("product agrees with dense oracle", "[grassmann]") {
  const int m = 2;
  const auto lhs = (one(m) + gen(m, 0)) * (one(m) + gen(m, 1)) * (one(m) + gen(m, 0));
  Dense a = to_dense(one(m) + gen(m, 0)), b = to_dense(one(m) + gen(m, 1));
  const Dense expected = dense_mul(dense_mul(a, b, m), a, m);
  REQUIRE(dense_dev(to_dense(lhs), expected) == 0.0);
  // 1 + 2 psi1 + psi2: the psi1 psi2 and psi2 psi1 terms cancel.
  REQUIRE(lhs.coefficient(0b01) == cd(2.0));
  REQUIRE(lhs.coefficient(0b10) == cd(1.0));
  REQUIRE(lhs.size() == 3);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_element(5, rng), y = random_element(5, rng);
    REQUIRE(dense_dev(to_dense(x * y), dense_mul(to_dense(x), to_dense(y), 5)) < 1e-14);
  }
}

TEST_CASE("associativity over random triples", "[grassmann][property]") {
  std::mt19937_64 rng(20250101);
  std::uniform_int_distribution<int> gens(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = gens(rng);
    const auto a = random_element(m, rng), b = random_element(m, rng), c = random_element(m, rng);
    REQUIRE(max_deviation((a * b) * c, a * (b * c)) <= 1e-12);
  }
}

TEST_CASE("Berezin integration rules", "[grassmann]") {
  const int m = 2;
  REQUIRE(berezin_integrate(gen(m, 0), 0) == one(m));
  REQUIRE(berezin_integrate(one(m), 0).is_zero());
  REQUIRE_THROWS_AS(berezin_integrate(one(m), 2), UsageError);

  const cd p0(0.3, 0.1), p1(-1.2, 0.0), p2(0.0, 2.0), p12(1.5, -0.5);
  auto f = GrassmannElement::constant(m, p0) + gen(m, 0) * p1 + gen(m, 1) * p2;
  f.add_term(0b11, p12);
  // int f dpsi2 dpsi1: dpsi2 sits next to f and acts first.
  REQUIRE(berezin_integrate(f, {1, 0}) == GrassmannElement::constant(m, p12));
  // Fubini: same result from the two single integrations.
  REQUIRE(berezin_integrate(berezin_integrate(f, 1), 0).body() == p12);
  // Opposite order gives the opposite sign.
  REQUIRE(berezin_integrate(f, {0, 1}).body() == -p12);
}

TEST_CASE("top coefficient of k generators", "[grassmann]") {
  for (int k = 1; k <= 6; ++k) {
    GrassmannElement prod = one(k);
    for (int j = 0; j < k; ++j) prod = prod * gen(k, j);
    std::vector<int> order;
    for (int j = k - 1; j >= 0; --j) order.push_back(j);
    REQUIRE(berezin_integrate(prod * 3.0, order).body() == cd(3.0));
  }
}

TEST_CASE("exp_element", "[grassmann]") {
  REQUIRE(exp_element(GrassmannElement(3)) == one(3));
  const auto p12 = gen(2, 0) * gen(2, 1);
  REQUIRE(exp_element(p12) == one(2) + p12);

  // exp(chi1 eta1 + chi2 eta2) = (1 + chi1 eta1)(1 + chi2 eta2).
  const int m = 4;
  const auto a = gen(m, 0) * gen(m, 2), b = gen(m, 1) * gen(m, 3);
  const auto lhs = exp_element(a + b);
  const Dense expected = dense_mul(to_dense(one(m) + a), to_dense(one(m) + b), m);
  REQUIRE(dense_dev(to_dense(lhs), expected) < 1e-15);

  const auto shifted = exp_element(GrassmannElement::constant(2, 0.5) + p12);
  REQUIRE(std::abs(shifted.body() - std::exp(0.5)) < 1e-15);
  REQUIRE(std::abs(shifted.coefficient(0b11) - std::exp(0.5)) < 1e-15);
}

TEST_CASE("inverse of even element", "[grassmann]") {
  const int m = 4;
  auto e = GrassmannElement::constant(m, cd(2.0, 1.0)) + gen(m, 0) * gen(m, 1) + gen(m, 2) * gen(m, 3) * 0.5;
  REQUIRE(max_deviation(inverse(e) * e, one(m)) < 1e-15);
  REQUIRE_THROWS_AS(inverse(gen(m, 0) * gen(m, 1)), DomainError);
}

TEST_CASE("Gaussian Berezin integral is the determinant", "[grassmann]") {
  Eigen::MatrixXcd a(1, 1);
  a << 2.0;
  REQUIRE(gaussian_berezin_det(a) == cd(2.0));
  REQUIRE(std::abs(gaussian_berezin_det(Eigen::MatrixXcd::Identity(3, 3)) - 1.0) < 1e-15);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  for (int dim = 1; dim <= 4; ++dim) {
    Eigen::MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = cd(nd(rng), nd(rng));
    const cd det = cofactor_determinant(m);
    REQUIRE(std::abs(gaussian_berezin_det(m) - det) <= 1e-12 * std::max(1.0, std::abs(det)));
    REQUIRE(std::abs(m.determinant() - det) <= 1e-12 * std::max(1.0, std::abs(det)));
  }
  REQUIRE_THROWS_AS(gaussian_berezin_det(Eigen::MatrixXcd::Identity(7, 7)), CapacityError);
  REQUIRE_THROWS_AS(gaussian_berezin_det(Eigen::MatrixXcd::Identity(3, 3), 2), CapacityError);
}

TEST_CASE("Grassmann Hubbard-Stratonovich identity", "[grassmann]") {
  REQUIRE(verify_hubbard_grassmann());
  REQUIRE(verify_hubbard_grassmann({3, 1, 0, 2}));
  REQUIRE(verify_hubbard_grassmann({2, 0, 3, 1}));
  const auto rho = gen(4, 0), tau = gen(4, 1);
  REQUIRE(exp_element(-(rho * tau)).coefficient(0b0011) == cd(-1.0));
  const auto rhs = berezin_integrate(exp_element(rho * gen(4, 2) + tau * gen(4, 3) + gen(4, 2) * gen(4, 3)), {3, 2});
  REQUIRE(rhs.coefficient(0b0011) == cd(-1.0));
}

TEST_CASE("superdeterminant expansion", "[grassmann]") {
  Eigen::MatrixXcd a1(1, 1), b1(1, 1);
  a1 << 1.0;
  b1 << 1.0;
  const auto r1 = verify_sdet_expansion(a1, b1, 1.0);
  REQUIRE(r1.max_deviation <= 1e-12);
  REQUIRE(std::abs(r1.schur_route.body() - 1.0) < 1e-15);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd a(2, 2), b(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        a(i, j) = cd(nd(rng), nd(rng));
        b(i, j) = cd(nd(rng), nd(rng));
      }
    const double r = 0.5 + trial * 0.4;
    const auto rep = verify_sdet_expansion(a, b, r);
    REQUIRE(rep.max_deviation <= 1e-10);
    REQUIRE(std::abs(rep.expansion_route.body() - a.determinant() / (r * b).determinant()) < 1e-12);
    REQUIRE(rep.schur_route.size() > 1);
  }
  Eigen::MatrixXcd sing = Eigen::MatrixXcd::Zero(2, 2);
  REQUIRE_THROWS_AS(verify_sdet_expansion(sing, Eigen::MatrixXcd::Identity(2, 2)), UsageError);
}

TEST_CASE("supermatrix block validation", "[grassmann]") {
  const int m = 2;
  SuperMatrixInstance f{Eigen::MatrixXcd::Identity(1, 1), Eigen::MatrixXcd::Identity(1, 1), GrassmannMatrix(1, 1, m),
                        GrassmannMatrix(1, 1, m)};
  f.chi(0, 0) = gen(m, 0);
  f.eta(0, 0) = gen(m, 1);
  REQUIRE_NOTHROW(f.validate());
  // Sdet = (1 - eta chi) = 1 + chi eta.
  const auto s = sdet(f);
  REQUIRE(s.coefficient(0b11) == cd(1.0));
  f.eta(0, 0) = one(m);
  REQUIRE_THROWS_AS(f.validate(), UsageError);
}
