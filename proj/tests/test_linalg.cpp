#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "veinforge/detmath.hpp"
#include "veinforge/linalg.hpp"
#include "veinforge/mat.hpp"
#include "test_util.hpp"

using namespace vf;

namespace {

SymMatrix random_sym(Xorshift64Star& rng, int n, double scale = 5.0) {
  SymMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = rng.uniform(-scale, scale);
      a.at(i, j) = v;
      a.at(j, i) = v;
    }
  return a;
}

SymMatrix random_psd(Xorshift64Star& rng, int n, int rank) {
  Mat b(n, rank);
  for (auto& v : b.a) v = rng.uniform(-2.0, 2.0);
  return SymMatrix::from_dense(matmul(b, transpose(b)));
}

std::vector<double> column(const Mat& m, int c) {
  std::vector<double> out(m.rows);
  for (int r = 0; r < m.rows; ++r) out[r] = m.at(r, c);
  return out;
}

std::vector<double> apply(const SymMatrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.n, 0.0);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) y[i] += a.at(i, j) * x[j];
  return y;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double reconstruction_gap(const SymMatrix& a, const EigenPairs& eig) {
  double gap = 0.0;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      double r = 0.0;
      for (int k = 0; k < a.n; ++k)
        r += eig.values[k] * eig.vectors.at(i, k) * eig.vectors.at(j, k);
      const double d = r - a.at(i, j);
      gap += d * d;
    }
  return std::sqrt(gap);
}

}  // namespace

TEST_CASE("sym_eig on a diagonal matrix returns it verbatim") {
  SymMatrix a(2);
  a.at(0, 0) = 3.0;
  a.at(1, 1) = 1.0;
  const EigenPairs eig = sym_eig(a);
  CHECK(eig.values == std::vector<double>{3.0, 1.0});
  CHECK(eig.vectors.at(0, 0) == 1.0);
  CHECK(eig.vectors.at(1, 0) == 0.0);
  CHECK(eig.vectors.at(1, 1) == 1.0);
}

TEST_CASE("sym_eig on the identity keeps the canonical basis") {
  const EigenPairs eig = sym_eig(SymMatrix::identity(4));
  for (int k = 0; k < 4; ++k) {
    CHECK(eig.values[k] == 1.0);
    for (int r = 0; r < 4; ++r)
      CHECK(eig.vectors.at(r, k) == (r == k ? 1.0 : 0.0));
  }
}

TEST_CASE("sym_eig resolves the classic 2x2 exchange-coupled pair") {
  SymMatrix a(2);
  a.at(0, 0) = 2.0;
  a.at(1, 1) = 2.0;
  a.at(0, 1) = a.at(1, 0) = 1.0;
  const EigenPairs eig = sym_eig(a);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.vectors.at(0, 0) == doctest::Approx(s));
  CHECK(eig.vectors.at(1, 0) == doctest::Approx(s));
  CHECK(eig.vectors.at(0, 1) == doctest::Approx(s));
  CHECK(eig.vectors.at(1, 1) == doctest::Approx(-s));
}

TEST_CASE("sign rule skips leading components at zero") {
  SymMatrix a(2);
  a.at(1, 1) = 5.0;
  const EigenPairs eig = sym_eig(a);
  CHECK(eig.values == std::vector<double>{5.0, 0.0});
  CHECK(eig.vectors.at(0, 0) == 0.0);
  CHECK(eig.vectors.at(1, 0) == 1.0);  // second component carries the sign
  CHECK(eig.vectors.at(0, 1) == 1.0);
}

TEST_CASE("sym_eig satisfies residual, orthonormality and trace bounds") {
  Xorshift64Star rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(1, 12);
    const SymMatrix a = random_sym(rng, n);
    const double anorm = frobenius(a);
    const EigenPairs eig = sym_eig(a);

    REQUIRE(static_cast<int>(eig.values.size()) == n);
    for (int k = 0; k + 1 < n; ++k) CHECK(eig.values[k] >= eig.values[k + 1]);

    for (int k = 0; k < n; ++k) {
      const std::vector<double> v = column(eig.vectors, k);
      std::vector<double> r = apply(a, v);
      for (int i = 0; i < n; ++i) r[i] -= eig.values[k] * v[i];
      CHECK(norm2(r) <= 1e-8 * (1.0 + anorm));
      CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-10));
      for (int k2 = k + 1; k2 < n; ++k2) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += v[i] * eig.vectors.at(i, k2);
        CHECK(std::abs(dot) <= 1e-10);
      }
    }

    CHECK(reconstruction_gap(a, eig) <= 1e-8 * anorm);

    double tr_a = 0.0, tr_l = 0.0;
    for (int i = 0; i < n; ++i) tr_a += a.at(i, i);
    for (double v : eig.values) tr_l += v;
    CHECK(std::abs(tr_a - tr_l) <= 1e-9 * (1.0 + std::abs(tr_a)));

    const EigenPairs again = sym_eig(a);
    CHECK(again.values == eig.values);
    CHECK(again.vectors.a == eig.vectors.a);
  }
}

TEST_CASE("sym_eig rejects non-finite input") {
  SymMatrix a(2);
  a.at(0, 1) = a.at(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(tu::code_of([&] { sym_eig(a); }) == Err::NonFinite);
  a.at(0, 1) = a.at(1, 0) = std::numeric_limits<double>::infinity();
  CHECK(tu::code_of([&] { sym_eig(a); }) == Err::NonFinite);
}

TEST_CASE("pinv_psd inverts what is invertible and zeroes the rest") {
  const SymMatrix inv_id = pinv_psd(SymMatrix::identity(3), 1e-10);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(inv_id.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));

  SymMatrix d(2);
  d.at(0, 0) = 4.0;
  const SymMatrix p = pinv_psd(d, 1e-10);
  CHECK(p.at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p.at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("pinv_psd rcond gate drops tiny eigenvalues and keeps small ones") {
  SymMatrix tiny(2);
  tiny.at(0, 0) = 1.0;
  tiny.at(1, 1) = 1e-12;  // below 1e-10 * mu_max, dropped
  const SymMatrix pt = pinv_psd(tiny, 1e-10);
  CHECK(pt.at(1, 1) == doctest::Approx(0.0));
  CHECK(pt.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  SymMatrix small(2);
  small.at(0, 0) = 1.0;
  small.at(1, 1) = 1e-8;  // above the cutoff, inverted
  const SymMatrix ps = pinv_psd(small, 1e-10);
  CHECK(ps.at(1, 1) == doctest::Approx(1e8).epsilon(1e-10));
}

TEST_CASE("pinv_psd satisfies the Penrose identities on singular input") {
  Xorshift64Star rng(515);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const int rank = rng.uniform_int(1, n);
    const SymMatrix a = random_psd(rng, n, rank);
    const SymMatrix p = pinv_psd(a, 1e-10);
    const double tol = 1e-8 * (1.0 + frobenius(a));

    // a p a == a and p a p == p, checked entrywise
    Mat am(n, n), pm(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        am.at(i, j) = a.at(i, j);
        pm.at(i, j) = p.at(i, j);
      }
    const Mat apa = matmul(matmul(am, pm), am);
    const Mat pap = matmul(matmul(pm, am), pm);
    const Mat ap = matmul(am, pm);
    const double ptol = 1e-8 * (1.0 + frobenius(pm));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(std::abs(apa.at(i, j) - a.at(i, j)) <= tol);
        CHECK(std::abs(pap.at(i, j) - p.at(i, j)) <= ptol);
        CHECK(std::abs(ap.at(i, j) - ap.at(j, i)) <= tol);
      }
  }
}

TEST_CASE("pinv_psd of pinv_psd recovers a full-rank matrix") {
  Xorshift64Star rng(99);
  SymMatrix a = random_psd(rng, 4, 4);
  for (int i = 0; i < 4; ++i) a.at(i, i) += 0.5;  // keep it far from singular
  const SymMatrix back = pinv_psd(pinv_psd(a, 1e-10), 1e-10);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(back.at(i, j) ==
            doctest::Approx(a.at(i, j)).epsilon(1e-8).scale(1.0 + frobenius(a)));
}

TEST_CASE("pinv_psd refuses genuinely indefinite input") {
  SymMatrix a(2);
  a.at(0, 0) = 1.0;
  a.at(1, 1) = -1.0;
  CHECK(tu::code_of([&] { pinv_psd(a, 1e-10); }) == Err::NotPSD);
}

TEST_CASE("ridge_regularize adds lambda times mean diagonal") {
  SymMatrix a(2);
  a.at(0, 0) = 2.0;
  a.at(1, 1) = 4.0;
  a.at(0, 1) = a.at(1, 0) = 1.0;
  const SymMatrix r = ridge_regularize(a, 0.5);
  // trace 6, n 2, shift 0.5 * 3 = 1.5 on the diagonal only
  CHECK(r.at(0, 0) == doctest::Approx(3.5));
  CHECK(r.at(1, 1) == doctest::Approx(5.5));
  CHECK(r.at(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("from_dense symmetrizes and rejects non-square shapes") {
  Mat m(2, 2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 2.0;
  m.at(1, 0) = 4.0;
  m.at(1, 1) = 5.0;
  const SymMatrix s = SymMatrix::from_dense(m);
  CHECK(s.at(0, 1) == 3.0);
  CHECK(s.at(1, 0) == 3.0);
  CHECK(s.at(0, 0) == 1.0);

  Mat rect(2, 3);
  CHECK(tu::code_of([&] { SymMatrix::from_dense(rect); }) ==
        Err::DimensionMismatch);
}

TEST_CASE("frobenius norms match hand sums") {
  SymMatrix a(2);
  a.at(0, 0) = 1.0;
  a.at(1, 1) = 1.0;
  a.at(0, 1) = a.at(1, 0) = 2.0;
  CHECK(frobenius(a) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));

  Mat m(1, 2);
  m.at(0, 0) = 3.0;
  m.at(0, 1) = 4.0;
  CHECK(frobenius(m) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("dense matrix helpers agree with hand-computed results") {
  Mat a(2, 3), b(3, 2);
  for (int i = 0; i < 6; ++i) a.a[i] = i + 1;       // [[1,2,3],[4,5,6]]
  for (int i = 0; i < 6; ++i) b.a[i] = (i + 1) * 10;  // [[10,20],[30,40],[50,60]]
  const Mat c = matmul(a, b);
  REQUIRE(c.rows == 2);
  REQUIRE(c.cols == 2);
  CHECK(c.at(0, 0) == 220.0);
  CHECK(c.at(0, 1) == 280.0);
  CHECK(c.at(1, 0) == 490.0);
  CHECK(c.at(1, 1) == 640.0);

  const Mat t = transpose(a);
  REQUIRE(t.rows == 3);
  CHECK(t.at(2, 1) == 6.0);

  const std::vector<double> y = matvec(a, {1.0, 0.0, -1.0});
  CHECK(y == std::vector<double>{-2.0, -2.0});

  CHECK(tu::code_of([&] { matmul(a, a); }) == Err::DimensionMismatch);
  CHECK(tu::code_of([&] { matvec(a, {1.0, 2.0}); }) == Err::DimensionMismatch);
}
