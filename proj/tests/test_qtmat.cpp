#include <doctest.h>

#include "eqt/eqt.hpp"
#include "support/oracles.hpp"

using eqt::Laurent;
using eqt::Qt;
using oracle::Matrix;
using oracle::Vector;

namespace {

Laurent z(eqt::Index k, double c = 1.0) { return Laurent::monomial(k, c); }

}  // namespace

TEST_CASE("qtoep builds first-row corrections") {
  const Qt shift = eqt::qtoep<double>({0.0, 0.0}, z(-1));
  CHECK(shift.correction().is_zero());
  Matrix expect = Matrix::Zero(4, 4);
  expect(1, 0) = expect(2, 1) = expect(3, 2) = 1;
  CHECK(oracle::max_abs(eqt::qt_window(shift, 4, 4) - expect) == 0.0);

  const Laurent a(-1, {2.0 / 9, 0.0, 1.0 / 9});
  const Qt am1 = eqt::qtoep<double>({3.0 / 9, 3.0 / 9}, a);
  Matrix w(2, 3);
  w << 3, 3, 0, 2, 0, 1;
  CHECK(oracle::max_abs(eqt::qt_window(am1, 2, 3) - w / 9) < 1e-16);

  const Qt same = eqt::qtoep<double>({a[0], a[1]}, a);
  CHECK(same.correction().is_zero());
}

TEST_CASE("qt_window examples") {
  CHECK(oracle::max_abs(eqt::qt_window(Qt::identity(), 3, 3) - Matrix::Identity(3, 3)) == 0.0);
  Matrix sub(2, 2);
  sub << 0, 0, 1, 0;
  CHECK(oracle::max_abs(eqt::qt_window(Qt(z(-1)), 2, 2) - sub) == 0.0);
}

TEST_CASE("qt_add") {
  oracle::Random rnd(11);
  const Qt A = rnd.qt(2, 6);
  CHECK(oracle::max_abs(eqt::qt_window(eqt::qt_add(A, Qt()), 20, 20) - oracle::dense(A, 20, 20)) < 1e-15);
  const Qt zero = eqt::qt_add(A, eqt::qt_scale(-1.0, A));
  CHECK(zero.symbol().is_zero());
  CHECK(zero.correction().is_zero());

  const Qt B = eqt::qt_add(eqt::qtoep<double>({0.0, 0.0}, z(-1)), eqt::qtoep<double>({0.0, 1.0}, z(1)));
  CHECK(B.symbol() == Laurent(-1, {1.0, 0.0, 1.0}));
  Matrix w = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    if (i > 0) w(i, i - 1) = 1;
    if (i < 3) w(i, i + 1) = 1;
  }
  CHECK(oracle::max_abs(eqt::qt_window(B, 4, 4) - w) == 0.0);
}

TEST_CASE("qt_mul Hankel defect") {
  const Qt P = eqt::qt_mul(Qt(z(-1)), Qt(z(1)));
  Matrix expect = Matrix::Identity(4, 4);
  expect(0, 0) = 0;
  CHECK(oracle::max_abs(eqt::qt_window(P, 4, 4) - expect) < 1e-15);

  oracle::Random rnd(5);
  const Qt A = rnd.qt(3, 8);
  const Qt AI = eqt::qt_mul(A, Qt::identity());
  CHECK(oracle::max_abs(oracle::dense(AI, 30, 30) - oracle::dense(A, 30, 30)) < 1e-14);
}

TEST_CASE("qt_mul matches dense windowed products") {
  oracle::Random rnd(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Qt A = rnd.qt(4, 12), B = rnd.qt(4, 12);
    const Qt C = eqt::qt_mul(A, B);
    const Matrix ref = oracle::dense(A, 50, 200) * oracle::dense(B, 200, 50);
    CHECK(oracle::max_abs(oracle::dense(C, 50, 50) - ref) < 1e-12);
    // Correction support stays within the structural bound.
    const auto& a = A.symbol();
    const auto& b = B.symbol();
    CHECK(C.correction().rows() <= std::max({A.correction().rows(), B.correction().rows() + a.n_minus(), a.n_minus()}));
    CHECK(C.correction().cols() <= std::max({A.correction().cols() + b.n_plus(), B.correction().cols(), b.n_plus()}));
  }
}

TEST_CASE("qt_mul with long symbols uses sampled Hankel factors") {
  // Geometric tails on both sides force the randomized Hankel path.
  const eqt::Index n = 900;
  Vector c(2 * n + 1);
  for (eqt::Index k = -n; k <= n; ++k) c(k + n) = 0.4 * std::pow(0.97, double(std::abs(k))) * (k < 0 ? 1.0 : 0.7);
  const Laurent a(-n, c);
  const Qt A(a);
  const Qt C = eqt::qt_mul(A, A);
  const Matrix ref = oracle::dense(A, 120, 2 * n + 130) * oracle::dense(A, 2 * n + 130, 120);
  CHECK(oracle::max_abs(oracle::dense(C, 120, 120) - ref) < 1e-12);
  CHECK(C.correction().rank() < 80);
}

TEST_CASE("apply_ones") {
  const Qt A(Laurent(-1, {0.25, 0.0, 0.5}));
  const auto ones = eqt::apply_ones(A);
  CHECK(ones.alpha == doctest::Approx(0.75));
  CHECK(ones[0] == doctest::Approx(0.5));
  CHECK(ones[1] == doctest::Approx(0.75));
  CHECK(ones[5] == doctest::Approx(0.75));

  const auto id = eqt::apply_ones(Qt::identity());
  CHECK(id.alpha == 1.0);
  CHECK(id.w.size() == 0);

  oracle::Random rnd(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Qt B = rnd.qt(4, 10);
    const auto o = eqt::apply_ones(B);
    const eqt::Index rows = 10 + 4;
    const Matrix w = oracle::dense(B, rows, rows + 12);
    for (eqt::Index i = 0; i < rows; ++i) CHECK(std::abs(o[i] - w.row(i).sum()) < 1e-14);
  }
}

TEST_CASE("qt_inf_norm") {
  const Laurent a(-1, {1.0, 2.0, 3.0});
  CHECK(eqt::qt_inf_norm(Qt(a)) == doctest::Approx(6.0));
  CHECK(eqt::qt_inf_norm(Qt()) == 0.0);
  const Qt B(a, eqt::Correction<double>::outer(Vector::Unit(1, 0), Vector::Constant(1, 10.0)));
  CHECK(eqt::qt_inf_norm(B) == doctest::Approx(15.0));

  oracle::Random rnd(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Qt C = rnd.qt(5, 20);
    const double n = eqt::qt_inf_norm(C);
    CHECK(n >= eqt::wiener_norm(C.symbol()) - 1e-12);
    CHECK(std::abs(n - oracle::sup_row_sum(oracle::dense(C, 200, 230))) < 1e-10);
  }
}

TEST_CASE("qt_inverse") {
  const Qt A(Laurent(0, {1.0, -0.5}));
  const Qt Ai = eqt::qt_inverse(A);
  CHECK(Ai.correction().is_zero());
  for (int k = 0; k < 20; ++k) CHECK(Ai.symbol()[k] == doctest::Approx(std::pow(0.5, k)));

  const Qt I = eqt::qt_inverse(Qt::identity());
  CHECK(I.symbol() == Laurent::constant(1.0));
  CHECK(I.correction().is_zero());

  const Qt B(Laurent(-1, {-0.25, 1.0, -0.25}));
  const Qt Bi = eqt::qt_inverse(B);
  const Matrix r = oracle::dense(B, 100, 400) * oracle::dense(Bi, 400, 100) - Matrix::Identity(100, 100);
  CHECK(oracle::max_abs(r) < 1e-12);

  oracle::Random rnd(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Qt C = rnd.near_identity(3, 10, 1, 0.4).qt();
    const Qt Ci = eqt::qt_inverse(C);
    const eqt::Index n = 64 + 20;
    const Matrix res = oracle::dense(C, 64, n) * oracle::dense(Ci, n, 64) - Matrix::Identity(64, 64);
    CHECK(oracle::max_abs(res) < 1e-13);
  }

  CHECK_THROWS_AS(eqt::qt_inverse(Qt(z(1))), eqt::Error);
  try {
    eqt::qt_inverse(Qt(Laurent(-1, {0.5, -1.0, 0.5})));
    CHECK(false);
  } catch (const eqt::Error& e) {
    CHECK(e.kind() == eqt::ErrorKind::NonInvertibleSymbol);
  }
  // T(z) T(1/z) = I - e1 e1^T is not invertible although its symbol is.
  try {
    eqt::qt_inverse(eqt::qt_mul(Qt(z(-1)), Qt(z(1))));
    CHECK(false);
  } catch (const eqt::Error& e) {
    CHECK(e.kind() == eqt::ErrorKind::SingularWindow);
  }
}

TEST_CASE("qt_compress") {
  const Qt I = eqt::qt_compress(Qt::identity(), 1e-14);
  CHECK(I.symbol() == Laurent::constant(1.0));
  CHECK(I.correction().is_zero());

  Matrix blk = Matrix::Zero(3, 3);
  blk(0, 0) = 0.5;
  blk(2, 1) = 1e-20;
  const Qt tiny(Laurent::constant(1.0), eqt::Correction<double>::from_dense(blk));
  const Qt tc = eqt::qt_compress(tiny, 1e-14);
  CHECK(tc.correction().rows() == 1);

  oracle::Random rnd(17);
  Matrix l(50, 3), r(50, 3);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) {
      l(i, j) = rnd.uniform();
      r(i, j) = rnd.uniform();
    }
  const Matrix d = l * r.transpose();
  const Qt D(Laurent(), eqt::Correction<double>::from_dense(d));
  CHECK(D.correction().rank() == 50);
  const Qt Dc = eqt::qt_compress(D, 1e-14);
  CHECK(Dc.correction().rank() == 3);
  CHECK(oracle::max_abs(oracle::dense(Dc, 60, 60).topLeftCorner(50, 50) - d) < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    const Qt A = rnd.qt(4, 15);
    const double thr = 1e-6;
    const Qt Ac = eqt::qt_compress(A, thr);
    const double err = oracle::sup_row_sum(oracle::dense(A, 60, 80) - oracle::dense(Ac, 60, 80));
    CHECK(err <= 3 * thr * eqt::qt_inf_norm(A));
  }
}

TEST_CASE("finite-support apply and transpose apply") {
  oracle::Random rnd(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Qt A = rnd.qt(4, 10);
    const Vector x = rnd.vector(12);
    const Vector y = eqt::apply(A, x);
    const Vector yt = eqt::transpose_apply(A, x);
    const Matrix D = oracle::dense(A, 40, 40);
    Vector xp = Vector::Zero(40);
    xp.head(12) = x;
    const Vector ref = D * xp, reft = D.transpose() * xp;
    for (eqt::Index i = 0; i < 25; ++i) {
      CHECK(std::abs((i < y.size() ? y(i) : 0.0) - ref(i)) < 1e-13);
      CHECK(std::abs((i < yt.size() ? yt(i) : 0.0) - reft(i)) < 1e-13);
    }
  }
}
