#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "eqt/correction.hpp"
#include "eqt/detail/structured.hpp"
#include "eqt/errors.hpp"
#include "eqt/laurent.hpp"
#include "eqt/symbol.hpp"

namespace eqt {

/// Finitely supported vector (l^1); entry k holds the 1-based component k+1.
template <typename Scalar>
using L1Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// alpha * e + w with w finitely supported.
template <typename Scalar>
struct AffineOnesVector {
  Scalar alpha = 0;
  L1Vector<Scalar> w;

  Scalar operator[](Index i) const { return alpha + (i < w.size() ? w(i) : Scalar(0)); }

  Scalar inf_norm() const {
    Scalar n = std::abs(alpha);
    for (Index i = 0; i < w.size(); ++i) n = std::max(n, std::abs(alpha + w(i)));
    return n;
  }
};

/// T(a) + E with E finitely supported.
template <typename Scalar>
class QtMatrix {
 public:
  using Series = LaurentSeries<Scalar>;
  using Corr = Correction<Scalar>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  QtMatrix() = default;
  explicit QtMatrix(Series symbol, Corr correction = {})
      : symbol_(std::move(symbol)), correction_(std::move(correction)) {}

  static QtMatrix identity() { return QtMatrix(Series::constant(Scalar(1))); }
  static QtMatrix zero() { return QtMatrix(); }

  const Series& symbol() const { return symbol_; }
  const Corr& correction() const { return correction_; }
  bool is_zero() const { return symbol_.is_zero() && correction_.is_zero(); }

  /// Entry (i, j), 0-based.
  Scalar operator()(Index i, Index j) const {
    Scalar x = symbol_[j - i];
    if (i < correction_.rows() && j < correction_.cols()) {
      x += correction_.left().row(i).dot(correction_.right().row(j));
    }
    return x;
  }

 private:
  Series symbol_;
  Corr correction_;
};

using Qt = QtMatrix<double>;

/// Matrix whose first row is b_row (continued by the symbol's own row) and
/// whose other rows are those of T(a).
template <typename Scalar>
QtMatrix<Scalar> qtoep(std::span<const Scalar> b_row, const LaurentSeries<Scalar>& a) {
  using Vector = typename QtMatrix<Scalar>::Vector;
  Vector row(static_cast<Index>(b_row.size()));
  for (Index j = 0; j < row.size(); ++j) row(j) = b_row[static_cast<std::size_t>(j)] - a[j];
  Index n = row.size();
  while (n > 0 && row(n - 1) == Scalar(0)) --n;
  if (n == 0) return QtMatrix<Scalar>(a);
  return QtMatrix<Scalar>(a, Correction<Scalar>::outer(Vector::Unit(1, 0), row.head(n)));
}

template <typename Scalar>
QtMatrix<Scalar> qtoep(std::initializer_list<Scalar> b_row, const LaurentSeries<Scalar>& a) {
  return qtoep(std::span<const Scalar>(b_row.begin(), b_row.size()), a);
}

/// Leading rows x cols block as a dense matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> qt_window(const QtMatrix<Scalar>& A, Index rows,
                                                                Index cols) {
  if (rows < 0 || cols < 0) throw Error(ErrorKind::InvalidArgument, "negative window size");
  auto w = A.correction().block(rows, cols);
  const auto& a = A.symbol();
  for (Index k = a.lowest_index(); !a.is_zero() && k <= a.highest_index(); ++k) {
    const Scalar c = a[k];
    if (c == Scalar(0)) continue;
    // entries (i, i + k)
    const Index i0 = std::max<Index>(0, -k);
    const Index i1 = std::min(rows, cols - k);
    for (Index i = i0; i < i1; ++i) w(i, i + k) += c;
  }
  return w;
}

namespace detail {

/// Exact 1-norm of row i of T(a) + E + e v^T.
template <typename Scalar>
Scalar row_abs_sum(const LaurentSeries<Scalar>& a, const Correction<Scalar>& E, const L1Vector<Scalar>& v,
                   Index i) {
  Index len = std::max(E.cols(), v.size());
  if (!a.is_zero()) len = std::max(len, i + a.highest_index() + 1);
  if (len <= 0) return 0;
  L1Vector<Scalar> buf = L1Vector<Scalar>::Zero(len);
  if (!a.is_zero()) {
    const Index j0 = std::max<Index>(0, i + a.lowest_index());
    const Index j1 = i + a.highest_index();
    if (j1 >= j0) buf.segment(j0, j1 - j0 + 1) += a.coefficients().segment(j0 - i - a.lowest_index(), j1 - j0 + 1);
  }
  if (i < E.rows()) buf.head(E.cols()) += E.row(i);
  if (v.size() > 0) buf.head(v.size()) += v;
  return buf.cwiseAbs().sum();
}

/// Cheap upper bound on ||T(a) + E||_inf used to scale arithmetic budgets.
template <typename Scalar>
Scalar norm_bound(const QtMatrix<Scalar>& A) {
  return wiener_norm(A.symbol()) + A.correction().norm_bound();
}

/// Symbol trimmed and correction compressed within a joint inf-norm budget.
template <typename Scalar>
QtMatrix<Scalar> finish(const LaurentSeries<Scalar>& symbol, const Correction<Scalar>& raw, Scalar budget) {
  return QtMatrix<Scalar>(symbol.trimmed(budget / 2), raw.compressed(budget / 2));
}

/// Uncompressed correction of A * B, together with the exact product symbol.
template <typename Scalar>
Correction<Scalar> product_correction(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B, Scalar budget) {
  using Matrix = DenseMatrix<Scalar>;
  const auto& a = A.symbol();
  const auto& b = B.symbol();
  const auto& Ea = A.correction();
  const auto& Eb = B.correction();

  Correction<Scalar> hankel = -hankel_product(a, b, budget);
  Correction<Scalar> t_eb, ea_t, ea_eb;
  if (!Eb.is_zero() && !a.is_zero()) t_eb = Correction<Scalar>(toeplitz_times(a, Eb.left()), Eb.right());
  if (!Ea.is_zero() && !b.is_zero()) {
    ea_t = Correction<Scalar>(Ea.left(), toeplitz_times(b.reversed(), Ea.right()));
  }
  if (!Ea.is_zero() && !Eb.is_zero()) {
    const Index k = std::min(Ea.cols(), Eb.rows());
    if (k > 0) {
      const Matrix inner = Ea.right().topRows(k).transpose() * Eb.left().topRows(k);
      ea_eb = Correction<Scalar>(Ea.left() * inner, Eb.right());
    }
  }
  return Correction<Scalar>::concat({&hankel, &t_eb, &ea_t, &ea_eb});
}

}  // namespace detail

/// sup of row 1-norms: exact over rows meeting the correction, ||a||_W beyond.
template <typename Scalar>
Scalar qt_inf_norm(const QtMatrix<Scalar>& A) {
  Scalar n = wiener_norm(A.symbol());
  const L1Vector<Scalar> none;
  for (Index i = 0; i < A.correction().rows(); ++i) {
    n = std::max(n, detail::row_abs_sum(A.symbol(), A.correction(), none, i));
  }
  return n;
}

/// A e as alpha e + w.
template <typename Scalar>
AffineOnesVector<Scalar> apply_ones(const QtMatrix<Scalar>& A) {
  AffineOnesVector<Scalar> out;
  const auto& a = A.symbol();
  out.alpha = a.sum();
  const Index len = std::max(a.n_minus(), A.correction().rows());
  out.w = -hankel_tail_sums(a, Side::minus, len);
  if (!A.correction().is_zero()) out.w.head(A.correction().rows()) += A.correction().apply_ones();
  return out;
}

/// A x for finitely supported x.
template <typename Scalar>
L1Vector<Scalar> apply(const QtMatrix<Scalar>& A, const L1Vector<Scalar>& x) {
  const Index len = std::max(detail::toeplitz_times_rows(A.symbol(), x.size()), A.correction().rows());
  L1Vector<Scalar> y = detail::toeplitz_times<Scalar>(A.symbol(), x, len);
  if (!A.correction().is_zero()) y.head(A.correction().rows()) += A.correction().apply(x);
  return y;
}

/// A^T x for finitely supported x.
template <typename Scalar>
L1Vector<Scalar> transpose_apply(const QtMatrix<Scalar>& A, const L1Vector<Scalar>& x) {
  const LaurentSeries<Scalar> rev = A.symbol().reversed();
  const Index len = std::max(detail::toeplitz_times_rows(rev, x.size()), A.correction().cols());
  L1Vector<Scalar> y = detail::toeplitz_times<Scalar>(rev, x, len);
  if (!A.correction().is_zero()) y.head(A.correction().cols()) += A.correction().transpose_apply(x);
  return y;
}

template <typename Scalar>
QtMatrix<Scalar> qt_scale(Scalar s, const QtMatrix<Scalar>& A) {
  return QtMatrix<Scalar>(s * A.symbol(), A.correction().scaled(s));
}

/// alpha A + beta B, compressed within threshold relative to the operand norms.
template <typename Scalar>
QtMatrix<Scalar> qt_combine(Scalar alpha, const QtMatrix<Scalar>& A, Scalar beta, const QtMatrix<Scalar>& B,
                            Scalar threshold = default_threshold<Scalar>()) {
  const Scalar budget =
      threshold * (std::abs(alpha) * detail::norm_bound(A) + std::abs(beta) * detail::norm_bound(B));
  const Correction<Scalar> ea = A.correction().scaled(alpha), eb = B.correction().scaled(beta);
  return detail::finish(combine(alpha, A.symbol(), beta, B.symbol()), Correction<Scalar>::concat({&ea, &eb}),
                        budget);
}

template <typename Scalar>
QtMatrix<Scalar> qt_add(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B,
                        Scalar threshold = default_threshold<Scalar>()) {
  return qt_combine(Scalar(1), A, Scalar(1), B, threshold);
}

template <typename Scalar>
QtMatrix<Scalar> qt_sub(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B,
                        Scalar threshold = default_threshold<Scalar>()) {
  return qt_combine(Scalar(1), A, Scalar(-1), B, threshold);
}

/// T(ab) + [-H(a^-)H(b^+) + T(a)E_b + E_a T(b) + E_a E_b], compressed.
template <typename Scalar>
QtMatrix<Scalar> qt_mul(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B,
                        Scalar threshold = default_threshold<Scalar>()) {
  const Scalar budget = threshold * detail::norm_bound(A) * detail::norm_bound(B);
  const Correction<Scalar> raw = detail::product_correction(A, B, budget / 4);
  return detail::finish(multiply(A.symbol(), B.symbol()), raw, budget * Scalar(0.75));
}

/// Symbol trimmed and correction recompressed; ||A - result||_inf <= 3 threshold ||A||_inf.
template <typename Scalar>
QtMatrix<Scalar> qt_compress(const QtMatrix<Scalar>& A, Scalar threshold = default_threshold<Scalar>()) {
  if (!(threshold > Scalar(0))) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  const Scalar budget = threshold * qt_inf_norm(A);
  return QtMatrix<Scalar>(A.symbol().trimmed(budget), A.correction().compressed(budget));
}

/// A^{-1} = T(b) - T(b) U (I + V^T U)^{-1} V^T with b = 1/a and U V^T the
/// correction of A T(b) - I.
template <typename Scalar>
QtMatrix<Scalar> qt_inverse(const QtMatrix<Scalar>& A, Scalar tol = default_threshold<Scalar>()) {
  using Matrix = typename QtMatrix<Scalar>::Matrix;
  SymbolOptions<Scalar> opts;
  opts.tol = tol;
  const LaurentSeries<Scalar> b = reciprocal(A.symbol(), opts);
  const QtMatrix<Scalar> Tb(b);
  const Scalar scale = detail::norm_bound(A) * wiener_norm(b);
  const Correction<Scalar> K = detail::product_correction(A, Tb, tol * scale / 4).compressed(tol * scale / 4);
  if (K.is_zero()) return Tb;

  const Index r = K.rank();
  const Index overlap = std::min(K.rows(), K.cols());
  Matrix S = Matrix::Identity(r, r);
  if (overlap > 0) S += K.right().topRows(overlap).transpose() * K.left().topRows(overlap);
  Eigen::PartialPivLU<Matrix> lu(S);
  const Scalar rcond = lu.rcond();
  if (!(rcond > Scalar(64) * std::numeric_limits<Scalar>::epsilon())) {
    throw Error(ErrorKind::SingularWindow, "capacitance matrix of the inverse is singular");
  }
  const Matrix left = -(detail::toeplitz_times(b, K.left()) * lu.inverse());
  const Correction<Scalar> F(left, K.right());
  const Scalar norm_inv = wiener_norm(b) + F.norm_bound();
  return QtMatrix<Scalar>(b, F.compressed(tol * norm_inv));
}

template <typename Scalar>
QtMatrix<Scalar> operator+(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B) { return qt_add(A, B); }
template <typename Scalar>
QtMatrix<Scalar> operator-(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B) { return qt_sub(A, B); }
template <typename Scalar>
QtMatrix<Scalar> operator-(const QtMatrix<Scalar>& A) { return qt_scale(Scalar(-1), A); }
template <typename Scalar>
QtMatrix<Scalar> operator*(const QtMatrix<Scalar>& A, const QtMatrix<Scalar>& B) { return qt_mul(A, B); }
template <typename Scalar>
QtMatrix<Scalar> operator*(Scalar s, const QtMatrix<Scalar>& A) { return qt_scale(s, A); }

}  // namespace eqt
