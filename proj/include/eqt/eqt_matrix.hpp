#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqt/qt_matrix.hpp"

namespace eqt {

/// T(a) + E + e v^T. E is finitely supported, so it never carries an
/// e (.)^T component and the decomposition is unique.
template <typename Scalar>
class EqtMatrix {
 public:
  using Qt = QtMatrix<Scalar>;
  using Vector = L1Vector<Scalar>;
  using Matrix = typename Qt::Matrix;

  EqtMatrix() = default;
  EqtMatrix(Qt qt, Vector v = Vector()) : qt_(std::move(qt)), v_(std::move(v)) {
    Index n = v_.size();
    while (n > 0 && v_(n - 1) == Scalar(0)) --n;
    if (n < v_.size()) v_.conservativeResize(n);
  }
  /// Scalar form: v = v1 * e_1.
  EqtMatrix(Qt qt, Scalar v1) : EqtMatrix(std::move(qt), Vector::Constant(1, v1)) {}

  static EqtMatrix identity() { return EqtMatrix(Qt::identity()); }
  static EqtMatrix zero() { return EqtMatrix(); }

  const Qt& qt() const { return qt_; }
  const LaurentSeries<Scalar>& symbol() const { return qt_.symbol(); }
  const Correction<Scalar>& correction() const { return qt_.correction(); }
  const Vector& v() const { return v_; }

  Scalar operator()(Index i, Index j) const { return qt_(i, j) + (j < v_.size() ? v_(j) : Scalar(0)); }

 private:
  Qt qt_;
  Vector v_;
};

using Eqt = EqtMatrix<double>;

namespace detail {

/// Adds two finitely supported vectors of possibly different lengths.
template <typename Scalar>
L1Vector<Scalar> padded_sum(const L1Vector<Scalar>& x, Scalar beta, const L1Vector<Scalar>& y) {
  L1Vector<Scalar> out = L1Vector<Scalar>::Zero(std::max(x.size(), y.size()));
  out.head(x.size()) += x;
  out.head(y.size()) += beta * y;
  return out;
}

/// Removes entries, smallest first, while the removed 1-mass stays in budget.
template <typename Scalar>
L1Vector<Scalar> trim_l1(const L1Vector<Scalar>& v, Scalar budget, Scalar* removed = nullptr) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(v(i)) < std::abs(v(j)); });
  L1Vector<Scalar> out = v;
  Scalar dropped = 0;
  for (Index i : order) {
    const Scalar c = std::abs(v(i));
    if (c == Scalar(0)) continue;
    if (dropped + c > budget) break;
    dropped += c;
    out(i) = 0;
  }
  Index n = out.size();
  while (n > 0 && out(n - 1) == Scalar(0)) --n;
  out.conservativeResize(n);
  if (removed) *removed = dropped;
  return out;
}

template <typename Scalar>
Scalar norm_bound(const EqtMatrix<Scalar>& A) {
  return norm_bound(A.qt()) + A.v().cwiseAbs().sum();
}

}  // namespace detail

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eqt_window(const EqtMatrix<Scalar>& A, Index rows,
                                                                 Index cols) {
  auto w = qt_window(A.qt(), rows, cols);
  const Index k = std::min(cols, A.v().size());
  if (k > 0) w.leftCols(k).rowwise() += A.v().head(k).transpose();
  return w;
}

/// sup of row 1-norms. Rows at or beyond max(m, len(v) + n_minus) see the
/// symbol and v on disjoint columns and equal ||a||_W + ||v||_1; the rows
/// before are summed exactly.
template <typename Scalar>
Scalar eqt_inf_norm(const EqtMatrix<Scalar>& A) {
  const auto& a = A.symbol();
  const Index rows = std::max(A.correction().rows(), A.v().size() + a.n_minus());
  Scalar n = wiener_norm(a) + A.v().cwiseAbs().sum();
  for (Index i = 0; i < rows; ++i) n = std::max(n, detail::row_abs_sum(a, A.correction(), A.v(), i));
  return n;
}

template <typename Scalar>
AffineOnesVector<Scalar> eqt_apply_ones(const EqtMatrix<Scalar>& A) {
  AffineOnesVector<Scalar> out = apply_ones(A.qt());
  out.alpha += A.v().sum();
  return out;
}

template <typename Scalar>
EqtMatrix<Scalar> eqt_scale(Scalar s, const EqtMatrix<Scalar>& A) {
  return EqtMatrix<Scalar>(qt_scale(s, A.qt()), (s * A.v()).eval());
}

/// alpha A + beta B, compressed relative to the operand norms.
template <typename Scalar>
EqtMatrix<Scalar> eqt_combine(Scalar alpha, const EqtMatrix<Scalar>& A, Scalar beta, const EqtMatrix<Scalar>& B,
                              Scalar threshold = default_threshold<Scalar>()) {
  const Scalar budget =
      threshold * (std::abs(alpha) * detail::norm_bound(A) + std::abs(beta) * detail::norm_bound(B));
  const Correction<Scalar> ea = A.correction().scaled(alpha), eb = B.correction().scaled(beta);
  const L1Vector<Scalar> v = detail::padded_sum<Scalar>((alpha * A.v()).eval(), beta, B.v());
  return EqtMatrix<Scalar>(
      detail::finish(combine(alpha, A.symbol(), beta, B.symbol()), Correction<Scalar>::concat({&ea, &eb}),
                     budget * Scalar(0.75)),
      detail::trim_l1<Scalar>(v, budget / 4));
}

template <typename Scalar>
EqtMatrix<Scalar> eqt_add(const EqtMatrix<Scalar>& A, const EqtMatrix<Scalar>& B,
                          Scalar threshold = default_threshold<Scalar>()) {
  return eqt_combine(Scalar(1), A, Scalar(1), B, threshold);
}

template <typename Scalar>
EqtMatrix<Scalar> eqt_sub(const EqtMatrix<Scalar>& A, const EqtMatrix<Scalar>& B,
                          Scalar threshold = default_threshold<Scalar>()) {
  return eqt_combine(Scalar(1), A, Scalar(-1), B, threshold);
}

/// Symbol ab; v_c = a(1) v_b + B^T v_a; E_c = qt-product correction + w_a v_b^T
/// where A's qt part maps e to a(1) e + w_a.
template <typename Scalar>
EqtMatrix<Scalar> eqt_mul(const EqtMatrix<Scalar>& A, const EqtMatrix<Scalar>& B,
                          Scalar threshold = default_threshold<Scalar>()) {
  const Scalar budget = threshold * detail::norm_bound(A) * detail::norm_bound(B);
  const Correction<Scalar> base = detail::product_correction(A.qt(), B.qt(), budget / 4);
  Correction<Scalar> ones_part;
  if (B.v().size() > 0) {
    const L1Vector<Scalar> wa = apply_ones(A.qt()).w;
    if (wa.size() > 0 && !wa.isZero(0)) ones_part = Correction<Scalar>::outer(wa, B.v());
  }
  L1Vector<Scalar> vc = A.symbol().sum() * B.v();
  if (A.v().size() > 0) {
    const L1Vector<Scalar> btv = detail::padded_sum<Scalar>(transpose_apply(B.qt(), A.v()), A.v().sum(), B.v());
    vc = detail::padded_sum<Scalar>(vc, Scalar(1), btv);
  }
  return EqtMatrix<Scalar>(detail::finish(multiply(A.symbol(), B.symbol()),
                                          Correction<Scalar>::concat({&base, &ones_part}), budget / 2),
                           detail::trim_l1<Scalar>(vc, budget / 4));
}

/// Compressed copy with ||A - result||_inf <= 3 threshold ||A||_inf.
template <typename Scalar>
EqtMatrix<Scalar> eqt_compress(const EqtMatrix<Scalar>& A, Scalar threshold = default_threshold<Scalar>()) {
  if (!(threshold > Scalar(0))) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  const Scalar budget = threshold * eqt_inf_norm(A);
  return EqtMatrix<Scalar>(QtMatrix<Scalar>(A.symbol().trimmed(budget), A.correction().compressed(budget)),
                           detail::trim_l1<Scalar>(A.v(), budget));
}

/// Woodbury: with M = T(a) + E and M^{-1} e = beta e + w, y = M^{-T} v,
/// A^{-1} = M^{-1} - (beta e + w) y^T / (1 + beta sum(v) + v.w).
template <typename Scalar>
EqtMatrix<Scalar> eqt_inverse(const EqtMatrix<Scalar>& A, Scalar tol = default_threshold<Scalar>()) {
  const QtMatrix<Scalar> Minv = qt_inverse(A.qt(), tol);
  if (A.v().size() == 0) return EqtMatrix<Scalar>(Minv);
  const AffineOnesVector<Scalar> ones = apply_ones(Minv);
  const L1Vector<Scalar> y = transpose_apply(Minv, A.v());
  const Index k = std::min(A.v().size(), ones.w.size());
  const Scalar d = Scalar(1) + ones.alpha * A.v().sum() + (k > 0 ? A.v().head(k).dot(ones.w.head(k)) : Scalar(0));
  if (std::abs(d) <= Scalar(1e-12)) {
    throw Error(ErrorKind::SingularDenominator, "1 + v^T M^{-1} e vanishes");
  }
  Correction<Scalar> update;
  if (ones.w.size() > 0 && !ones.w.isZero(0)) update = Correction<Scalar>::outer((-ones.w / d).eval(), y);
  const Correction<Scalar> F = Correction<Scalar>::sum(Minv.correction(), update);
  const Scalar norm = wiener_norm(Minv.symbol()) + F.norm_bound() + std::abs(ones.alpha / d) * y.cwiseAbs().sum();
  const L1Vector<Scalar> v = (-(ones.alpha / d) * y).eval();
  return EqtMatrix<Scalar>(QtMatrix<Scalar>(Minv.symbol(), F.compressed(tol * norm / 2)),
                           detail::trim_l1<Scalar>(v, tol * norm / 2));
}

/// Result of x^T M = rhs^T.
template <typename Scalar>
struct LeftSolve {
  L1Vector<Scalar> x;
  Scalar discarded_mass = 0;  ///< 1-mass of the dropped tail of x
  Scalar residual = 0;        ///< ||x^T M - rhs^T||_1 of the returned x
};

/// x^T M = rhs^T through the structured inverse of M, refined against the
/// exact residual.
template <typename Scalar>
LeftSolve<Scalar> eqt_left_solve(const QtMatrix<Scalar>& M, const L1Vector<Scalar>& rhs, Scalar tol = Scalar(1e-12)) {
  LeftSolve<Scalar> out;
  const Scalar rhs_norm = rhs.cwiseAbs().sum();
  if (rhs_norm == Scalar(0)) return out;
  const QtMatrix<Scalar> Minv = qt_inverse(M, std::min(tol, default_threshold<Scalar>()));
  auto residual_of = [&](const L1Vector<Scalar>& x) {
    return detail::padded_sum<Scalar>(rhs, Scalar(-1), transpose_apply(M, x));
  };
  L1Vector<Scalar> x = transpose_apply(Minv, rhs);
  L1Vector<Scalar> r = residual_of(x);
  for (int it = 0; it < 5 && r.cwiseAbs().sum() > tol * rhs_norm / 4; ++it) {
    x = detail::padded_sum<Scalar>(x, Scalar(1), transpose_apply(Minv, r));
    r = residual_of(x);
  }
  // Drop the trailing tail while its image under M stays within budget.
  const Scalar m_norm = std::max(Scalar(1), detail::norm_bound(M));
  const Scalar tail_budget = tol * rhs_norm / (4 * m_norm);
  Index n = x.size();
  Scalar tail = 0;
  while (n > 0 && tail + std::abs(x(n - 1)) <= tail_budget) tail += std::abs(x(--n));
  x.conservativeResize(n);
  out.x = std::move(x);
  out.discarded_mass = tail;
  out.residual = residual_of(out.x).cwiseAbs().sum();
  if (!(out.residual <= tol * rhs_norm)) {
    throw Error(ErrorKind::NoConvergence, "left solve residual " + std::to_string(static_cast<double>(out.residual)) +
                                              " above tolerance");
  }
  return out;
}

template <typename Scalar>
EqtMatrix<Scalar> operator+(const EqtMatrix<Scalar>& A, const EqtMatrix<Scalar>& B) { return eqt_add(A, B); }
template <typename Scalar>
EqtMatrix<Scalar> operator-(const EqtMatrix<Scalar>& A, const EqtMatrix<Scalar>& B) { return eqt_sub(A, B); }
template <typename Scalar>
EqtMatrix<Scalar> operator-(const EqtMatrix<Scalar>& A) { return eqt_scale(Scalar(-1), A); }
template <typename Scalar>
EqtMatrix<Scalar> operator*(const EqtMatrix<Scalar>& A, const EqtMatrix<Scalar>& B) { return eqt_mul(A, B); }
template <typename Scalar>
EqtMatrix<Scalar> operator*(Scalar s, const EqtMatrix<Scalar>& A) { return eqt_scale(s, A); }

}  // namespace eqt
