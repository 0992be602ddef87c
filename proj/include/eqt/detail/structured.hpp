#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "eqt/correction.hpp"
#include "eqt/laurent.hpp"

namespace eqt::detail {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Leading out_rows rows of T(a) * U, where U holds finitely supported
/// columns. Column-by-column Laurent convolution with a(1/z).
template <typename Scalar>
DenseMatrix<Scalar> toeplitz_times(const LaurentSeries<Scalar>& a, const DenseMatrix<Scalar>& u,
                                   Index out_rows) {
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(out_rows, u.cols());
  if (a.is_zero() || u.size() == 0 || out_rows == 0) return out;
  const LaurentSeries<Scalar> rev = a.reversed();
  const Index lo = rev.lowest_index();
  constexpr Index kDiagonalLimit = 64;
  if (a.size() <= kDiagonalLimit) {
    // Diagonal sweep: row i gathers a_k u_{i+k}.
    for (Index k = a.lowest_index(); k <= a.highest_index(); ++k) {
      const Scalar c = a[k];
      if (c == Scalar(0)) continue;
      const Index i0 = std::max<Index>(0, -k);
      const Index i1 = std::min(out_rows, u.rows() - k);
      if (i1 > i0) out.middleRows(i0, i1 - i0) += c * u.middleRows(i0 + k, i1 - i0);
    }
    return out;
  }
  for (Index l = 0; l < u.cols(); ++l) {
    const DenseVector<Scalar> c = convolve<Scalar>(rev.coefficients(), u.col(l));
    // Entry t of c is the coefficient of z^(lo + t).
    const Index i0 = std::max<Index>(0, lo);
    const Index i1 = std::min(out_rows, lo + c.size());
    if (i1 > i0) out.col(l).segment(i0, i1 - i0) = c.segment(i0 - lo, i1 - i0);
  }
  return out;
}

/// Natural row count of T(a) * U.
template <typename Scalar>
Index toeplitz_times_rows(const LaurentSeries<Scalar>& a, Index rows) {
  if (a.is_zero() || rows == 0) return 0;
  return std::max<Index>(0, rows + a.n_minus());
}

template <typename Scalar>
DenseMatrix<Scalar> toeplitz_times(const LaurentSeries<Scalar>& a, const DenseMatrix<Scalar>& u) {
  return toeplitz_times(a, u, toeplitz_times_rows(a, u.rows()));
}

/// out(r, :) = sum_c s_{r+c} x(c, :) for r < out_rows: a Hankel block applied
/// to a tall matrix.
template <typename Scalar>
DenseMatrix<Scalar> hankel_apply(const DenseVector<Scalar>& s, const DenseMatrix<Scalar>& x, Index out_rows) {
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(out_rows, x.cols());
  const Index n = x.rows();
  if (s.size() == 0 || n == 0 || out_rows == 0) return out;
  for (Index l = 0; l < x.cols(); ++l) {
    const DenseVector<Scalar> rev = x.col(l).reverse();
    const DenseVector<Scalar> c = convolve<Scalar>(s, rev);
    // (s * rev)_{r + n - 1} = sum_c s_{r+c} x_c
    const Index avail = std::max<Index>(0, std::min(out_rows, c.size() - (n - 1)));
    if (avail > 0) out.col(l).head(avail) = c.segment(n - 1, avail);
  }
  return out;
}

/// Smallest p such that the tail sum_{k>p} |s_k| (1-based) stays within budget.
template <typename Scalar>
Index effective_length(const DenseVector<Scalar>& s, Scalar budget) {
  Index p = s.size();
  Scalar tail = 0;
  while (p > 0 && tail + std::abs(s(p - 1)) <= budget) {
    tail += std::abs(s(p - 1));
    --p;
  }
  return p;
}

/// Low-rank factors (U, V) with H(a^-) H(b^+) ~ U V^T in the inf-norm to
/// within `budget`. Tails of both sequences are cut first, then the product
/// is either formed from explicit Hankel columns or, for long tails, sampled
/// with a randomized range finder.
template <typename Scalar>
Correction<Scalar> hankel_product(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b,
                                  Scalar budget) {
  const Index na = a.n_minus(), nb = b.n_plus();
  if (na == 0 || nb == 0) return {};
  DenseVector<Scalar> sa(na), sb(nb);
  for (Index k = 0; k < na; ++k) sa(k) = a[-(k + 1)];
  for (Index k = 0; k < nb; ++k) sb(k) = b[k + 1];

  const Scalar norm_b = sb.cwiseAbs().sum();
  const Index p = effective_length<Scalar>(sa, budget / (Scalar(4) * norm_b));
  if (p == 0) return {};
  const Scalar norm_a = sa.head(p).cwiseAbs().sum();
  const Index q = effective_length<Scalar>(sb, budget / (Scalar(4) * norm_a));
  if (q == 0) return {};
  const DenseVector<Scalar> ta = sa.head(p), tb = sb.head(q);
  const Index inner = std::min(p, q);

  constexpr Index kExplicitLimit = 384;
  if (inner <= kExplicitLimit) {
    DenseMatrix<Scalar> u = DenseMatrix<Scalar>::Zero(p, inner), v = DenseMatrix<Scalar>::Zero(q, inner);
    for (Index c = 0; c < inner; ++c) {
      u.col(c).head(p - c) = ta.segment(c, p - c);
      v.col(c).head(q - c) = tb.segment(c, q - c);
    }
    return Correction<Scalar>(std::move(u), std::move(v));
  }

  // M = H_p(a^-)[:, :inner] H_q(b^+)[:inner, :], applied through FFT products.
  auto apply = [&](const DenseMatrix<Scalar>& x) {
    return hankel_apply<Scalar>(ta, hankel_apply<Scalar>(tb, x, inner), p);
  };
  auto apply_t = [&](const DenseMatrix<Scalar>& y) {
    return hankel_apply<Scalar>(tb, hankel_apply<Scalar>(ta, y, inner), q);
  };

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<Scalar> normal;
  constexpr Index kBlock = 16;
  const Index max_rank = inner;
  const Scalar accept = Scalar(0.5) * budget / std::sqrt(static_cast<Scalar>(q));
  DenseMatrix<Scalar> basis(p, 0);
  for (;;) {
    DenseMatrix<Scalar> omega(q, kBlock);
    for (Index j = 0; j < omega.cols(); ++j)
      for (Index i = 0; i < q; ++i) omega(i, j) = normal(rng);
    DenseMatrix<Scalar> y = apply(omega);
    for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass) y -= basis * (basis.transpose() * y);
    // Each Gaussian column estimates ||(I - QQ^T) M||_2 up to a modest factor.
    const Scalar miss = y.colwise().norm().maxCoeff();
    if (miss <= accept || basis.cols() >= max_rank) break;
    Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(y);
    const Index add = std::min<Index>(kBlock, max_rank - basis.cols());
    DenseMatrix<Scalar> q_new = qr.householderQ() * DenseMatrix<Scalar>::Identity(p, add);
    for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass) q_new -= basis * (basis.transpose() * q_new);
    Eigen::HouseholderQR<DenseMatrix<Scalar>> qr2(q_new);
    q_new = qr2.householderQ() * DenseMatrix<Scalar>::Identity(p, add);
    DenseMatrix<Scalar> grown(p, basis.cols() + add);
    grown << basis, q_new;
    basis = std::move(grown);
  }
  if (basis.cols() == 0) return {};
  DenseMatrix<Scalar> right = apply_t(basis);
  return Correction<Scalar>(std::move(basis), std::move(right));
}

}  // namespace eqt::detail
