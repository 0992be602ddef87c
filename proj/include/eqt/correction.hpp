#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqt/errors.hpp"

namespace eqt {

using Index = Eigen::Index;

/// Finitely supported correction E = left * right^T. E vanishes outside its
/// leading rows() x cols() block; rank() is the number of stored factor
/// columns.
template <typename Scalar>
class Correction {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Correction() = default;

  Correction(Matrix left, Matrix right) : left_(std::move(left)), right_(std::move(right)) {
    if (left_.cols() != right_.cols()) {
      throw Error(ErrorKind::InvalidArgument, "correction factors have different ranks");
    }
    if (left_.cols() == 0) *this = Correction();
  }

  /// Dense m x n block view, stored verbatim against an identity factor on the
  /// shorter side; compress to reveal the rank.
  static Correction from_dense(const Matrix& block) {
    if (block.size() == 0 || block.isZero(0)) return {};
    if (block.rows() <= block.cols()) {
      return Correction(Matrix::Identity(block.rows(), block.rows()), block.transpose());
    }
    return Correction(block, Matrix::Identity(block.cols(), block.cols()));
  }

  /// Rank-one u v^T.
  static Correction outer(const Vector& u, const Vector& v) {
    if (u.size() == 0 || v.size() == 0) return {};
    return Correction(Matrix(u), Matrix(v));
  }

  Index rows() const { return left_.rows(); }
  Index cols() const { return right_.rows(); }
  Index rank() const { return left_.cols(); }
  bool is_zero() const { return rank() == 0; }
  const Matrix& left() const { return left_; }
  const Matrix& right() const { return right_; }

  Matrix dense() const {
    if (is_zero()) return Matrix();
    return left_ * right_.transpose();
  }

  /// Leading rows x cols block of E, zero padded.
  Matrix block(Index rows, Index cols) const {
    Matrix out = Matrix::Zero(rows, cols);
    if (is_zero()) return out;
    const Index r = std::min(rows, this->rows());
    const Index c = std::min(cols, this->cols());
    if (r > 0 && c > 0) out.topLeftCorner(r, c) = left_.topRows(r) * right_.topRows(c).transpose();
    return out;
  }

  /// Row i of E restricted to its column support.
  Vector row(Index i) const {
    if (is_zero() || i >= rows()) return Vector::Zero(cols());
    return right_ * left_.row(i).transpose();
  }

  /// E e, length rows().
  Vector apply_ones() const {
    if (is_zero()) return Vector();
    return left_ * right_.colwise().sum().transpose();
  }

  /// E x for x finitely supported (entries beyond x.size() are zero).
  Vector apply(const Vector& x) const {
    if (is_zero() || x.size() == 0) return Vector::Zero(rows());
    const Index k = std::min(x.size(), cols());
    return left_ * (right_.topRows(k).transpose() * x.head(k));
  }

  /// E^T x for x finitely supported, length cols().
  Vector transpose_apply(const Vector& x) const {
    if (is_zero() || x.size() == 0) return Vector::Zero(cols());
    const Index k = std::min(x.size(), rows());
    return right_ * (left_.topRows(k).transpose() * x.head(k));
  }

  /// Upper bound on ||E||_inf: max_i sum_l |left_il| ||right_l||_1.
  Scalar norm_bound() const {
    if (is_zero()) return 0;
    const Vector col_mass = right_.cwiseAbs().colwise().sum().transpose();
    return (left_.cwiseAbs() * col_mass).maxCoeff();
  }

  Correction scaled(Scalar s) const {
    if (is_zero() || s == Scalar(0)) return {};
    return Correction((s * left_).eval(), right_);
  }

  Correction operator-() const { return scaled(Scalar(-1)); }

  /// Side-by-side concatenation of factor pairs (a sum of corrections).
  static Correction concat(std::initializer_list<const Correction*> parts) {
    Index m = 0, n = 0, r = 0;
    for (const Correction* p : parts) {
      if (p->is_zero()) continue;
      m = std::max(m, p->rows());
      n = std::max(n, p->cols());
      r += p->rank();
    }
    if (r == 0) return {};
    Matrix left = Matrix::Zero(m, r), right = Matrix::Zero(n, r);
    Index at = 0;
    for (const Correction* p : parts) {
      if (p->is_zero()) continue;
      left.block(0, at, p->rows(), p->rank()) = p->left_;
      right.block(0, at, p->cols(), p->rank()) = p->right_;
      at += p->rank();
    }
    return Correction(std::move(left), std::move(right));
  }

  static Correction sum(const Correction& a, const Correction& b) { return concat({&a, &b}); }

  /// Recompressed factors with ||E - compressed||_inf <= budget. A third of
  /// the budget each goes to dropped singular directions, trailing rows, and
  /// trailing columns. Returned factors have orthonormal right columns and
  /// full column rank.
  Correction compressed(Scalar budget) const {
    if (is_zero()) return {};
    const Scalar part = budget / Scalar(3);

    // Exact zero rows / columns at the tail.
    Index m = rows(), n = cols();
    while (m > 0 && left_.row(m - 1).isZero(0)) --m;
    while (n > 0 && right_.row(n - 1).isZero(0)) --n;
    if (m == 0 || n == 0) return {};

    Matrix qu, qv, ru, rv;
    thin_qr(left_.topRows(m), qu, ru);
    thin_qr(right_.topRows(n), qv, rv);
    const Matrix core = ru * rv.transpose();
    Eigen::JacobiSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    Matrix lu = qu * svd.matrixU();
    Matrix lv = qv * svd.matrixV();

    // Drop trailing singular directions while the inf-norm bound allows.
    Index keep = sigma.size();
    Scalar dropped = 0;
    while (keep > 0) {
      const Index l = keep - 1;
      const Scalar cost = sigma(l) * lu.col(l).cwiseAbs().maxCoeff() * lv.col(l).cwiseAbs().sum();
      if (dropped + cost > part) break;
      dropped += cost;
      --keep;
    }
    // The bound above is loose for many noise-level directions; when the
    // block is small, measure the dropped part exactly and drop further.
    constexpr Index kExactLimit = Index(1) << 22;
    if (keep > 0 && m * n <= kExactLimit) {
      auto dropped_norm = [&](Index k) {
        if (k >= sigma.size()) return Scalar(0);
        const Index d = sigma.size() - k;
        const Matrix rest = lu.rightCols(d) * sigma.tail(d).asDiagonal() * lv.rightCols(d).transpose();
        return rest.cwiseAbs().rowwise().sum().maxCoeff();
      };
      Index lo = 0, hi = keep;  // dropped_norm(hi) <= part
      while (lo < hi) {
        const Index mid = (lo + hi) / 2;
        if (dropped_norm(mid) <= part) hi = mid; else lo = mid + 1;
      }
      keep = hi;
    }
    if (keep == 0) return {};
    Matrix left = lu.leftCols(keep) * sigma.head(keep).asDiagonal();
    Matrix right = lv.leftCols(keep);

    // Trailing rows: each dropped row's 1-norm is bounded independently.
    const Vector col_mass = right.cwiseAbs().colwise().sum().transpose();
    Index mr = left.rows();
    while (mr > 0 && (left.row(mr - 1).cwiseAbs() * col_mass)(0) <= part) --mr;
    if (mr == 0) return {};

    // Trailing columns: the error accumulates across dropped columns.
    const Vector row_peak = left.topRows(mr).cwiseAbs().colwise().maxCoeff().transpose();
    Index nc = right.rows();
    Vector tail = Vector::Zero(keep);
    while (nc > 0) {
      const Vector next = tail + right.row(nc - 1).cwiseAbs().transpose();
      if (row_peak.dot(next) > part) break;
      tail = next;
      --nc;
    }
    if (nc == 0) return {};
    return Correction(left.topRows(mr).eval(), right.topRows(nc).eval());
  }

 private:
  static void thin_qr(const Matrix& a, Matrix& q, Matrix& r) {
    const Index k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Matrix> qr(a);
    q = qr.householderQ() * Matrix::Identity(a.rows(), k);
    r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  }

  Matrix left_;
  Matrix right_;
};

}  // namespace eqt
