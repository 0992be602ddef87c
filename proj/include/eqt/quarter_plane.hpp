#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include <Eigen/Core>

#include "eqt/solver.hpp"

namespace eqt {

/// Nearest-neighbour random walk on the quarter plane. Entry (i, j) is the
/// probability of a vertical step i and horizontal step j; interior moves in
/// `a`, moves from the vertical axis in `y` (j >= 0), from the horizontal
/// axis in `x` (i >= 0), and from the origin in `o`.
template <typename Scalar>
struct QuarterPlaneSpec {
  Eigen::Matrix<Scalar, 3, 3> a = Eigen::Matrix<Scalar, 3, 3>::Zero();  // i, j in -1..1
  Eigen::Matrix<Scalar, 2, 3> x = Eigen::Matrix<Scalar, 2, 3>::Zero();  // i in 0..1, j in -1..1
  Eigen::Matrix<Scalar, 3, 2> y = Eigen::Matrix<Scalar, 3, 2>::Zero();  // i in -1..1, j in 0..1
  Eigen::Matrix<Scalar, 2, 2> o = Eigen::Matrix<Scalar, 2, 2>::Zero();  // i, j in 0..1

  Scalar& A(int i, int j) { return a(i + 1, j + 1); }
  Scalar& X(int i, int j) { return x(i, j + 1); }
  Scalar& Y(int i, int j) { return y(i + 1, j); }
  Scalar& O(int i, int j) { return o(i, j); }
  Scalar A(int i, int j) const { return a(i + 1, j + 1); }
  Scalar X(int i, int j) const { return x(i, j + 1); }
  Scalar Y(int i, int j) const { return y(i + 1, j); }
};

enum class DriftVerdict { positive_recurrent, not_positive_recurrent, indeterminate };

constexpr std::string_view to_string(DriftVerdict v) {
  switch (v) {
    case DriftVerdict::positive_recurrent: return "positive_recurrent";
    case DriftVerdict::not_positive_recurrent: return "not_positive_recurrent";
    case DriftVerdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

template <typename Scalar>
struct DriftReport {
  Scalar d1 = 0, d2 = 0, s1 = 0, s2 = 0, r1 = 0, r2 = 0;
  DriftVerdict verdict = DriftVerdict::indeterminate;
};

template <typename Scalar>
DriftReport<Scalar> drift_classify(const QuarterPlaneSpec<Scalar>& w) {
  DriftReport<Scalar> r;
  Scalar a_row_up = 0, a_row_down = 0, a_col_right = 0, a_col_left = 0;
  Scalar y_up = 0, y_down = 0, x_right = 0, x_left = 0;
  for (int j = -1; j <= 1; ++j) {
    a_row_up += w.A(1, j);
    a_row_down += w.A(-1, j);
    a_col_right += w.A(j, 1);
    a_col_left += w.A(j, -1);
  }
  for (int j = 0; j <= 1; ++j) {
    y_up += w.Y(1, j);
    y_down += w.Y(-1, j);
  }
  for (int i = 0; i <= 1; ++i) {
    x_right += w.X(i, 1);
    x_left += w.X(i, -1);
  }
  const Scalar x_row_up = w.X(1, -1) + w.X(1, 0) + w.X(1, 1);  // x_{1,:}(1)
  const Scalar y_col_right = w.Y(-1, 1) + w.Y(0, 1) + w.Y(1, 1);  // y_{:,1}(1)
  r.d1 = a_row_up - a_row_down;
  r.d2 = a_col_right - a_col_left;
  r.s1 = y_up - y_down;
  r.s2 = x_right - x_left;
  r.r1 = r.d2 * x_row_up - r.d1 * r.s2;
  r.r2 = r.d1 * y_col_right - r.d2 * r.s1;
  if (r.d1 == Scalar(0) && r.d2 == Scalar(0)) return r;
  const bool c1 = r.d1 < 0 && r.d2 < 0 && r.r1 < 0 && r.r2 < 0;
  const bool c2 = r.d1 >= 0 && r.d2 < 0 && r.r2 < 0 && (x_row_up != Scalar(0) || r.s2 < 0);
  const bool c3 = r.d1 < 0 && r.d2 >= 0 && r.r1 < 0 && (y_col_right != Scalar(0) || r.s1 < 0);
  r.verdict = (c1 || c2 || c3) ? DriftVerdict::positive_recurrent : DriftVerdict::not_positive_recurrent;
  return r;
}

/// Level blocks of the column-wise ordering: block i is
/// qtoep(y_{i,0}, y_{i,1}; a_{i,-1}, a_{i,0}, a_{i,1}).
template <typename Scalar>
QbdBlocks<Scalar> quarter_plane_blocks(const QuarterPlaneSpec<Scalar>& w) {
  auto block = [&](int i) {
    const LaurentSeries<Scalar> s(-1, {w.A(i, -1), w.A(i, 0), w.A(i, 1)});
    return EqtMatrix<Scalar>(qtoep<Scalar>({w.Y(i, 0), w.Y(i, 1)}, s));
  };
  return {block(-1), block(0), block(1)};
}

}  // namespace eqt
