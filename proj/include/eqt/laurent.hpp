#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eqt/detail/fft.hpp"
#include "eqt/errors.hpp"

namespace eqt {

using Index = Eigen::Index;

enum class Side { minus, plus };

/// Default relative threshold for trimming and compression.
template <typename Scalar>
constexpr Scalar default_threshold() {
  return Scalar(1e-14);
}

/// Finitely supported Laurent series a(z) = sum_k a_k z^k.
///
/// Stored as a dense coefficient block starting at `lowest_index()`. The
/// first and last stored coefficients are nonzero unless the series is zero,
/// in which case nothing is stored.
template <typename Scalar>
class LaurentSeries {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LaurentSeries() = default;

  LaurentSeries(Index lowest_index, Vector coefficients)
      : lowest_(lowest_index), coeffs_(std::move(coefficients)) {
    strip_zeros();
  }

  LaurentSeries(Index lowest_index, std::initializer_list<Scalar> coefficients)
      : lowest_(lowest_index), coeffs_(static_cast<Index>(coefficients.size())) {
    Index k = 0;
    for (Scalar c : coefficients) coeffs_(k++) = c;
    strip_zeros();
  }

  static LaurentSeries constant(Scalar c) {
    return LaurentSeries(0, Vector::Constant(1, c));
  }

  static LaurentSeries monomial(Index k, Scalar c = Scalar(1)) {
    return LaurentSeries(k, Vector::Constant(1, c));
  }

  bool is_zero() const { return coeffs_.size() == 0; }
  Index size() const { return coeffs_.size(); }
  Index lowest_index() const { return lowest_; }
  Index highest_index() const { return lowest_ + coeffs_.size() - 1; }
  const Vector& coefficients() const { return coeffs_; }

  /// Coefficient of z^k; zero outside the stored support.
  Scalar operator[](Index k) const {
    const Index pos = k - lowest_;
    return (pos < 0 || pos >= coeffs_.size()) ? Scalar(0) : coeffs_(pos);
  }

  /// Number of strictly negative / positive powers spanned by the support.
  Index n_minus() const { return is_zero() ? 0 : std::max<Index>(0, -lowest_); }
  Index n_plus() const { return is_zero() ? 0 : std::max<Index>(0, highest_index()); }

  /// a(1).
  Scalar sum() const { return coeffs_.sum(); }

  /// a^-(z) = sum_{k<0} a_k z^k
  LaurentSeries negative_part() const {
    if (n_minus() == 0) return {};
    return LaurentSeries(lowest_, coeffs_.head(n_minus()));
  }

  /// a^+(z) = sum_{k>0} a_k z^k
  LaurentSeries positive_part() const {
    if (n_plus() == 0) return {};
    return LaurentSeries(1, coeffs_.tail(n_plus()));
  }

  /// a(1/z)
  LaurentSeries reversed() const {
    if (is_zero()) return {};
    return LaurentSeries(-highest_index(), coeffs_.reverse().eval());
  }

  /// Drops end coefficients, smallest end first, while the dropped absolute
  /// mass stays within `budget`.
  LaurentSeries trimmed(Scalar budget) const {
    if (is_zero()) return {};
    Index lo = 0, hi = coeffs_.size() - 1;
    Scalar dropped = 0;
    while (lo <= hi) {
      const Scalar l = std::abs(coeffs_(lo));
      const Scalar h = std::abs(coeffs_(hi));
      const bool take_low = l <= h;
      const Scalar c = take_low ? l : h;
      if (dropped + c > budget) break;
      dropped += c;
      if (take_low) ++lo; else --hi;
    }
    if (lo > hi) return {};
    return LaurentSeries(lowest_ + lo, coeffs_.segment(lo, hi - lo + 1).eval());
  }

  /// Entries below `threshold` in absolute value removed from both ends.
  LaurentSeries support_trimmed(Scalar threshold) const {
    if (is_zero()) return {};
    Index lo = 0, hi = coeffs_.size() - 1;
    while (lo <= hi && std::abs(coeffs_(lo)) < threshold) ++lo;
    while (hi >= lo && std::abs(coeffs_(hi)) < threshold) --hi;
    if (lo > hi) return {};
    return LaurentSeries(lowest_ + lo, coeffs_.segment(lo, hi - lo + 1).eval());
  }

  LaurentSeries operator-() const { return LaurentSeries(lowest_, (-coeffs_).eval()); }

  template <typename Other>
  LaurentSeries<Other> cast() const {
    return LaurentSeries<Other>(lowest_, coeffs_.template cast<Other>().eval());
  }

 private:
  void strip_zeros() {
    Index lo = 0, hi = coeffs_.size() - 1;
    while (lo <= hi && coeffs_(lo) == Scalar(0)) ++lo;
    while (hi >= lo && coeffs_(hi) == Scalar(0)) --hi;
    if (lo > hi) {
      coeffs_.resize(0);
      lowest_ = 0;
      return;
    }
    if (lo == 0 && hi == coeffs_.size() - 1) return;
    Vector kept = coeffs_.segment(lo, hi - lo + 1);
    coeffs_ = std::move(kept);
    lowest_ += lo;
  }

  Index lowest_ = 0;
  Vector coeffs_;
};

using Laurent = LaurentSeries<double>;

template <typename Scalar>
Scalar wiener_norm(const LaurentSeries<Scalar>& a) {
  return a.coefficients().cwiseAbs().sum();
}

/// alpha * a + beta * b
template <typename Scalar>
LaurentSeries<Scalar> combine(Scalar alpha, const LaurentSeries<Scalar>& a,
                              Scalar beta, const LaurentSeries<Scalar>& b) {
  const bool use_a = !a.is_zero() && alpha != Scalar(0);
  const bool use_b = !b.is_zero() && beta != Scalar(0);
  if (!use_a && !use_b) return {};
  if (!use_b) return LaurentSeries<Scalar>(a.lowest_index(), (alpha * a.coefficients()).eval());
  if (!use_a) return LaurentSeries<Scalar>(b.lowest_index(), (beta * b.coefficients()).eval());
  const Index lo = std::min(a.lowest_index(), b.lowest_index());
  const Index hi = std::max(a.highest_index(), b.highest_index());
  typename LaurentSeries<Scalar>::Vector c = LaurentSeries<Scalar>::Vector::Zero(hi - lo + 1);
  c.segment(a.lowest_index() - lo, a.size()) += alpha * a.coefficients();
  c.segment(b.lowest_index() - lo, b.size()) += beta * b.coefficients();
  return LaurentSeries<Scalar>(lo, std::move(c));
}

/// Raw coefficient convolution; switches to FFT for long operands.
template <typename Scalar, typename DerivedA, typename DerivedB>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> convolve(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedB>& b) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (a.size() == 0 || b.size() == 0) return Vector();
  constexpr Index kDirectLimit = 64;
  if (std::min(a.size(), b.size()) <= kDirectLimit) {
    const auto& shorter = a.size() <= b.size() ? a.derived() : b.derived();
    const auto& longer = a.size() <= b.size() ? b.derived() : a.derived();
    Vector c = Vector::Zero(a.size() + b.size() - 1);
    for (Index i = 0; i < shorter.size(); ++i) {
      if (shorter(i) != Scalar(0)) c.segment(i, longer.size()) += shorter(i) * longer;
    }
    return c;
  }
  return detail::fft_convolve<Scalar>(a, b);
}

template <typename Scalar>
LaurentSeries<Scalar> multiply(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return LaurentSeries<Scalar>(a.lowest_index() + b.lowest_index(),
                               convolve<Scalar>(a.coefficients(), b.coefficients()));
}

template <typename Scalar>
LaurentSeries<Scalar> operator+(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b) {
  return combine(Scalar(1), a, Scalar(1), b);
}

template <typename Scalar>
LaurentSeries<Scalar> operator-(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b) {
  return combine(Scalar(1), a, Scalar(-1), b);
}

template <typename Scalar>
LaurentSeries<Scalar> operator*(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b) {
  return multiply(a, b);
}

template <typename Scalar>
LaurentSeries<Scalar> operator*(Scalar s, const LaurentSeries<Scalar>& a) {
  return combine(s, a, Scalar(0), LaurentSeries<Scalar>{});
}

template <typename Scalar>
bool operator==(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b) {
  return a.lowest_index() == b.lowest_index() && a.coefficients() == b.coefficients();
}

/// Point evaluation on the unit circle. Horner in z for the nonnegative
/// powers and in 1/z = conj(z) for the negative ones.
template <typename Scalar>
std::vector<std::complex<Scalar>> evaluate(const LaurentSeries<Scalar>& a,
                                           std::span<const std::complex<Scalar>> points) {
  using Complex = std::complex<Scalar>;
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const Complex& z : points) {
    if (std::abs(std::abs(z) - Scalar(1)) > Scalar(1e-12)) {
      throw Error(ErrorKind::InvalidArgument, "evaluation point is off the unit circle");
    }
    Complex pos(0), neg(0);
    if (!a.is_zero()) {
      for (Index k = a.highest_index(); k >= 0; --k) pos = pos * z + a[k];
    }
    const Complex zinv = std::conj(z);
    for (Index k = a.lowest_index(); k <= -1; ++k) neg = neg * zinv + a[k];
    out.push_back(pos + neg * zinv);
  }
  return out;
}

template <typename Scalar>
std::complex<Scalar> evaluate(const LaurentSeries<Scalar>& a, std::complex<Scalar> point) {
  return evaluate(a, std::span<const std::complex<Scalar>>(&point, 1)).front();
}

/// Entry i (1-based, i = 1..length) is sum_{k>=i} a_{-k} (minus side) or
/// sum_{k>=i} a_k (plus side): the images of e under H(a^-) and H(a^+).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hankel_tail_sums(const LaurentSeries<Scalar>& a, Side side,
                                                          Index length) {
  if (length < 0) throw Error(ErrorKind::InvalidArgument, "negative length");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> t = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(length);
  const Index span = side == Side::minus ? a.n_minus() : a.n_plus();
  Scalar acc = 0;
  for (Index i = span; i >= 1; --i) {
    acc += side == Side::minus ? a[-i] : a[i];
    if (i <= length) t(i - 1) = acc;
  }
  return t;
}

}  // namespace eqt
