#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

namespace eqt::detail {

using Index = Eigen::Index;

inline Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Values of sum_k c[k] z^(lowest+k) at z_j = exp(2 pi i j / n), j = 0..n-1.
/// Requires n >= c.size(); coefficients are wrapped modulo n.
template <typename Scalar, typename Derived>
std::vector<std::complex<Scalar>> values_on_roots(
    Index lowest, const Eigen::MatrixBase<Derived>& c, Index n) {
  std::vector<std::complex<Scalar>> buf(static_cast<std::size_t>(n));
  for (Index k = 0; k < c.size(); ++k) {
    Index pos = (lowest + k) % n;
    if (pos < 0) pos += n;
    buf[static_cast<std::size_t>(pos)] += c(k);
  }
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> spec;
  fft.fwd(spec, buf);
  // fwd evaluates at exp(-2 pi i j / n); reorder to the positive orientation.
  std::vector<std::complex<Scalar>> out(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = spec[static_cast<std::size_t>((n - j) % n)];
  }
  return out;
}

/// Inverse of values_on_roots: coefficient of z^k (k taken modulo n).
template <typename Scalar>
std::vector<std::complex<Scalar>> coefficients_from_roots(
    const std::vector<std::complex<Scalar>>& values) {
  const Index n = static_cast<Index>(values.size());
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> out;
  fft.fwd(out, values);
  const Scalar scale = Scalar(1) / static_cast<Scalar>(n);
  for (auto& x : out) x *= scale;
  return out;
}

/// Linear convolution of two real sequences through a zero-padded FFT.
template <typename Scalar, typename DerivedA, typename DerivedB>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fft_convolve(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const Index len = a.size() + b.size() - 1;
  const Index n = next_pow2(len);
  std::vector<Scalar> pa(static_cast<std::size_t>(n), Scalar(0));
  std::vector<Scalar> pb(static_cast<std::size_t>(n), Scalar(0));
  for (Index k = 0; k < a.size(); ++k) pa[static_cast<std::size_t>(k)] = a(k);
  for (Index k = 0; k < b.size(); ++k) pb[static_cast<std::size_t>(k)] = b(k);
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<Scalar> prod;
  fft.inv(prod, fa, n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(len);
  for (Index k = 0; k < len; ++k) out(k) = prod[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace eqt::detail
