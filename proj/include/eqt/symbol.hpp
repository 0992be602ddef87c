#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "eqt/laurent.hpp"

namespace eqt {

/// Symbols a_{-1}(z), a_0(z), a_1(z) of the down / local / up blocks.
template <typename Scalar>
struct SymbolTriple {
  LaurentSeries<Scalar> a_minus1;
  LaurentSeries<Scalar> a_0;
  LaurentSeries<Scalar> a_plus1;

  Scalar down() const { return a_minus1.sum(); }
  Scalar up() const { return a_plus1.sum(); }
  Scalar total() const { return a_minus1.sum() + a_0.sum() + a_plus1.sum(); }

  Index span() const {
    Index lo = 0, hi = 0;
    for (const auto* s : {&a_minus1, &a_0, &a_plus1}) {
      if (s->is_zero()) continue;
      lo = std::min(lo, s->lowest_index());
      hi = std::max(hi, s->highest_index());
    }
    return hi - lo + 1;
  }
};

using Triple = SymbolTriple<double>;

template <typename Scalar>
struct SymbolOptions {
  Scalar tol = default_threshold<Scalar>();
  Index max_grid = Index(1) << 22;
};

namespace detail {

template <typename Scalar>
Index initial_grid(Index span) {
  return std::max<Index>(16, next_pow2(4 * std::max<Index>(span, 1)));
}

/// Maps FFT slot k to the signed power it represents on an n-point grid.
inline Index signed_power(Index k, Index n) { return k < n / 2 ? k : k - n; }

/// Keeps the coefficients with |power| < n/4 and reports the mass of the rest.
template <typename Scalar>
LaurentSeries<Scalar> inner_half(const std::vector<std::complex<Scalar>>& c, Scalar& outer_mass) {
  const Index n = static_cast<Index>(c.size());
  const Index q = n / 4;
  typename LaurentSeries<Scalar>::Vector inner(2 * q - 1);
  outer_mass = 0;
  for (Index k = 0; k < n; ++k) {
    const Index p = signed_power(k, n);
    const Scalar x = c[static_cast<std::size_t>(k)].real();
    if (p > -q && p < q) {
      inner(p + q - 1) = x;
    } else {
      outer_mass += std::abs(x);
    }
  }
  return LaurentSeries<Scalar>(-(q - 1), std::move(inner));
}

/// Direct (non-FFT) convolution; its rounding error is bounded by
/// eps * (|a| * |b|) coefficientwise, which residual checks rely on.
template <typename Scalar>
LaurentSeries<Scalar> multiply_direct(const LaurentSeries<Scalar>& a, const LaurentSeries<Scalar>& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto& x = a.size() <= b.size() ? a : b;
  const auto& y = a.size() <= b.size() ? b : a;
  typename LaurentSeries<Scalar>::Vector c =
      LaurentSeries<Scalar>::Vector::Zero(a.size() + b.size() - 1);
  for (Index i = 0; i < x.size(); ++i) {
    if (x.coefficients()(i) != Scalar(0)) c.segment(i, y.size()) += x.coefficients()(i) * y.coefficients();
  }
  return LaurentSeries<Scalar>(a.lowest_index() + b.lowest_index(), std::move(c));
}

/// Root of A x^2 + B x + C = 0 of minimum modulus. The larger root is formed
/// first and the smaller recovered from the product of the roots.
template <typename Scalar>
std::complex<Scalar> minimal_root(std::complex<Scalar> A, std::complex<Scalar> B,
                                  std::complex<Scalar> C, Scalar linear_cutoff) {
  using Complex = std::complex<Scalar>;
  if (std::abs(A) <= linear_cutoff) {
    return B == Complex(0) ? Complex(0) : -C / B;
  }
  Complex disc = std::sqrt(B * B - Scalar(4) * A * C);
  if (std::real(std::conj(B) * disc) < 0) disc = -disc;
  const Complex q = -(B + disc) / Scalar(2);
  if (q == Complex(0)) return Complex(0);
  const Complex big = q / A;
  const Complex small = C / q;
  return std::abs(small) <= std::abs(big) ? small : big;
}

template <typename Scalar>
void require_probabilistic(const SymbolTriple<Scalar>& t) {
  for (const auto* s : {&t.a_minus1, &t.a_0, &t.a_plus1}) {
    if ((s->coefficients().array() < Scalar(0)).any()) {
      throw Error(ErrorKind::InvalidArgument, "symbol triple has negative coefficients");
    }
  }
  if (t.total() > Scalar(1) + Scalar(1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "symbol triple is not substochastic at z = 1");
  }
}

}  // namespace detail

/// Winding number of a(z) around the origin along the unit circle, sampled on
/// `grid` roots of unity; the grid is refined until consecutive phase jumps
/// stay below pi/2.
template <typename Scalar>
int winding_number(const LaurentSeries<Scalar>& a, Index grid = 0, Index max_grid = Index(1) << 22) {
  if (a.is_zero()) throw Error(ErrorKind::NonInvertibleSymbol, "zero symbol");
  Index n = std::max(grid, detail::initial_grid<Scalar>(a.size()));
  for (;;) {
    const auto vals = detail::values_on_roots<Scalar>(a.lowest_index(), a.coefficients(), n);
    Scalar total = 0, worst = 0;
    for (Index j = 0; j < n; ++j) {
      const auto& u = vals[static_cast<std::size_t>(j)];
      const auto& w = vals[static_cast<std::size_t>((j + 1) % n)];
      if (u == std::complex<Scalar>(0) || w == std::complex<Scalar>(0)) {
        throw Error(ErrorKind::NonInvertibleSymbol, "symbol vanishes on the unit circle");
      }
      const Scalar step = std::arg(w / u);
      worst = std::max(worst, std::abs(step));
      total += step;
    }
    if (worst < std::numbers::pi_v<Scalar> / 2) {
      return static_cast<int>(std::lround(total / (2 * std::numbers::pi_v<Scalar>)));
    }
    n *= 2;
    if (n > max_grid) throw Error(ErrorKind::NoConvergence, "winding number grid exceeded");
  }
}

/// Reciprocal 1/a(z) by evaluation on roots of unity and inverse FFT, the
/// grid doubled until the interpolant's outer half carries no mass, followed
/// by one Newton correction b <- b + b (1 - a b).
///
/// On return ||a b - 1||_W <= tol * ||a||_W * ||b||_W.
template <typename Scalar>
LaurentSeries<Scalar> reciprocal(const LaurentSeries<Scalar>& a, SymbolOptions<Scalar> opts = {}) {
  if (a.is_zero()) throw Error(ErrorKind::NonInvertibleSymbol, "zero symbol");
  const Scalar norm_a = wiener_norm(a);
  const Scalar zero_cut = Scalar(100) * std::numeric_limits<Scalar>::epsilon() * norm_a;
  Index n = detail::initial_grid<Scalar>(a.size());
  bool winding_checked = false;
  const LaurentSeries<Scalar> one = LaurentSeries<Scalar>::constant(1);
  for (;;) {
    const auto vals = detail::values_on_roots<Scalar>(a.lowest_index(), a.coefficients(), n);
    std::vector<std::complex<Scalar>> inv(vals.size());
    Scalar inv_max = 0;
    for (std::size_t j = 0; j < vals.size(); ++j) {
      if (std::abs(vals[j]) <= zero_cut) {
        throw Error(ErrorKind::NonInvertibleSymbol, "symbol vanishes on the unit circle");
      }
      inv[j] = Scalar(1) / vals[j];
      inv_max = std::max(inv_max, std::abs(inv[j]));
    }
    if (!winding_checked) {
      if (winding_number(a, n, opts.max_grid) != 0) {
        throw Error(ErrorKind::NonzeroWindingNumber, "symbol has nonzero winding number");
      }
      winding_checked = true;
    }
    Scalar outer = 0;
    LaurentSeries<Scalar> b = detail::inner_half(detail::coefficients_from_roots(inv), outer);
    const Scalar norm_b = wiener_norm(b);
    // The interpolant's outer half cannot fall below FFT round-off.
    const Scalar noise = Scalar(n) * std::numeric_limits<Scalar>::epsilon() * inv_max;
    if (outer <= std::max(opts.tol * norm_b, noise)) {
      const LaurentSeries<Scalar> r = one - detail::multiply_direct(a, b);
      b = (b + multiply(b, r)).trimmed(opts.tol * norm_b / 4);
      const Scalar resid = wiener_norm(one - detail::multiply_direct(a, b));
      if (resid <= opts.tol * norm_a * wiener_norm(b)) return b;
    }
    n *= 2;
    if (n > opts.max_grid) throw Error(ErrorKind::NoConvergence, "reciprocal grid exceeded");
  }
}

/// Solution of minimum modulus g(z) of a_1(z) x^2 + (a_0(z) - 1) x + a_{-1}(z) = 0,
/// computed pointwise on roots of unity and interpolated. The grid doubles
/// until the outer half of the interpolant carries mass <= tol * max(1, g(1))
/// and the pointwise residual on a twice finer grid is <= tol.
template <typename Scalar>
LaurentSeries<Scalar> minimal_quadratic_root(const SymbolTriple<Scalar>& t, SymbolOptions<Scalar> opts = {}) {
  using Complex = std::complex<Scalar>;
  detail::require_probabilistic(t);
  const Scalar linear_cutoff = Scalar(1e-14) * wiener_norm(t.a_plus1);
  auto values = [](const LaurentSeries<Scalar>& s, Index n) {
    return detail::values_on_roots<Scalar>(s.lowest_index(), s.coefficients(), n);
  };
  auto roots_on = [&](Index n) {
    const auto am = values(t.a_minus1, n), a0 = values(t.a_0, n), ap = values(t.a_plus1, n);
    std::vector<Complex> g(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < g.size(); ++j) {
      g[j] = detail::minimal_root<Scalar>(ap[j], a0[j] - Scalar(1), am[j], linear_cutoff);
    }
    return g;
  };

  Index n = detail::initial_grid<Scalar>(t.span());
  for (;;) {
    Scalar outer = 0;
    const std::vector<Complex> gv_coarse = roots_on(n);
    Scalar g_max = 0;
    for (const Complex& x : gv_coarse) g_max = std::max(g_max, std::abs(x));
    LaurentSeries<Scalar> g = detail::inner_half(detail::coefficients_from_roots(gv_coarse), outer);
    const Scalar g1 = g.sum();
    const Scalar noise = Scalar(n) * std::numeric_limits<Scalar>::epsilon() * g_max;
    if (outer <= std::max(opts.tol * std::max(Scalar(1), g1), noise)) {
      const Index fine = 2 * n;
      const auto gv = values(g, fine);
      const auto am = values(t.a_minus1, fine), a0 = values(t.a_0, fine), ap = values(t.a_plus1, fine);
      Scalar resid = 0;
      for (std::size_t j = 0; j < gv.size(); ++j) {
        resid = std::max(resid, std::abs(ap[j] * gv[j] * gv[j] + (a0[j] - Scalar(1)) * gv[j] + am[j]));
      }
      if (resid <= opts.tol) {
        typename LaurentSeries<Scalar>::Vector c = g.coefficients();
        for (Index k = 0; k < c.size(); ++k) {
          if (c(k) < 0 && -c(k) <= opts.tol) c(k) = 0;
        }
        LaurentSeries<Scalar> clipped(g.lowest_index(), std::move(c));
        return clipped.trimmed(default_threshold<Scalar>() * wiener_norm(clipped));
      }
    }
    n *= 2;
    if (n > opts.max_grid) throw Error(ErrorKind::NoConvergence, "minimal root grid exceeded");
  }
}

/// psi(z) = a_1(z) / (1 - a_0(z) - a_1(z) g(z)).
template <typename Scalar>
LaurentSeries<Scalar> psi_symbol(const SymbolTriple<Scalar>& t, const LaurentSeries<Scalar>& g,
                                 SymbolOptions<Scalar> opts = {}) {
  if (!(t.up() + t.down() > Scalar(0))) {
    throw Error(ErrorKind::InvalidArgument, "psi requires a_1(1) + a_{-1}(1) > 0");
  }
  if (t.a_plus1.is_zero()) return {};
  const auto den = LaurentSeries<Scalar>::constant(1) - t.a_0 - multiply(t.a_plus1, g);
  auto psi = multiply(t.a_plus1, reciprocal(den, opts));
  typename LaurentSeries<Scalar>::Vector c = psi.coefficients();
  const Scalar cut = opts.tol * wiener_norm(psi);
  for (Index k = 0; k < c.size(); ++k) {
    if (c(k) < 0 && -c(k) <= cut) c(k) = 0;
  }
  LaurentSeries<Scalar> clipped(psi.lowest_index(), std::move(c));
  return clipped.trimmed(opts.tol * wiener_norm(clipped));
}

}  // namespace eqt
