#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eqt/eqt_matrix.hpp"
#include "eqt/symbol.hpp"

namespace eqt {

enum class SolverVariant { natural, u_based, shifted_inverse };
enum class SolverStatus { converged, max_iter_exceeded };
enum class Classification { qt_decay, eqt_rank_one, boundary };

constexpr std::string_view to_string(SolverVariant v) {
  switch (v) {
    case SolverVariant::natural: return "natural";
    case SolverVariant::u_based: return "u_based";
    case SolverVariant::shifted_inverse: return "shifted_inverse";
  }
  return "unknown";
}

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::qt_decay: return "QT_decay";
    case Classification::eqt_rank_one: return "EQT_rank_one";
    case Classification::boundary: return "boundary";
  }
  return "unknown";
}

template <typename Scalar>
struct SolverOptions {
  Scalar tol = Scalar(1e-12);
  int max_iter = 10000;
  Scalar compress_threshold = default_threshold<Scalar>();
  SolverVariant variant = SolverVariant::u_based;
};

/// Coefficients of X = down + local X + up X^2.
template <typename Scalar>
struct QbdBlocks {
  EqtMatrix<Scalar> down, local, up;

  SymbolTriple<Scalar> symbols() const { return {down.symbol(), local.symbol(), up.symbol()}; }
};

/// Support measurements of a solution G = T(g) + E + e v^T.
struct SupportFeatures {
  Index n_minus = 0, n_plus = 0;  // symbol
  Index rows = 0, cols = 0;       // correction
  Index rank = 0;
  Index v_support = 0;
};

template <typename Scalar>
struct ClassificationResult {
  Classification kind = Classification::boundary;
  Scalar v_mass = 0;
  /// v-mass agrees with the structure of the class (1 - g(1) for rank one).
  bool consistent = true;
};

template <typename Scalar>
struct SolverReport {
  int iterations = 0;
  std::vector<Scalar> residual_history;
  std::vector<double> wall_seconds;
  SolverStatus status = SolverStatus::converged;
  Classification classification = Classification::boundary;
  Scalar g_value_at_1 = 0;
  SupportFeatures supports;
  Scalar final_residual() const {
    return residual_history.empty() ? std::numeric_limits<Scalar>::quiet_NaN() : residual_history.back();
  }
};

template <typename Scalar>
struct SolveResult {
  EqtMatrix<Scalar> G;
  SolverReport<Scalar> report;
};

/// ||down + local X + up X^2 - X||_inf in EQT arithmetic.
template <typename Scalar>
Scalar residual(const QbdBlocks<Scalar>& A, const EqtMatrix<Scalar>& X) {
  const EqtMatrix<Scalar> local_x = eqt_mul(A.local, X);
  const EqtMatrix<Scalar> up_xx = eqt_mul(eqt_mul(A.up, X), X);
  return eqt_inf_norm(eqt_sub(eqt_add(eqt_add(A.down, local_x), up_xx), X));
}

/// Supports measured at relative level eps: trailing symbol coefficients,
/// correction rows / columns and v entries below eps times the respective
/// norm do not count; the rank counts singular values above
/// max(m, n) * eps * sigma_max.
template <typename Scalar>
SupportFeatures measure_supports(const EqtMatrix<Scalar>& G, Scalar eps = std::ldexp(Scalar(1), -53)) {
  SupportFeatures f;
  const auto& g = G.symbol();
  const Scalar gn = wiener_norm(g);
  for (Index k = g.lowest_index(); k < 0 && !g.is_zero(); ++k) {
    if (std::abs(g[k]) > eps * gn) { f.n_minus = -k; break; }
  }
  for (Index k = g.highest_index(); k > 0 && !g.is_zero(); --k) {
    if (std::abs(g[k]) > eps * gn) { f.n_plus = k; break; }
  }
  const auto& E = G.correction();
  if (!E.is_zero()) {
    const Scalar en = E.norm_bound();
    const L1Vector<Scalar> col_mass = E.right().cwiseAbs().colwise().sum().transpose();
    const L1Vector<Scalar> row_mass = E.left().cwiseAbs().colwise().sum().transpose();
    for (Index i = E.rows() - 1; i >= 0; --i) {
      if ((E.left().row(i).cwiseAbs() * col_mass)(0) > eps * en) { f.rows = i + 1; break; }
    }
    for (Index j = E.cols() - 1; j >= 0; --j) {
      if ((E.right().row(j).cwiseAbs() * row_mass)(0) > eps * en) { f.cols = j + 1; break; }
    }
    // Singular values of left * right^T through the two triangular factors.
    Eigen::HouseholderQR<typename Correction<Scalar>::Matrix> ql(E.left()), qr(E.right());
    const Index kl = std::min(E.left().rows(), E.rank()), kr = std::min(E.right().rows(), E.rank());
    const typename Correction<Scalar>::Matrix rl = ql.matrixQR().topRows(kl).template triangularView<Eigen::Upper>();
    const typename Correction<Scalar>::Matrix rr = qr.matrixQR().topRows(kr).template triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<typename Correction<Scalar>::Matrix> svd(rl * rr.transpose());
    const auto& s = svd.singularValues();
    const Scalar cut = Scalar(std::max(f.rows, f.cols)) * eps * (s.size() > 0 ? s(0) : Scalar(0));
    for (Index l = 0; l < s.size(); ++l) f.rank += s(l) > cut ? 1 : 0;
  }
  const auto& v = G.v();
  const Scalar vn = v.cwiseAbs().sum();
  for (Index j = v.size() - 1; j >= 0; --j) {
    if (std::abs(v(j)) > eps * vn) { f.v_support = j + 1; break; }
  }
  return f;
}

/// Decides the class of G from the sign of a_{-1}(1) - a_1(1).
template <typename Scalar>
ClassificationResult<Scalar> classify_solution(const SymbolTriple<Scalar>& t, const EqtMatrix<Scalar>& G,
                                               Scalar tol = Scalar(1e-12)) {
  ClassificationResult<Scalar> out;
  out.v_mass = G.v().cwiseAbs().sum();
  const Scalar drift = t.a_minus1.sum() - t.a_plus1.sum();
  if (drift > tol) {
    out.kind = Classification::qt_decay;
  } else if (drift < -tol) {
    out.kind = Classification::eqt_rank_one;
    out.consistent = out.v_mass >= Scalar(1) - G.symbol().sum() - Scalar(10) * tol;
  }
  return out;
}

/// X0 = T(g) + (I - T(g)) e e_1^T, stored as v = (1 - g(1)) e_1 and the
/// first correction column H(g^-) e.
template <typename Scalar>
EqtMatrix<Scalar> eqt_initial_guess(const SymbolTriple<Scalar>& t, Scalar tol = default_threshold<Scalar>()) {
  SymbolOptions<Scalar> opts;
  opts.tol = tol;
  const LaurentSeries<Scalar> g = minimal_quadratic_root(t, opts);
  Correction<Scalar> E;
  if (g.n_minus() > 0) {
    E = Correction<Scalar>::outer(hankel_tail_sums(g, Side::minus, g.n_minus()), L1Vector<Scalar>::Unit(1, 0));
  }
  const Scalar v1 = Scalar(1) - g.sum();
  L1Vector<Scalar> v;
  if (std::abs(v1) > tol) v = L1Vector<Scalar>::Constant(1, v1);
  return EqtMatrix<Scalar>(QtMatrix<Scalar>(g, E), v);
}

/// pi with pi^T G = pi^T and sum(pi) = 1, from pi^T (I - T(g) - E) = v^T.
template <typename Scalar>
L1Vector<Scalar> stationary_of_G(const EqtMatrix<Scalar>& G, Scalar tol = Scalar(1e-10)) {
  const AffineOnesVector<Scalar> ones = eqt_apply_ones(G);
  Scalar defect = std::abs(ones.alpha - Scalar(1));
  for (Index i = 0; i < ones.w.size(); ++i) defect = std::max(defect, std::abs(ones[i] - Scalar(1)));
  if (defect > tol) throw Error(ErrorKind::NotStochastic, "G e differs from e by " + std::to_string(double(defect)));
  const Scalar vmass = G.v().cwiseAbs().sum();
  if (vmass <= tol) {
    throw Error(ErrorKind::DegenerateStationary, "G has no rank-one part; the invariant vector is not unique");
  }
  const QtMatrix<Scalar> M = qt_sub(QtMatrix<Scalar>::identity(), G.qt());
  LeftSolve<Scalar> sol;
  try {
    sol = eqt_left_solve(M, G.v(), tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonInvertibleSymbol || e.kind() == ErrorKind::SingularWindow) {
      throw Error(ErrorKind::DegenerateStationary, e.what());
    }
    throw;
  }
  const Scalar s = sol.x.sum();
  if (!(std::abs(s) > tol)) throw Error(ErrorKind::DegenerateStationary, "invariant vector has zero mass");
  return sol.x / s;
}

namespace detail {

template <typename Scalar>
struct IterationLog {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  SolverReport<Scalar> report;
  EqtMatrix<Scalar> best;
  Scalar best_residual = std::numeric_limits<Scalar>::infinity();

  /// Records the residual of X; true when it meets the tolerance.
  bool record(const EqtMatrix<Scalar>& X, Scalar r, Scalar tol) {
    report.residual_history.push_back(r);
    report.wall_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (r < best_residual || !std::isfinite(best_residual)) {
      best_residual = r;
      best = X;
    }
    return r <= tol;
  }

  SolveResult<Scalar> finish(const QbdBlocks<Scalar>& A, bool converged, Scalar tol) {
    report.status = converged ? SolverStatus::converged : SolverStatus::max_iter_exceeded;
    const auto cls = classify_solution(A.symbols(), best, tol);
    report.classification = cls.kind;
    report.g_value_at_1 = best.symbol().sum();
    report.supports = measure_supports(best);
    return {best, report};
  }
};

}  // namespace detail

/// G_{k+1} = down + local G_k + up G_k^2 from X0 (zero by default). The
/// residual of each compressed iterate is the norm of its update.
template <typename Scalar>
SolveResult<Scalar> natural_iteration(const QbdBlocks<Scalar>& A, const SolverOptions<Scalar>& opts,
                                      EqtMatrix<Scalar> X = {}) {
  detail::IterationLog<Scalar> log;
  const Scalar thr = opts.compress_threshold;
  for (int k = 0; k < opts.max_iter; ++k) {
    const EqtMatrix<Scalar> FX = eqt_add(eqt_add(A.down, eqt_mul(A.local, X, thr), thr),
                                         eqt_mul(eqt_mul(A.up, X, thr), X, thr), thr);
    log.report.iterations = k;
    if (log.record(X, eqt_inf_norm(eqt_sub(FX, X, thr)), opts.tol)) return log.finish(A, true, opts.tol);
    X = eqt_compress(FX, thr);
  }
  log.report.iterations = opts.max_iter;
  return log.finish(A, false, opts.tol);
}

/// X_{k+1} = (I - local)^{-1} (down + up X_k^2), the inverse formed once.
template <typename Scalar>
SolveResult<Scalar> u_based_iteration(const QbdBlocks<Scalar>& A, EqtMatrix<Scalar> X,
                                      const SolverOptions<Scalar>& opts) {
  detail::IterationLog<Scalar> log;
  const Scalar thr = opts.compress_threshold;
  const EqtMatrix<Scalar> U = eqt_inverse(eqt_sub(EqtMatrix<Scalar>::identity(), A.local, thr), thr);
  for (int k = 0; k < opts.max_iter; ++k) {
    const EqtMatrix<Scalar> Y = eqt_add(A.down, eqt_mul(eqt_mul(A.up, X, thr), X, thr), thr);
    const EqtMatrix<Scalar> FX = eqt_add(Y, eqt_mul(A.local, X, thr), thr);
    log.report.iterations = k;
    if (log.record(X, eqt_inf_norm(eqt_sub(FX, X, thr)), opts.tol)) return log.finish(A, true, opts.tol);
    X = eqt_compress(eqt_mul(U, Y, thr), thr);
  }
  log.report.iterations = opts.max_iter;
  return log.finish(A, false, opts.tol);
}

/// X_{k+1} = (I - local - up X_k)^{-1} down.
template <typename Scalar>
SolveResult<Scalar> shifted_inverse_iteration(const QbdBlocks<Scalar>& A, EqtMatrix<Scalar> X,
                                              const SolverOptions<Scalar>& opts) {
  detail::IterationLog<Scalar> log;
  const Scalar thr = opts.compress_threshold;
  const EqtMatrix<Scalar> I_minus_local = eqt_sub(EqtMatrix<Scalar>::identity(), A.local, thr);
  for (int k = 0; k < opts.max_iter; ++k) {
    const EqtMatrix<Scalar> UX = eqt_mul(A.up, X, thr);
    const EqtMatrix<Scalar> FX =
        eqt_add(eqt_add(A.down, eqt_mul(A.local, X, thr), thr), eqt_mul(UX, X, thr), thr);
    log.report.iterations = k;
    if (log.record(X, eqt_inf_norm(eqt_sub(FX, X, thr)), opts.tol)) return log.finish(A, true, opts.tol);
    X = eqt_compress(eqt_mul(eqt_inverse(eqt_sub(I_minus_local, UX, thr), thr), A.down, thr), thr);
  }
  log.report.iterations = opts.max_iter;
  return log.finish(A, false, opts.tol);
}

/// Dispatches on opts.variant; the natural iteration ignores X0 = {} and
/// starts from zero.
template <typename Scalar>
SolveResult<Scalar> solve(const QbdBlocks<Scalar>& A, const EqtMatrix<Scalar>& X0, const SolverOptions<Scalar>& opts) {
  switch (opts.variant) {
    case SolverVariant::natural: return natural_iteration(A, opts, X0);
    case SolverVariant::u_based: return u_based_iteration(A, X0, opts);
    case SolverVariant::shifted_inverse: return shifted_inverse_iteration(A, X0, opts);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown solver variant");
}

}  // namespace eqt
