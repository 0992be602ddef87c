#include <cmath>
#include <limits>

#include "eqt/markov.hpp"

namespace eqt::markov {

namespace {

double inf_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff(); }

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& m) {
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc > std::numeric_limits<double>::epsilon())) {
    throw Error(ErrorKind::SingularPivot, "singular pivot block in cyclic reduction");
  }
  return lu;
}

double max_abs_residual(const Matrix& down, const Matrix& local, const Matrix& up, const Matrix& G) {
  const Matrix R = down + local * G + up * (G * G) - G;
  return R.cwiseAbs().maxCoeff();
}

}  // namespace

Matrix finite_qbd_cr(const Matrix& down, const Matrix& local, const Matrix& up, double tol, int max_steps) {
  const Index k = local.rows();
  if (down.rows() != k || down.cols() != k || up.rows() != k || up.cols() != k || local.cols() != k) {
    throw Error(ErrorKind::InvalidArgument, "blocks must be square and of equal size");
  }
  const Matrix I = Matrix::Identity(k, k);
  Matrix am1 = down, a0 = local, a1 = up, ahat = local;
  double prev_upd = std::numeric_limits<double>::infinity();
  for (int step = 0; step < max_steps; ++step) {
    const auto lu = checked_lu(I - a0);
    const Matrix k_down = lu.solve(am1);
    const Matrix k_up = lu.solve(a1);
    const Matrix up_k_down = a1 * k_down;
    ahat += up_k_down;
    a0 += am1 * k_up + up_k_down;
    am1 = am1 * k_down;
    a1 = a1 * k_up;
    const double upd = inf_norm(up_k_down);
    if (upd <= tol || inf_norm(am1) <= tol || inf_norm(a1) <= tol) return checked_lu(I - ahat).solve(down);
    // Near-critical blocks converge linearly; accept once G solves the equation.
    if (upd <= std::sqrt(tol) && upd > prev_upd / 4) {
      Matrix G = checked_lu(I - ahat).solve(down);
      if (max_abs_residual(down, local, up, G) <= std::max(tol, 8 * std::numeric_limits<double>::epsilon())) return G;
    }
    prev_upd = upd;
  }
  throw Error(ErrorKind::NoConvergence, "cyclic reduction did not converge");
}

Eqt truncation_heuristic_G(const QbdBlocks<double>& blocks, Index k, double tol) {
  if (k < 2 || k % 2 != 0) throw Error(ErrorKind::InvalidArgument, "truncation size must be even and positive");
  const Matrix Gk = finite_qbd_cr(eqt_window(blocks.down, k, k), eqt_window(blocks.local, k, k),
                                  eqt_window(blocks.up, k, k));
  const Index h = k / 2;
  SymbolOptions<double> opts;
  opts.tol = tol;
  const Laurent g = minimal_quadratic_root(blocks.symbols(), opts);
  const Matrix D = Gk.topLeftCorner(h, h) - qt_window(Qt(g), h, h);
  const Vector v = D.row(h - 1).transpose();
  const Matrix C = D.rowwise() - v.transpose();
  const Correction<double> E = Correction<double>::from_dense(C);
  const double scale = std::max(1.0, wiener_norm(g) + v.cwiseAbs().sum());
  return Eqt(Qt(g, E.compressed(tol * scale)), detail::trim_l1<double>(v, tol * scale));
}

}  // namespace eqt::markov
