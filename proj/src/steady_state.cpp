#include <cmath>

#include "eqt/markov.hpp"

namespace eqt::markov {

double l1_distance(const Vector& x, const Vector& y) {
  return detail::padded_sum<double>(x, -1.0, y).cwiseAbs().sum();
}

double stationary_residual(const Eqt& P, const Vector& pi) {
  Vector pit_p = transpose_apply(P.qt(), pi);
  pit_p = detail::padded_sum<double>(pit_p, pi.sum(), P.v());
  return l1_distance(pi, pit_p);
}

Vector steady_state_linear(const Qt& T, const Vector& v, double tol) {
  if (v.size() == 0 || v.cwiseAbs().sum() == 0.0) {
    throw Error(ErrorKind::InvalidSpec, "no reset mass: the linear system has no l1 solution");
  }
  const auto sol = eqt_left_solve(qt_sub(Qt::identity(), T), v, tol);
  return sol.x / sol.x.sum();
}

Vector steady_state_squaring(const Eqt& P, double tol, int max_squarings) {
  Eqt Pk = P;
  for (int s = 0; s <= max_squarings; ++s) {
    const double rest = wiener_norm(Pk.symbol()) + Pk.correction().norm_bound();
    if (rest <= tol) {
      if (Pk.v().size() == 0) throw Error(ErrorKind::DegenerateStationary, "squarings vanished entirely");
      return Pk.v() / Pk.v().sum();
    }
    if (s == max_squarings) break;
    Pk = eqt_mul(Pk, Pk);
  }
  throw Error(ErrorKind::MaxSquaringsExceeded, "Toeplitz part did not vanish after " + std::to_string(max_squarings) +
                                                   " squarings");
}

Vector reblocked_mam(const WalkSpec1D& spec, double tol) {
  const Laurent& a = spec.a;
  const Index m = spec.m;
  if (a.n_minus() > m || a.n_plus() > m) throw Error(ErrorKind::InvalidSpec, "jumps exceed the block size");
  const double reset = 1.0 - a.sum();
  Matrix Vd(m, m), V0(m, m), Vu(m, m);
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < m; ++c) {
      Vd(r, c) = a[c - r - m];
      V0(r, c) = a[c - r];
      Vu(r, c) = a[c - r + m];
    }
  // R solves X = V_1 + X V_0 + X^2 V_{-1}; its transpose is a G-type solution.
  const Matrix R = finite_qbd_cr(Vu.transpose(), V0.transpose(), Vd.transpose()).transpose();
  const Matrix I = Matrix::Identity(m, m);
  Eigen::PartialPivLU<Matrix> lu_r(I - R);
  const Matrix N = lu_r.inverse();
  const double n_norm = N.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(lu_r.rcond() > 1e-13) || !(n_norm < 1e12)) {
    throw Error(ErrorKind::SpectralRadiusOne, "spectral radius of R is numerically 1");
  }

  const ResetWalk walk = build_reset_walk(spec);
  const Matrix B0 = eqt_window(walk.P, m, m);
  Matrix B1 = Vd;
  B1.col(0).array() += reset;
  Matrix K = B0 + R * B1;
  if (reset > 0) K.col(0) += reset * (R * R * N).rowwise().sum();
  // pi_0 (I - K) = 0 with pi_0 N e = 1 replacing the first equation.
  Matrix M = I - K;
  M.col(0) = N.rowwise().sum();
  const Vector pi0 = M.transpose().partialPivLu().solve(Vector::Unit(m, 0));

  std::vector<Vector> levels{pi0};
  const std::size_t max_levels = std::max<std::size_t>(1000, std::size_t(1 << 24) / std::size_t(m));
  Vector cur = pi0;
  while (cur.cwiseAbs().sum() > tol) {
    if (levels.size() >= max_levels) {
      throw Error(ErrorKind::SpectralRadiusOne, "level masses do not decay");
    }
    cur = (cur.transpose() * R).transpose();
    levels.push_back(cur);
  }
  Vector pi(Index(levels.size()) * m);
  for (std::size_t l = 0; l < levels.size(); ++l) pi.segment(Index(l) * m, m) = levels[l];
  Index n = pi.size();
  while (n > 1 && pi(n - 1) == 0.0) --n;
  return pi.head(n) / pi.head(n).sum();
}

}  // namespace eqt::markov
