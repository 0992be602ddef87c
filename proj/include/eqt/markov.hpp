#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "eqt/eqt_matrix.hpp"
#include "eqt/solver.hpp"

namespace eqt::markov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Random walk on the nonnegative integers with jumps a_j, |j| <= m,
/// sum a_j = gamma, and reset to state 0 with the remaining mass.
struct WalkSpec1D {
  int m = 1;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  Laurent a;
};

/// a_j = theta sigma_j / max(1, |j|)^4 with sigma_j uniform on [1, 2] from a
/// seeded mt19937_64, theta normalizing the total mass to gamma.
WalkSpec1D make_walk(int m, double gamma, std::uint64_t seed);

/// Walk with explicitly given jump probabilities.
WalkSpec1D walk_from_symbol(const Laurent& a);

struct ResetWalk {
  Eqt P;  ///< T + e v^T
  Qt T;
  Vector v;
};

/// First column b_{-i} = 1 - sum_{j > -i} a_j; the decomposition puts
/// (1 - gamma) e_1 in v and the remainder of column 1 into T's correction.
ResetWalk build_reset_walk(const WalkSpec1D& spec);

/// pi^T (I - T) = v^T, normalized.
Vector steady_state_linear(const Qt& T, const Vector& v, double tol = 1e-12);

/// P <- P^2 until the Toeplitz and correction parts vanish; returns v.
Vector steady_state_squaring(const Eqt& P, double tol = 1e-14, int max_squarings = 60);

/// Matrix-geometric solution on levels of m states, pi_{k+1} = pi_k R.
Vector reblocked_mam(const WalkSpec1D& spec, double tol = 1e-14);

/// ||pi^T - pi^T P||_1 with pi finitely supported.
double stationary_residual(const Eqt& P, const Vector& pi);

/// l1 distance between finitely supported vectors.
double l1_distance(const Vector& x, const Vector& y);

/// Minimal nonnegative solution of X = down + local X + up X^2 for finite
/// blocks by cyclic reduction.
Matrix finite_qbd_cr(const Matrix& down, const Matrix& local, const Matrix& up, double tol = 1e-15,
                     int max_steps = 64);

/// Truncation baseline: solve the k x k truncated equation, keep the
/// leading k/2 block, read v off its last row after removing T(g).
Eqt truncation_heuristic_G(const QbdBlocks<double>& blocks, Index k, double tol = 1e-14);

struct TandemParams {
  double lambda1 = 2, lambda2 = 1, mu1 = 3, mu2 = 2, p = 0.3, q = 0.2, gamma = 0.95;
  double theta() const { return 1 - gamma + gamma * mu1 + mu2 + lambda1 + lambda2; }
};

struct TandemModel {
  QbdBlocks<double> blocks;
  Eqt B0, B1;
};

TandemModel build_tandem(const TandemParams& params);

/// The two published quasi-birth-death examples (which = 1 or 2).
QbdBlocks<double> build_qbd_example(int which);

/// Down moves only from the first phase; G = e e_1^T exactly.
QbdBlocks<double> build_zsh(double a, double b, double lambda);

}  // namespace eqt::markov
