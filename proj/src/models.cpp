#include <cmath>
#include <random>

#include "eqt/markov.hpp"

namespace eqt::markov {

WalkSpec1D make_walk(int m, double gamma, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorKind::InvalidSpec, "maximum skip length must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidSpec, "gamma must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sigma(1.0, 2.0);
  Vector w(2 * m + 1);
  for (int j = -m; j <= m; ++j) {
    const double d = j == 0 ? 1.0 : std::pow(double(std::abs(j)), 4);
    w(j + m) = sigma(rng) / d;
  }
  const double theta = gamma / w.sum();
  WalkSpec1D spec;
  spec.m = m;
  spec.gamma = gamma;
  spec.seed = seed;
  spec.a = Laurent(-m, Vector(theta * w));
  return spec;
}

WalkSpec1D walk_from_symbol(const Laurent& a) {
  if (a.is_zero()) throw Error(ErrorKind::InvalidSpec, "empty jump distribution");
  if (a.coefficients().minCoeff() < 0.0) throw Error(ErrorKind::InvalidSpec, "negative jump probability");
  const double gamma = a.sum();
  if (gamma > 1.0 + 1e-14) throw Error(ErrorKind::InvalidSpec, "jump probabilities exceed 1");
  WalkSpec1D spec;
  spec.m = int(std::max<Index>({Index(1), a.n_minus(), a.n_plus()}));
  spec.gamma = gamma;
  spec.a = a;
  return spec;
}

ResetWalk build_reset_walk(const WalkSpec1D& spec) {
  const Laurent& a = spec.a;
  if (a.is_zero() || a.coefficients().minCoeff() < 0.0) throw Error(ErrorKind::InvalidSpec, "invalid jump distribution");
  const double gamma = a.sum();
  if (gamma > 1.0 + 1e-14) throw Error(ErrorKind::InvalidSpec, "boundary probabilities would be negative");
  // Column 1 of T is sum_{j <= -i} a_j; the Toeplitz part supplies a_{-i}.
  Correction<double> E;
  if (a.n_minus() > 0) {
    const Vector tails = hankel_tail_sums(a, Side::minus, a.n_minus());
    Index n = tails.size();
    while (n > 0 && tails(n - 1) == 0.0) --n;
    if (n > 0) E = Correction<double>::outer(tails.head(n), Vector::Unit(1, 0));
  }
  ResetWalk w;
  w.T = Qt(a, E);
  const double reset = 1.0 - gamma;
  if (reset > 0.0) w.v = Vector::Constant(1, reset);
  w.P = Eqt(w.T, w.v);
  return w;
}

TandemModel build_tandem(const TandemParams& p) {
  if (!(p.lambda1 > 0 && p.lambda2 > 0 && p.mu1 > 0 && p.mu2 > 0)) {
    throw Error(ErrorKind::InvalidSpec, "rates must be positive");
  }
  if (!(p.p >= 0 && p.p <= 1 && p.q >= 0 && p.q <= 1 && p.gamma > 0 && p.gamma <= 1)) {
    throw Error(ErrorKind::InvalidSpec, "probabilities out of range");
  }
  const double t = p.theta();
  const double down = (1 - p.q) * p.mu2 / t, diag = p.q * p.mu2 / t;
  TandemModel m;
  m.blocks.down = Eqt(qtoep<double>({down, diag}, Laurent(-1, {0.0, down, diag})));
  const Qt local = qtoep<double>({p.gamma * p.mu1 / t, p.lambda1 / t},
                                 Laurent(-1, {p.gamma * (1 - p.p) * p.mu1 / t, 0.0, p.lambda1 / t}));
  const double reset = (1 - p.gamma) / t;
  m.blocks.local = reset > 0 ? Eqt(local, reset) : Eqt(local);
  m.blocks.up = Eqt(qtoep<double>({p.lambda2 / t, 0.0}, Laurent(-1, {p.gamma * p.p * p.mu1 / t, p.lambda2 / t, 0.0})));
  m.B0 = eqt_add(m.blocks.local, Eqt(Qt(Laurent::constant(p.mu2 / t))));
  m.B1 = m.blocks.up;
  return m;
}

QbdBlocks<double> build_qbd_example(int which) {
  auto block = [](double scale, double b0, double b1, double am, double a0, double ap) {
    return Eqt(qtoep<double>({b0 / scale, b1 / scale}, Laurent(-1, {am / scale, a0 / scale, ap / scale})));
  };
  if (which == 1) {
    return {block(9, 3, 3, 2, 0, 1), block(9, 1, 1, 1, 0, 1), block(9, 0, 1, 2, 1, 1)};
  }
  if (which == 2) {
    return {block(16, 5, 5, 2, 0, 1), block(16, 2, 2, 7, 0, 2), block(16, 1, 1, 2, 1, 1)};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown example " + std::to_string(which));
}

QbdBlocks<double> build_zsh(double a, double b, double lambda) {
  if (!(a >= 0 && b > 0 && lambda >= 0)) throw Error(ErrorKind::InvalidSpec, "rates must be nonnegative, b positive");
  const double theta = 1.0 / (a + b + lambda);
  QbdBlocks<double> blocks;
  blocks.down = Eqt(Qt(Laurent(), Correction<double>::outer(Vector::Unit(1, 0), Vector::Constant(1, b * theta))));
  blocks.local = Eqt(Qt(Laurent(-1, {b * theta, 0.0, a * theta})));
  blocks.up = Eqt(Qt(Laurent::constant(lambda * theta)));
  return blocks;
}

}  // namespace eqt::markov
