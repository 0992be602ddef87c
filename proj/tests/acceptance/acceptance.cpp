// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail N]...
//
// Exits nonzero when a criterion fails that was not named by --expect-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "eqt/eqt.hpp"
#include "eqt/markov.hpp"
#include "support/oracles.hpp"

using eqt::Eqt;
using eqt::Laurent;
using eqt::Qt;
using oracle::Index;
using oracle::Matrix;
using oracle::Vector;
using Blocks = eqt::QbdBlocks<double>;
namespace mk = eqt::markov;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Laurent tridiagonal(const Vector& w, Index offset) { return Laurent(-1, Vector(w.segment(offset, 3))); }

// ---------------------------------------------------------------------------

Outcome dichotomy() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Outcome out;
  int bad = 0, failed = 0;
  double worst = 0, nearest_failure = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    Vector w(9);
    for (Index k = 0; k < 9; ++k) w(k) = u(rng);
    w /= w.sum();
    const eqt::Triple t{tridiagonal(w, 0), tridiagonal(w, 3), tridiagonal(w, 6)};
    const double down = t.down(), up = t.up();
    const double expected = down >= up ? 1.0 : down / up;
    try {
      const double err = std::abs(eqt::minimal_quadratic_root(t).sum() - expected);
      worst = std::max(worst, err);
      if (err > 1e-10) {
        ++bad;
        nearest_failure = std::min(nearest_failure, std::abs(down - up));
      }
    } catch (const eqt::Error&) {
      ++failed;
      nearest_failure = std::min(nearest_failure, std::abs(down - up));
    }
  }
  out.pass = bad == 0 && failed == 0;
  out.detail = "max error " + fmt("%.2e", worst) + ", " + std::to_string(bad) + " above 1e-10, " +
               std::to_string(failed) + " not converged";
  if (!out.pass) out.detail += ", failures within |a_-1(1) - a_1(1)| <= " + fmt("%.2e", nearest_failure);
  return out;
}

Outcome exact_fixed_point() {
  const auto A = mk::build_zsh(1, 2, 1);
  const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), eqt::SolverOptions<double>{});
  const double err = eqt::eqt_inf_norm(eqt::eqt_sub(r.G, Eqt(Qt(), 1.0)));
  const double res = eqt::residual(A, r.G);
  return {err <= 1e-9 && res <= 1e-10, "||G - e e1^T|| " + fmt("%.2e", err) + ", residual " + fmt("%.2e", res)};
}

Outcome algebra() {
  oracle::Random rnd(77);
  const Index n = 200, w = 40;
  auto block = [&](const Matrix& m) { return Matrix(m.topLeftCorner(w, w)); };
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eqt A = rnd.eqt(3, 10, 10), B = rnd.eqt(3, 10, 10);
    const Eqt C = rnd.near_identity(3, 10, 10, 0.4), D = rnd.near_identity(3, 10, 10, 0.4);
    const Matrix a = oracle::dense(A, n, n), b = oracle::dense(B, n, n), c = oracle::dense(C, n, n),
                 d = oracle::dense(D, n, n);
    const Matrix ci = c.inverse(), di = d.inverse();
    const std::vector<std::pair<Eqt, Matrix>> cases = {
        {eqt::eqt_mul(A, B), a * b},
        {eqt::eqt_add(A, B), a + b},
        {eqt::eqt_mul(eqt::eqt_inverse(C), A), ci * a},
        {eqt::eqt_mul(eqt::eqt_add(eqt::eqt_mul(A, B), C), eqt::eqt_inverse(D)), (a * b + c) * di},
        {eqt::eqt_sub(eqt::eqt_mul(eqt::eqt_mul(A, B), A), eqt::eqt_mul(A, eqt::eqt_mul(B, A))),
         Matrix::Zero(n, n)},
    };
    for (const auto& [x, ref] : cases) worst = std::max(worst, oracle::max_abs(eqt::eqt_window(x, w, w) - block(ref)));
  }
  return {worst <= 1e-11, "max window error " + fmt("%.2e", worst)};
}

Outcome reset_walk() {
  Outcome out;
  double worst_dist = 0, worst_res = 0;
  out.notes.push_back("m,gamma,linear_s,squaring_s,mam_s");
  for (int m : {4, 64, 256}) {
    for (double gamma : {0.9, 0.99}) {
      const auto spec = mk::make_walk(m, gamma, 1);
      const auto walk = mk::build_reset_walk(spec);
      auto t0 = std::chrono::steady_clock::now();
      const Vector x = mk::steady_state_linear(walk.T, walk.v);
      const double t_linear = seconds_since(t0);
      t0 = std::chrono::steady_clock::now();
      const Vector y = mk::steady_state_squaring(walk.P);
      const double t_squaring = seconds_since(t0);
      t0 = std::chrono::steady_clock::now();
      const Vector z = mk::reblocked_mam(spec);
      const double t_mam = seconds_since(t0);
      worst_dist = std::max({worst_dist, mk::l1_distance(x, y), mk::l1_distance(x, z), mk::l1_distance(y, z)});
      for (const Vector* p : {&x, &y, &z}) worst_res = std::max(worst_res, mk::stationary_residual(walk.P, *p));
      out.notes.push_back(std::to_string(m) + "," + fmt("%g", gamma) + "," + fmt("%.4f", t_linear) + "," +
                          fmt("%.4f", t_squaring) + "," + fmt("%.4f", t_mam));
    }
  }
  out.pass = worst_dist <= 1e-8 && worst_res <= 1e-10;
  out.detail = "max pairwise l1 " + fmt("%.2e", worst_dist) + ", max residual " + fmt("%.2e", worst_res);
  return out;
}

Outcome tandem() {
  const auto model = mk::build_tandem({});
  eqt::SolverOptions<double> opts;
  opts.tol = 1e-12;
  const auto r = eqt::shifted_inverse_iteration(model.blocks, eqt::eqt_initial_guess(model.blocks.symbols()), opts);
  const double res = eqt::residual(model.blocks, r.G);
  const Index k = 2048, w = 256;
  const Matrix G = mk::finite_qbd_cr(eqt::eqt_window(model.blocks.down, k, k),
                                     eqt::eqt_window(model.blocks.local, k, k), eqt::eqt_window(model.blocks.up, k, k));
  const double diff = oracle::max_abs(eqt::eqt_window(r.G, w, w) - G.topLeftCorner(w, w));
  return {res <= 1e-10 && diff <= 1e-8, "residual " + fmt("%.2e", res) + ", window vs CR " + fmt("%.2e", diff) +
                                            ", " + std::to_string(r.report.iterations) + " iterations"};
}

Outcome qbd_examples() {
  Outcome out;
  const std::vector<std::vector<double>> table = {{617, 46, 859, 52, 9, 29}, {1991, 27, 2874, 31, 12, 52}};
  double worst_ratio = 1, worst_res = 0;
  for (int which : {1, 2}) {
    const auto A = mk::build_qbd_example(which);
    eqt::SolverOptions<double> opts;
    opts.tol = 1e-12;
    const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), opts);
    worst_res = std::max(worst_res, eqt::residual(A, r.G));
    const auto& f = r.report.supports;
    const std::vector<double> got = {double(f.n_minus), double(f.n_plus), double(f.rows),
                                     double(f.cols),    double(f.rank),   double(f.v_support)};
    std::string row = "qbd" + std::to_string(which) + " supports";
    for (std::size_t j = 0; j < got.size(); ++j) {
      const double ratio = got[j] > 0 ? std::max(got[j] / table[which - 1][j], table[which - 1][j] / got[j]) : INFINITY;
      worst_ratio = std::max(worst_ratio, ratio);
      row += " " + std::to_string(Index(got[j]));
    }
    out.notes.push_back(row);
  }
  out.pass = worst_res <= 1e-11 && worst_ratio <= 2;
  out.detail = "max residual " + fmt("%.2e", worst_res) + ", worst support ratio " + fmt("%.2f", worst_ratio);
  return out;
}

Outcome classification() {
  int wrong = 0;
  for (int which : {1, 2}) {
    const auto A = mk::build_qbd_example(which);
    const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), eqt::SolverOptions<double>{});
    wrong += eqt::classify_solution(A.symbols(), r.G).kind != eqt::Classification::eqt_rank_one;
  }
  {
    const auto A = mk::build_zsh(1, 2, 1);
    const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), eqt::SolverOptions<double>{});
    wrong += eqt::classify_solution(A.symbols(), r.G).kind != eqt::Classification::eqt_rank_one;
  }

  // Tridiagonal interior moves with a reflecting first row.
  oracle::Random rnd(31);
  double worst_v = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix a(3, 3);
    do {
      for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) a(i, j) = rnd.uniform(0.0, 1.0);
      a /= a.sum();
    } while (a.row(0).sum() <= a.row(2).sum() + 0.05);
    auto block = [&](int i) {
      return Eqt(eqt::qtoep<double>({a(i, 0) + a(i, 1), a(i, 2)}, Laurent(-1, {a(i, 0), a(i, 1), a(i, 2)})));
    };
    const Blocks A{block(0), block(1), block(2)};
    const auto r = eqt::u_based_iteration(A, Eqt(), eqt::SolverOptions<double>{});
    const auto c = eqt::classify_solution(A.symbols(), r.G);
    wrong += c.kind != eqt::Classification::qt_decay;
    worst_v = std::max(worst_v, c.v_mass);
  }
  return {wrong == 0 && worst_v <= 1e-10,
          std::to_string(wrong) + " misclassified of 103, max QT v-mass " + fmt("%.2e", worst_v)};
}

Outcome norms() {
  oracle::Random rnd(88);
  const Index n = 500;
  double worst_gap = 0, worst_dense = 0;
  for (int trial = 0; trial < 500; ++trial) {
    double norm, lower, dense;
    if (trial % 2 == 0) {
      const Qt A = rnd.qt(5, 20);
      norm = eqt::qt_inf_norm(A);
      lower = eqt::wiener_norm(A.symbol());
      dense = oracle::sup_row_sum(oracle::dense(A, n, n));
    } else {
      const Eqt A = rnd.eqt(5, 20, 20);
      norm = eqt::eqt_inf_norm(A);
      lower = eqt::wiener_norm(A.symbol()) + A.v().cwiseAbs().sum();
      dense = oracle::sup_row_sum(oracle::dense(A, n, n));
    }
    worst_gap = std::max(worst_gap, lower - norm);
    worst_dense = std::max(worst_dense, std::abs(norm - dense));
  }
  return {worst_gap <= 1e-12 && worst_dense <= 1e-10,
          "max lower-bound violation " + fmt("%.2e", worst_gap) + ", max dense mismatch " + fmt("%.2e", worst_dense)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--expect-fail") == 0 && i + 1 < argc) {
      expected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
      return 2;
    }
  }

  struct Criterion {
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"g(1) dichotomy on 1000 random triples", 60, dichotomy},
      {"exact fixed point e e1^T", 30, exact_fixed_point},
      {"EQT algebra vs dense windows", 120, algebra},
      {"reset walk three-way agreement", 300, reset_walk},
      {"tandem network solve", 300, tandem},
      {"QBD examples and support table", 600, qbd_examples},
      {"classification", 300, classification},
      {"norm anchors", 60, norms},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = seconds_since(t0);
    const bool in_time = s <= criteria[i].budget;
    const bool pass = o.pass && in_time;
    std::printf("criterion %d: %s %s: %s; %.1f s (budget %.0f s)%s\n", id, pass ? "PASS" : "FAIL", criteria[i].name,
                o.detail.c_str(), s, criteria[i].budget, pass || !expected.count(id) ? "" : " [expected]");
    for (const auto& note : o.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
    if (!pass && !expected.count(id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
