#include <doctest.h>

#include <fstream>
#include <sstream>

#include "eqt/eqt.hpp"
#include "eqt/markov.hpp"
#include "support/oracles.hpp"

using eqt::Eqt;
using eqt::json;
namespace mk = eqt::markov;

namespace {

Eqt reload(const Eqt& G) { return eqt::eqt_from_json<double>(json::parse(eqt::to_json(G).dump())); }

}  // namespace

TEST_CASE("json round trip is exact") {
  oracle::Random rnd(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Eqt A = rnd.eqt(4, 12, 10);
    const Eqt B = reload(A);
    CHECK(oracle::max_abs(oracle::dense(A, 30, 30) - oracle::dense(B, 30, 30)) == 0.0);
    CHECK(eqt::eqt_inf_norm(B) == eqt::eqt_inf_norm(A));
  }
  const Eqt empty = reload(Eqt());
  CHECK(eqt::eqt_inf_norm(empty) == 0.0);
}

TEST_CASE("residuals recomputed from serialized solutions") {
  SUBCASE("zsh") {
    const auto A = mk::build_zsh(1, 2, 1);
    const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), eqt::SolverOptions<double>{});
    CHECK(eqt::residual(A, reload(r.G)) == eqt::residual(A, r.G));
  }
  SUBCASE("first QBD example") {
    const auto A = mk::build_qbd_example(1);
    eqt::SolverOptions<double> opts;
    opts.tol = 1e-11;
    const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), opts);
    const double res = eqt::residual(A, reload(r.G));
    CHECK(res == eqt::residual(A, r.G));
    CHECK(res <= 1e-11);
  }
}

TEST_CASE("solver report document") {
  const auto A = mk::build_zsh(1, 2, 1);
  const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), eqt::SolverOptions<double>{});
  const json j = json::parse(eqt::to_json(r.report).dump());
  CHECK(j.at("status") == "converged");
  CHECK(j.at("classification") == "EQT_rank_one");
  CHECK(j.at("supports").at("v_support") == 1);
  CHECK(j.at("residual_history").size() == r.report.residual_history.size());
}
