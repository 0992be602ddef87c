// eqtkit: experiments on quasi-Toeplitz Markov models.
//
//   eqtkit reset1d --m 64,256 --gamma 0.9,0.99 --methods qt_linear,squaring,mam_cr
//   eqtkit tandem --gamma 0.95 --methods qt_solver,truncation --k 256
//   eqtkit qbd --which 1
//   eqtkit selftest
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqt/eqt.hpp"
#include "eqt/markov.hpp"

namespace fs = std::filesystem;
namespace mk = eqt::markov;
using eqt::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::vector<int> m{64};
  std::vector<double> gamma;
  std::vector<std::string> methods;
  double tolerance = 1e-12;
  std::uint64_t seed = 1;
  int replicates = 1;
  std::string output;
  std::string which = "1";
  double a = 1, b = 2, lambda = 1;
  int k = 64;
  std::string variant = "auto";
  mk::TandemParams tandem;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

/// Writes through a temporary file and a rename so readers never see a
/// partial file.
void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const {
    std::ostringstream os;
    for (std::size_t j = 0; j < columns_.size(); ++j) os << (j ? "," : "") << columns_[j];
    os << "\n";
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << r[j];
      os << "\n";
    }
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void emit(const Config& cfg, const std::string& name, const std::string& text) {
  std::cout << text;
  if (!cfg.output.empty()) write_atomic(fs::path(cfg.output) / name, text);
}

void emit_file(const Config& cfg, const std::string& name, const std::string& text) {
  if (!cfg.output.empty()) write_atomic(fs::path(cfg.output) / name, text);
}

std::string prefix_csv(const Eigen::VectorXd& x, eqt::Index limit = 1000) {
  std::ostringstream os;
  os << "index,value\n";
  for (eqt::Index i = 0; i < std::min(limit, x.size()); ++i) os << i << "," << fmt("%.17g", x(i)) << "\n";
  return os.str();
}

std::string tag(double x) { return fmt("%g", x); }

void require_methods(const std::vector<std::string>& methods, const std::vector<std::string>& allowed) {
  if (methods.empty()) throw UsageError("at least one method is required");
  for (const auto& m : methods) {
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
      throw UsageError("unknown method '" + m + "'");
    }
  }
}

eqt::SolverVariant parse_variant(const std::string& s) {
  if (s == "natural") return eqt::SolverVariant::natural;
  if (s == "u_based") return eqt::SolverVariant::u_based;
  if (s == "shifted_inverse") return eqt::SolverVariant::shifted_inverse;
  throw UsageError("unknown variant '" + s + "'");
}

/// Applies the keys of a JSON config on top of the command-line values.
void apply_config(const std::string& path, const std::string& experiment, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  auto list_or_scalar = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    using T = typename std::decay_t<decltype(dst)>::value_type;
    dst.clear();
    if (j[key].is_array()) {
      for (const auto& x : j[key]) dst.push_back(x.get<T>());
    } else {
      dst.push_back(j[key].get<T>());
    }
  };
  try {
    list_or_scalar("m", cfg.m);
    list_or_scalar("gamma", cfg.gamma);
    list_or_scalar("methods", cfg.methods);
    if (j.contains("tolerance")) cfg.tolerance = j["tolerance"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("replicates")) cfg.replicates = j["replicates"].get<int>();
    if (j.contains("model") && j["model"].get<std::string>() != experiment) {
      throw UsageError("config model '" + j["model"].get<std::string>() + "' does not match " + experiment);
    }
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    if (j.contains("output_dir")) cfg.output = j["output_dir"].get<std::string>();
    if (j.contains("which")) cfg.which = j["which"].is_string() ? j["which"].get<std::string>()
                                                                : std::to_string(j["which"].get<int>());
    if (j.contains("a")) cfg.a = j["a"].get<double>();
    if (j.contains("b")) cfg.b = j["b"].get<double>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
    auto& t = cfg.tandem;
    for (auto [key, dst] : std::vector<std::pair<const char*, double*>>{
             {"lambda1", &t.lambda1}, {"lambda2", &t.lambda2}, {"mu1", &t.mu1}, {"mu2", &t.mu2}, {"p", &t.p}, {"q", &t.q}}) {
      if (j.contains(key)) *dst = j[key].get<double>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config value: ") + e.what());
  }
}

void validate(const Config& cfg) {
  if (!(cfg.tolerance > 0)) throw UsageError("tolerance must be positive");
  if (cfg.replicates < 1) throw UsageError("replicates must be at least 1");
}

// ---------------------------------------------------------------------------

int run_reset1d(Config cfg) {
  if (cfg.gamma.empty()) cfg.gamma = {0.9};
  if (cfg.methods.empty()) cfg.methods = {"qt_linear", "squaring", "mam_cr"};
  require_methods(cfg.methods, {"qt_linear", "squaring", "mam_cr"});
  Table table({"m", "gamma", "method", "seconds", "residual_l1"});
  for (int m : cfg.m) {
    for (double gamma : cfg.gamma) {
      for (const auto& method : cfg.methods) {
        double seconds = 0, residual = 0;
        for (int r = 0; r < cfg.replicates; ++r) {
          const auto spec = mk::make_walk(m, gamma, cfg.seed + std::uint64_t(r));
          const auto walk = mk::build_reset_walk(spec);
          const auto t0 = std::chrono::steady_clock::now();
          Eigen::VectorXd pi;
          if (method == "qt_linear") {
            pi = mk::steady_state_linear(walk.T, walk.v, std::min(cfg.tolerance, 1e-12));
          } else if (method == "squaring") {
            pi = mk::steady_state_squaring(walk.P);
          } else {
            pi = mk::reblocked_mam(spec);
          }
          seconds += seconds_since(t0);
          residual += mk::stationary_residual(walk.P, pi);
          if (r == 0) {
            const std::string stem = "reset1d_m" + std::to_string(m) + "_gamma" + tag(gamma) + "_" + method;
            emit_file(cfg, stem + ".csv", prefix_csv(pi));
            emit_file(cfg, stem + ".json", json{{"pi", eqt::detail::to_list(pi)}}.dump() + "\n");
          }
        }
        table.add({std::to_string(m), tag(gamma), method, fmt("%.6f", seconds / cfg.replicates),
                   fmt("%.6e", residual / cfg.replicates)});
      }
    }
  }
  emit(cfg, "reset1d.csv", table.str());
  return 0;
}

eqt::SolveResult<double> qt_solve(const eqt::QbdBlocks<double>& A, const Config& cfg,
                                  std::optional<eqt::SolverVariant> preferred = std::nullopt) {
  eqt::SolverOptions<double> opts;
  opts.tol = cfg.tolerance;
  const auto t = A.symbols();
  const bool rank_one = t.down() < t.up();
  if (cfg.variant != "auto") {
    opts.variant = parse_variant(cfg.variant);
  } else if (preferred) {
    opts.variant = *preferred;
  } else {
    opts.variant = rank_one ? eqt::SolverVariant::u_based : eqt::SolverVariant::natural;
  }
  const bool guess = opts.variant != eqt::SolverVariant::natural || rank_one;
  return eqt::solve(A, guess ? eqt::eqt_initial_guess(t) : eqt::Eqt(), opts);
}

std::string residual_csv(const eqt::SolverReport<double>& r) {
  Table t({"iter", "residual", "wall_seconds"});
  for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
    t.add({std::to_string(i), fmt("%.6e", r.residual_history[i]), fmt("%.6f", r.wall_seconds[i])});
  }
  return t.str();
}

int run_tandem(Config cfg) {
  if (cfg.gamma.empty()) cfg.gamma = {0.95};
  if (cfg.methods.empty()) cfg.methods = {"qt_solver"};
  require_methods(cfg.methods, {"qt_solver", "truncation"});
  Table table({"gamma", "method", "seconds", "residual_inf"});
  bool failed = false;
  for (double gamma : cfg.gamma) {
    mk::TandemParams p = cfg.tandem;
    p.gamma = gamma;
    const auto model = mk::build_tandem(p);
    for (const auto& method : cfg.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      eqt::Eqt G;
      json report;
      if (method == "qt_solver") {
        const auto r = qt_solve(model.blocks, cfg, eqt::SolverVariant::shifted_inverse);
        G = r.G;
        report = eqt::to_json(r.report);
        failed |= r.report.status != eqt::SolverStatus::converged;
        emit_file(cfg, "tandem_gamma" + tag(gamma) + "_history.csv", residual_csv(r.report));
      } else {
        G = mk::truncation_heuristic_G(model.blocks, cfg.k);
      }
      const double seconds = seconds_since(t0);
      const double res = eqt::residual(model.blocks, G);
      table.add({tag(gamma), method, fmt("%.6f", seconds), fmt("%.6e", res)});
      json doc = {{"gamma", gamma}, {"method", method}, {"residual_inf", res}, {"G", eqt::to_json(G)}};
      if (!report.is_null()) doc["report"] = report;
      emit_file(cfg, "tandem_gamma" + tag(gamma) + "_" + method + ".json", doc.dump() + "\n");
    }
  }
  emit(cfg, "tandem.csv", table.str());
  return failed ? 1 : 0;
}

int run_qbd(Config cfg) {
  if (cfg.methods.empty()) cfg.methods = {"qt_solver"};
  require_methods(cfg.methods, {"qt_solver", "truncation"});
  eqt::QbdBlocks<double> A;
  if (cfg.which == "1" || cfg.which == "2") {
    A = mk::build_qbd_example(std::stoi(cfg.which));
  } else if (cfg.which == "zsh") {
    A = mk::build_zsh(cfg.a, cfg.b, cfg.lambda);
  } else {
    throw UsageError("unknown example '" + cfg.which + "'");
  }
  Table table({"which", "method", "seconds", "residual_inf", "iterations", "n_minus", "n_plus", "m", "n", "rank",
               "v_support", "classification"});
  bool failed = false;
  for (const auto& method : cfg.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    eqt::Eqt G;
    eqt::SolverReport<double> report;
    if (method == "qt_solver") {
      const auto r = qt_solve(A, cfg);
      G = r.G;
      report = r.report;
      failed |= report.status != eqt::SolverStatus::converged;
    } else {
      G = mk::truncation_heuristic_G(A, cfg.k);
      report.supports = eqt::measure_supports(G);
      report.classification = eqt::classify_solution(A.symbols(), G).kind;
      report.g_value_at_1 = G.symbol().sum();
    }
    const double seconds = seconds_since(t0);
    const double res = eqt::residual(A, G);
    const auto& f = report.supports;
    table.add({cfg.which, method, fmt("%.6f", seconds), fmt("%.6e", res), std::to_string(report.iterations),
               std::to_string(f.n_minus), std::to_string(f.n_plus), std::to_string(f.rows), std::to_string(f.cols),
               std::to_string(f.rank), std::to_string(f.v_support), std::string(eqt::to_string(report.classification))});
    json doc = {{"which", cfg.which}, {"method", method}, {"residual_inf", res}, {"report", eqt::to_json(report)},
                {"G", eqt::to_json(G)}};
    emit_file(cfg, "qbd_" + cfg.which + "_" + method + ".json", doc.dump() + "\n");
    if (method == "qt_solver") emit_file(cfg, "qbd_" + cfg.which + "_history.csv", residual_csv(report));
  }
  emit(cfg, "qbd.csv", table.str());
  return failed ? 1 : 0;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    failures += ok ? 0 : 1;
  };
  {
    const auto A = mk::build_zsh(1, 2, 1);
    const auto r = eqt::u_based_iteration(A, eqt::eqt_initial_guess(A.symbols()), eqt::SolverOptions<double>{});
    check("zsh exact solution", eqt::eqt_inf_norm(eqt::eqt_sub(r.G, eqt::Eqt(eqt::Qt(), 1.0))) <= 1e-9);
  }
  {
    const auto spec = mk::make_walk(4, 0.9, 1);
    const auto w = mk::build_reset_walk(spec);
    const auto a = mk::steady_state_linear(w.T, w.v), b = mk::steady_state_squaring(w.P), c = mk::reblocked_mam(spec);
    check("reset walk three-way agreement",
          mk::l1_distance(a, b) <= 1e-8 && mk::l1_distance(a, c) <= 1e-8 && mk::stationary_residual(w.P, a) <= 1e-10);
  }
  {
    const eqt::Triple t{eqt::Laurent::constant(0.2), eqt::Laurent::constant(0.2), eqt::Laurent::constant(0.6)};
    check("scalar minimal root", std::abs(eqt::minimal_quadratic_root(t).sum() - 1.0 / 3) <= 1e-14);
  }
  {
    const auto q = mk::build_qbd_example(1);
    const auto G = eqt::eqt_initial_guess(q.symbols());
    const auto back = eqt::eqt_from_json<double>(json::parse(eqt::to_json(G).dump()));
    check("json round trip", eqt::residual(q, back) == eqt::residual(q, G));
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Toeplitz Markov model experiments"};
  app.require_subcommand(1);
  Config cfg;
  std::string config_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--tolerance", cfg.tolerance, "Solver tolerance");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--replicates", cfg.replicates, "Replicates averaged per grid point");
    sub->add_option("--output", cfg.output, "Output directory");
    sub->add_option("--methods", cfg.methods, "Comma separated method list")->delimiter(',');
    sub->add_option("--config", config_path, "JSON file overriding the flags");
  };

  auto* reset1d = app.add_subcommand("reset1d", "1-D random walk with reset");
  common(reset1d);
  reset1d->add_option("--m", cfg.m, "Maximum skip lengths")->delimiter(',');
  reset1d->add_option("--gamma", cfg.gamma, "Non-reset masses")->delimiter(',');

  auto* tandem = app.add_subcommand("tandem", "Two-node Jackson network with reset");
  common(tandem);
  tandem->add_option("--gamma", cfg.gamma, "Non-reset probabilities")->delimiter(',');
  tandem->add_option("--k", cfg.k, "Truncation size for the truncation method");
  tandem->add_option("--variant", cfg.variant, "auto, natural, u_based or shifted_inverse");
  tandem->add_option("--lambda1", cfg.tandem.lambda1);
  tandem->add_option("--lambda2", cfg.tandem.lambda2);
  tandem->add_option("--mu1", cfg.tandem.mu1);
  tandem->add_option("--mu2", cfg.tandem.mu2);
  tandem->add_option("--p", cfg.tandem.p);
  tandem->add_option("--q", cfg.tandem.q);

  auto* qbd = app.add_subcommand("qbd", "Quarter-plane QBD examples");
  common(qbd);
  qbd->add_option("--which", cfg.which, "1, 2 or zsh");
  qbd->add_option("--a", cfg.a);
  qbd->add_option("--b", cfg.b);
  qbd->add_option("--lambda", cfg.lambda);
  qbd->add_option("--k", cfg.k, "Truncation size for the truncation method");
  qbd->add_option("--variant", cfg.variant, "auto, natural, u_based or shifted_inverse");

  auto* selftest = app.add_subcommand("selftest", "Quick consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) apply_config(config_path, app.get_subcommands().front()->get_name(), cfg);
    validate(cfg);
    if (*reset1d) return run_reset1d(cfg);
    if (*tandem) return run_tandem(cfg);
    if (*qbd) return run_qbd(cfg);
    if (*selftest) return run_selftest();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const eqt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_usage_error() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
