#pragma once

#include <vector>

#include <json.hpp>

#include "eqt/eqt_matrix.hpp"
#include "eqt/solver.hpp"

namespace eqt {

using json = nlohmann::json;

namespace detail {

template <typename Derived>
json to_list(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

template <typename Scalar>
L1Vector<Scalar> from_list(const json& j) {
  L1Vector<Scalar> v(static_cast<Index>(j.size()));
  for (Index k = 0; k < v.size(); ++k) v(k) = j.at(static_cast<std::size_t>(k)).get<Scalar>();
  return v;
}

/// Row-major list of rows.
template <typename Scalar>
json to_rows(const typename Correction<Scalar>::Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_list(m.row(i)));
  return out;
}

template <typename Scalar>
typename Correction<Scalar>::Matrix from_rows(const json& j, Index rows, Index cols) {
  typename Correction<Scalar>::Matrix m(rows, cols);
  if (static_cast<Index>(j.size()) != rows) throw Error(ErrorKind::InvalidSpec, "factor row count mismatch");
  for (Index i = 0; i < rows; ++i) {
    const json& r = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(r.size()) != cols) throw Error(ErrorKind::InvalidSpec, "factor column count mismatch");
    for (Index c = 0; c < cols; ++c) m(i, c) = r.at(static_cast<std::size_t>(c)).get<Scalar>();
  }
  return m;
}

}  // namespace detail

template <typename Scalar>
json to_json(const LaurentSeries<Scalar>& a) {
  return {{"lowest_index", a.lowest_index()}, {"coeffs", detail::to_list(a.coefficients())}};
}

template <typename Scalar>
LaurentSeries<Scalar> laurent_from_json(const json& j) {
  return LaurentSeries<Scalar>(j.at("lowest_index").get<Index>(), detail::from_list<Scalar>(j.at("coeffs")));
}

template <typename Scalar>
json to_json(const Correction<Scalar>& E) {
  json out = {{"m", E.rows()}, {"n", E.cols()}};
  out["factors"] = {{"rank", E.rank()},
                    {"left", detail::to_rows<Scalar>(E.left())},
                    {"right", detail::to_rows<Scalar>(E.right())}};
  return out;
}

/// Accepts either {"factors": {left, right}} or {"dense": rows}.
template <typename Scalar>
Correction<Scalar> correction_from_json(const json& j) {
  const Index m = j.at("m").get<Index>(), n = j.at("n").get<Index>();
  if (j.contains("dense")) return Correction<Scalar>::from_dense(detail::from_rows<Scalar>(j.at("dense"), m, n));
  if (!j.contains("factors")) return {};
  const json& f = j.at("factors");
  const Index r = f.at("rank").get<Index>();
  if (r == 0) return {};
  return Correction<Scalar>(detail::from_rows<Scalar>(f.at("left"), m, r),
                            detail::from_rows<Scalar>(f.at("right"), n, r));
}

template <typename Scalar>
json to_json(const QtMatrix<Scalar>& A) {
  return {{"symbol", to_json(A.symbol())}, {"correction", to_json(A.correction())}};
}

template <typename Scalar>
json to_json(const EqtMatrix<Scalar>& A) {
  json out = to_json(A.qt());
  out["v"] = detail::to_list(A.v());
  return out;
}

/// Reads a QtMatrix or EqtMatrix document; a missing "v" means v = 0 and a
/// scalar "v" means v e_1.
template <typename Scalar>
EqtMatrix<Scalar> eqt_from_json(const json& j) {
  QtMatrix<Scalar> qt(laurent_from_json<Scalar>(j.at("symbol")),
                      j.contains("correction") ? correction_from_json<Scalar>(j.at("correction")) : Correction<Scalar>());
  if (!j.contains("v")) return EqtMatrix<Scalar>(qt);
  if (j.at("v").is_number()) return EqtMatrix<Scalar>(qt, j.at("v").get<Scalar>());
  return EqtMatrix<Scalar>(qt, detail::from_list<Scalar>(j.at("v")));
}

inline json to_json(const SupportFeatures& f) {
  return {{"n_minus", f.n_minus}, {"n_plus", f.n_plus}, {"m", f.rows},
          {"n", f.cols},          {"rank", f.rank},     {"v_support", f.v_support}};
}

template <typename Scalar>
json to_json(const SolverReport<Scalar>& r) {
  return {{"iterations", r.iterations},
          {"status", r.status == SolverStatus::converged ? "converged" : "max_iter_exceeded"},
          {"residual_history", r.residual_history},
          {"wall_seconds", r.wall_seconds},
          {"classification", std::string(to_string(r.classification))},
          {"g_value_at_1", r.g_value_at_1},
          {"supports", to_json(r.supports)}};
}

}  // namespace eqt
