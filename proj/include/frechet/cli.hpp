#pragma once

/**
 * @file cli.hpp
 * @brief Request/report layer behind the command-line tool.
 *
 * Every invocation is first turned into a CommandRequest, which is plain
 * JSON. run() maps a request to a report and an exit code:
 *
 *   0  success
 *   2  validation error (malformed input, radius or domain violation)
 *   3  numerical failure (term cap reached before the tolerance was met)
 */

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frechet/algebra.hpp"
#include "frechet/differential.hpp"
#include "frechet/error.hpp"
#include "frechet/identities.hpp"
#include "frechet/json_io.hpp"
#include "frechet/series.hpp"

namespace frechet::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"eval",  "diff",     "compare",
                                                 "curve", "integral", "identities"};
  return names;
}

/**
 * {"command": ..., "series": series-json, "inputs": {...},
 *  "policy": {"tolerance": x, "max_terms": n, "algorithm": a}, "output_path": p}
 *
 * inputs by command:
 *   eval        T
 *   diff        T, h
 *   compare     T, h
 *   curve       curve: [matrix...], t, optional domain: [lo, hi]
 *   integral    W, u1, u2
 *   identities  trials, dim, seed, field
 */
struct CommandRequest {
  json body;

  std::string command() const { return body.value("command", std::string()); }
  std::optional<std::string> output_path() const {
    if (body.contains("output_path") && body["output_path"].is_string()) {
      return body["output_path"].get<std::string>();
    }
    return std::nullopt;
  }
};

struct RunResult {
  int exit_code = kExitOk;
  json report;
};

namespace detail {

inline json diagnostics_to_json(const EvalDiagnostics& d) {
  return json{{"terms_used", d.terms_used},
              {"inner_terms", d.inner_terms},
              {"tail_bound", d.tail_bound},
              {"ball_radius_used", d.ball_radius_used},
              {"within_radius", d.within_radius},
              {"cap_hit", d.cap_hit}};
}

inline TruncationPolicy policy_from(const json& body) {
  TruncationPolicy p;
  if (body.contains("policy")) {
    const json& j = body["policy"];
    if (j.contains("tolerance")) p.tolerance = j["tolerance"].get<double>();
    if (j.contains("max_terms")) p.max_terms = j["max_terms"].get<std::size_t>();
  }
  if (!(p.tolerance > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (p.max_terms == 0) throw Error(ErrorCode::invalid_argument, "max_terms must be positive");
  return p;
}

inline std::vector<Algorithm> algorithms_from(const json& body) {
  std::string name = "all";
  if (body.contains("policy") && body["policy"].contains("algorithm")) {
    name = body["policy"]["algorithm"].get<std::string>();
  }
  if (name == "all") return {std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  for (Algorithm a : kAllAlgorithms) {
    if (name == to_string(a)) return {a};
  }
  throw Error(ErrorCode::invalid_argument, "unknown algorithm '" + name + "'");
}

inline const json& input(const json& body, const char* key) {
  if (!body.contains("inputs") || !body["inputs"].contains(key)) {
    throw Error(ErrorCode::parse_error, std::string("request is missing input '") + key + "'");
  }
  return body["inputs"][key];
}

inline double input_number(const json& body, const char* key) {
  const json& j = input(body, key);
  if (!j.is_number()) throw Error(ErrorCode::parse_error, std::string("input '") + key + "' must be a number");
  return j.get<double>();
}

// Matrices must agree on their field; complex series coefficients promote
// a real problem to the complex field.
inline ScalarField resolve_field(const std::vector<json_io::AnyMatrix>& mats,
                                 const json_io::SeriesSpec& series) {
  ScalarField f = mats.empty() ? ScalarField::Real : json_io::field_of_any(mats.front());
  for (const auto& m : mats) {
    if (json_io::field_of_any(m) != f) {
      throw Error(ErrorCode::field_mismatch, "input matrices mix real and complex fields");
    }
  }
  if (series.field() == ScalarField::Complex) f = ScalarField::Complex;
  return f;
}

inline bool failed_numerically(const EvalDiagnostics& d, double tol) {
  return d.cap_hit && !(d.tail_bound <= tol);
}

template <FieldScalar S>
json result_entry(const char* algorithm, const Matrix<S>& value, const EvalDiagnostics& d) {
  return json{{"algorithm", algorithm},
              {"value", json_io::matrix_to_json(value)},
              {"diagnostics", diagnostics_to_json(d)}};
}

template <FieldScalar S>
RunResult run_typed(const std::string& command, const json& body,
                    const json_io::SeriesSpec& spec,
                    const std::vector<json_io::AnyMatrix>& mats) {
  const TruncationPolicy policy = policy_from(body);
  const PowerSeries<S> g = json_io::make_series<S>(spec);
  RunResult out;
  json& report = out.report;
  report["command"] = command;
  report["results"] = json::array();
  bool numerical_failure = false;

  auto note = [&](const EvalDiagnostics& d) {
    numerical_failure = numerical_failure || failed_numerically(d, policy.tolerance);
  };

  if (command == "eval") {
    const Matrix<S> t = json_io::as_field<S>(mats.at(0));
    const auto r = eval_matrix(g, t, policy);
    report["results"].push_back(result_entry("eval", r.value, r.diagnostics));
    note(r.diagnostics);
  } else if (command == "diff") {
    const Matrix<S> t = json_io::as_field<S>(mats.at(0));
    const Matrix<S> h = json_io::as_field<S>(mats.at(1));
    for (Algorithm a : algorithms_from(body)) {
      const auto r = frechet_differential(a, g, t, h, policy);
      report["results"].push_back(result_entry(to_string(a), r.value, r.diagnostics));
      note(r.diagnostics);
    }
  } else if (command == "compare") {
    const Matrix<S> t = json_io::as_field<S>(mats.at(0));
    const Matrix<S> h = json_io::as_field<S>(mats.at(1));
    const auto cmp = frechet_compare(g, t, h, policy);
    for (const auto& r : cmp.results) {
      report["results"].push_back(result_entry(to_string(r.algorithm), r.value, r.diagnostics));
      note(r.diagnostics);
    }
    json table = json::array();
    for (const auto& p : cmp.pairwise) {
      table.push_back({{"first", to_string(p.first)},
                       {"second", to_string(p.second)},
                       {"relative_difference", p.relative_difference}});
    }
    report["comparisons"] = std::move(table);
    report["max_pairwise_relative_difference"] = cmp.max_pairwise;
    json skipped = json::array();
    for (const auto& s : cmp.skipped) {
      skipped.push_back({{"algorithm", to_string(s.algorithm)}, {"reason", s.reason}});
    }
    report["skipped"] = std::move(skipped);
  } else if (command == "curve") {
    std::vector<Matrix<S>> coeffs;
    for (const auto& m : mats) coeffs.push_back(json_io::as_field<S>(m));
    double lo = -kInfinity, hi = kInfinity;
    if (body["inputs"].contains("domain")) {
      const json& d = body["inputs"]["domain"];
      lo = d.at(0).get<double>();
      hi = d.at(1).get<double>();
    }
    const double t = input_number(body, "t");
    const auto curve = polynomial_curve(std::move(coeffs), lo, hi);
    const auto r = curve_derivative(g, curve, t, policy);
    report["results"].push_back(result_entry(to_string(r.algorithm), r.value, r.diagnostics));
    report["t"] = t;
    note(r.diagnostics);
  } else if (command == "integral") {
    const Matrix<S> w = json_io::as_field<S>(mats.at(0));
    const double u1 = input_number(body, "u1");
    const double u2 = input_number(body, "u2");
    const auto r = integral_identity_check(g, w, u1, u2, policy);
    report["results"].push_back({{"algorithm", "adaptive-simpson"},
                                 {"residual", r.residual},
                                 {"evaluations", r.evaluations},
                                 {"depth_limited", r.depth_limited}});
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown command '" + command + "'");
  }

  if (numerical_failure) {
    out.exit_code = kExitNumerical;
    report["error"] = to_string(ErrorCode::cap_exceeded);
    report["detail"] = "term cap reached before the tail bound met the tolerance";
  }
  return out;
}

template <FieldScalar S>
RunResult run_identities(const json& body) {
  IdentitySuiteOptions opts;
  if (body.contains("inputs")) {
    const json& in = body["inputs"];
    opts.trials = in.value("trials", opts.trials);
    opts.dim = in.value("dim", opts.dim);
    opts.seed = in.value("seed", opts.seed);
  }
  RunResult out;
  out.report["command"] = "identities";
  out.report["results"] = json::array();
  for (const auto& r : run_identity_suite<S>(opts)) {
    json worst = json::array();
    for (const auto& m : r.worst_case) worst.push_back(json_io::matrix_to_json(m));
    out.report["results"].push_back({{"identity", r.identity},
                                     {"max_abs_residual", r.max_abs_residual},
                                     {"max_scaled_residual", r.max_scaled_residual},
                                     {"trials", r.trials},
                                     {"worst_case", std::move(worst)}});
  }
  return out;
}

}  // namespace detail

inline RunResult run(const CommandRequest& request) {
  const json& body = request.body;
  std::string command;
  try {
    if (!body.is_object()) throw Error(ErrorCode::parse_error, "request must be a JSON object");
    command = request.command();
    if (command == "identities") {
      std::string field = "real";
      if (body.contains("inputs")) field = body["inputs"].value("field", field);
      if (field == "real") return detail::run_identities<Real>(body);
      if (field == "complex") return detail::run_identities<Complex>(body);
      throw Error(ErrorCode::invalid_argument, "field must be 'real' or 'complex'");
    }
    bool known = false;
    for (const auto& c : command_names()) known = known || c == command;
    if (!known) throw Error(ErrorCode::invalid_argument, "unknown command '" + command + "'");
    if (!body.contains("series")) throw Error(ErrorCode::parse_error, "request is missing 'series'");
    const json_io::SeriesSpec spec = json_io::series_from_json(body["series"]);

    std::vector<json_io::AnyMatrix> mats;
    if (command == "eval") {
      mats.push_back(json_io::matrix_from_json(detail::input(body, "T")));
    } else if (command == "diff" || command == "compare") {
      mats.push_back(json_io::matrix_from_json(detail::input(body, "T")));
      mats.push_back(json_io::matrix_from_json(detail::input(body, "h")));
    } else if (command == "curve") {
      const json& c = detail::input(body, "curve");
      if (!c.is_array() || c.empty()) throw Error(ErrorCode::parse_error, "'curve' must be a nonempty array of matrices");
      for (const auto& m : c) mats.push_back(json_io::matrix_from_json(m));
    } else if (command == "integral") {
      mats.push_back(json_io::matrix_from_json(detail::input(body, "W")));
    }
    const ScalarField field = detail::resolve_field(mats, spec);
    if (field == ScalarField::Real) return detail::run_typed<Real>(command, body, spec, mats);
    return detail::run_typed<Complex>(command, body, spec, mats);
  } catch (const Error& e) {
    RunResult out;
    out.exit_code = kExitValidation;
    out.report = json{{"command", command}, {"error", to_string(e.code())}, {"detail", e.what()}};
    return out;
  } catch (const json::exception& e) {
    RunResult out;
    out.exit_code = kExitValidation;
    out.report = json{{"command", command},
                      {"error", to_string(ErrorCode::parse_error)},
                      {"detail", e.what()}};
    return out;
  }
}

inline std::string render(const RunResult& r) { return json_io::dump_canonical(r.report); }

}  // namespace frechet::cli
