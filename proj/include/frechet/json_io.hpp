#pragma once

/**
 * @file json_io.hpp
 * @brief Matrix, series and report JSON.
 *
 * Matrix:  {"dim": n, "field": "real"|"complex", "entries": [...]}
 *          entries are row-major; complex entries are [re, im] pairs.
 * Series:  {"builtin": "exp"} or {"coeffs": [...], "radius": r}
 *          radius may be omitted (estimated) or the string "inf".
 *
 * dump_canonical() writes keys sorted and every floating-point number in
 * scientific notation with 17 significant digits, so equal values always
 * produce equal bytes.
 */

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "frechet/algebra.hpp"
#include "frechet/error.hpp"
#include "frechet/series.hpp"

namespace frechet::json_io {

using nlohmann::json;

using AnyMatrix = std::variant<Matrix<Real>, Matrix<Complex>>;

inline ScalarField field_of_any(const AnyMatrix& m) {
  return std::holds_alternative<Matrix<Real>>(m) ? ScalarField::Real : ScalarField::Complex;
}

inline Matrix<Complex> promote(const Matrix<Real>& m) {
  return Matrix<Complex>(typename Matrix<Complex>::Storage(m.storage().cast<Complex>()));
}

template <FieldScalar S>
Matrix<S> as_field(const AnyMatrix& m) {
  if (const auto* c = std::get_if<Matrix<S>>(&m)) {
    return *c;
  }
  if constexpr (std::is_same_v<S, Complex>) {
    return promote(std::get<Matrix<Real>>(m));
  } else {
    throw Error(ErrorCode::field_mismatch, "complex matrix supplied where a real one is required");
  }
}

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

inline double number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

inline Complex complex_number(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(std::string(what) + " must be a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline AnyMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) detail::fail("matrix must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) detail::fail("matrix needs integer 'dim'");
  const auto dim_signed = j["dim"].get<long long>();
  if (dim_signed <= 0) throw Error(ErrorCode::invalid_argument, "matrix dim must be positive");
  const auto dim = static_cast<std::size_t>(dim_signed);
  const std::string field = j.value("field", std::string("real"));
  if (!j.contains("entries") || !j["entries"].is_array()) detail::fail("matrix needs 'entries' array");
  const json& e = j["entries"];
  if (e.size() != dim * dim) {
    throw Error(ErrorCode::dimension_mismatch, "matrix with dim " + std::to_string(dim) +
                                                   " needs " + std::to_string(dim * dim) +
                                                   " entries, got " + std::to_string(e.size()));
  }
  if (field == "real") {
    Matrix<Real> m(dim);
    for (std::size_t k = 0; k < e.size(); ++k) m(k / dim, k % dim) = detail::number(e[k], "entry");
    return m;
  }
  if (field == "complex") {
    Matrix<Complex> m(dim);
    for (std::size_t k = 0; k < e.size(); ++k) {
      m(k / dim, k % dim) = detail::complex_number(e[k], "entry");
    }
    return m;
  }
  detail::fail("matrix field must be 'real' or 'complex'");
}

template <FieldScalar S>
json matrix_to_json(const Matrix<S>& m) {
  json entries = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if constexpr (std::is_same_v<S, Real>) {
        entries.push_back(m(i, j));
      } else {
        entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
      }
    }
  }
  return json{{"dim", m.dim()}, {"field", to_string(m.field())}, {"entries", std::move(entries)}};
}

inline json any_matrix_to_json(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return matrix_to_json(x); }, m);
}

/// Parsed series description, independent of the evaluation field.
struct SeriesSpec {
  std::string builtin;                 // nonempty for builtin series
  std::vector<Complex> coeffs;         // user coefficients
  bool complex_coeffs = false;
  std::optional<double> radius;

  ScalarField field() const { return complex_coeffs ? ScalarField::Complex : ScalarField::Real; }
};

inline SeriesSpec series_from_json(const json& j) {
  SeriesSpec spec;
  if (j.is_string()) {
    spec.builtin = j.get<std::string>();
    return spec;
  }
  if (!j.is_object()) detail::fail("series must be a JSON object");
  if (j.contains("builtin")) {
    if (!j["builtin"].is_string()) detail::fail("'builtin' must be a string");
    spec.builtin = j["builtin"].get<std::string>();
    bool known = false;
    for (auto n : kBuiltinSeriesNames) known = known || n == spec.builtin;
    if (!known) throw Error(ErrorCode::unknown_series, "unknown builtin series '" + spec.builtin + "'");
    return spec;
  }
  if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty()) {
    detail::fail("series needs 'builtin' or a nonempty 'coeffs' array");
  }
  for (const auto& c : j["coeffs"]) {
    if (c.is_array()) spec.complex_coeffs = true;
    spec.coeffs.push_back(detail::complex_number(c, "coefficient"));
  }
  if (j.contains("radius") && !j["radius"].is_null()) {
    const json& r = j["radius"];
    if (r.is_string() && (r == "inf" || r == "infinity")) {
      spec.radius = kInfinity;
    } else {
      spec.radius = detail::number(r, "radius");
      if (!(*spec.radius > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
    }
  }
  return spec;
}

inline json series_to_json(const SeriesSpec& spec) {
  if (!spec.builtin.empty()) return json{{"builtin", spec.builtin}};
  json coeffs = json::array();
  for (const auto& c : spec.coeffs) {
    if (spec.complex_coeffs) {
      coeffs.push_back(json::array({c.real(), c.imag()}));
    } else {
      coeffs.push_back(c.real());
    }
  }
  json out{{"coeffs", std::move(coeffs)}};
  if (spec.radius) {
    if (std::isinf(*spec.radius)) {
      out["radius"] = "inf";
    } else {
      out["radius"] = *spec.radius;
    }
  }
  return out;
}

template <FieldScalar S>
PowerSeries<S> make_series(const SeriesSpec& spec) {
  if (!spec.builtin.empty()) return builtin_series<S>(spec.builtin);
  std::vector<S> coeffs;
  coeffs.reserve(spec.coeffs.size());
  for (const auto& c : spec.coeffs) {
    if constexpr (std::is_same_v<S, Real>) {
      if (c.imag() != 0.0) {
        throw Error(ErrorCode::field_mismatch, "complex coefficient in a real series");
      }
      coeffs.push_back(c.real());
    } else {
      coeffs.push_back(c);
    }
  }
  return series_from_coefficients<S>(std::move(coeffs), spec.radius);
}

// ---------------------------------------------------------------------------
// Canonical output
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace detail {

inline void dump_to(const json& j, std::ostringstream& out, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out << ',' << nl;
        first = false;
        out << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump_to(it.value(), out, indent, level + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        out << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          dump_to(j[i], out, 0, 0);
        }
        out << ']';
        return;
      }
      out << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',' << nl;
        out << pad;
        dump_to(j[i], out, indent, level + 1);
      }
      out << nl << close_pad << ']';
      return;
    }
    case json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump_canonical(const json& j, int indent = 2) {
  std::ostringstream out;
  detail::dump_to(j, out, indent, 0);
  out << '\n';
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, what + ": " + e.what());
  }
}

/// Inline JSON if the argument starts with '{' or '[', a file path otherwise.
inline json load_argument(const std::string& arg, const std::string& what) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    return parse(arg, what);
  }
  return parse(read_file(arg), what + " '" + arg + "'");
}

}  // namespace frechet::json_io
