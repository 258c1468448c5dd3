// frechet-cli: evaluate matrix power series and their Fréchet differentials.
//
//   frechet-cli eval       --series exp --matrix-T T.json
//   frechet-cli diff       --series exp --matrix-T T.json --matrix-h h.json --algorithm all
//   frechet-cli compare    --series geometric --matrix-T T.json --matrix-h h.json
//   frechet-cli curve      --series exp --curve poly:A0.json,A1.json,A2.json --t 0.1
//   frechet-cli integral   --series exp --W W.json --u1 0 --u2 1
//   frechet-cli identities --trials 100 --dim 4 --seed 42 --field real
//   frechet-cli run        request.json
//
// Every subcommand builds a request JSON first; --save-request writes it so
// that `run` can replay the exact invocation.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frechet/cli.hpp"

namespace {

using frechet::cli::CommandRequest;
using frechet::cli::RunResult;
using nlohmann::json;
namespace json_io = frechet::json_io;

struct CommonOptions {
  std::string series;
  double tolerance = 1e-12;
  std::size_t max_terms = 10'000;
  std::string out;
  std::string save_request;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_series = true) {
  if (with_series) {
    cmd->add_option("--series", o.series, "series as a file, inline JSON, or a builtin name")
        ->required();
  }
  cmd->add_option("--tol", o.tolerance, "truncation tolerance")->capture_default_str();
  cmd->add_option("--max-terms", o.max_terms, "cap on series terms")->capture_default_str();
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
  cmd->add_option("--save-request", o.save_request, "write the request JSON here");
}

json series_argument(const std::string& arg) {
  for (auto name : frechet::kBuiltinSeriesNames) {
    if (arg == name) return json{{"builtin", arg}};
  }
  return json_io::load_argument(arg, "series");
}

json base_request(const std::string& command, const CommonOptions& o) {
  json body{{"command", command},
            {"policy", {{"tolerance", o.tolerance}, {"max_terms", o.max_terms}}},
            {"inputs", json::object()}};
  if (!o.series.empty()) body["series"] = series_argument(o.series);
  if (!o.out.empty()) body["output_path"] = o.out;
  return body;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

int emit(const RunResult& result, const std::optional<std::string>& out_path) {
  const std::string text = frechet::cli::render(result);
  if (out_path && result.exit_code != frechet::cli::kExitValidation) {
    std::ofstream f(*out_path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write '" << *out_path << "'\n";
      return frechet::cli::kExitValidation;
    }
    f << text;
  } else {
    std::cout << text;
  }
  return result.exit_code;
}

int fail(const std::string& command, const frechet::Error& e) {
  const json report{{"command", command},
                    {"error", frechet::to_string(e.code())},
                    {"detail", e.what()}};
  std::cout << json_io::dump_canonical(report);
  return frechet::cli::kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix power series and their Fréchet differentials"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string matrix_t, matrix_h, matrix_w, curve_spec, algorithm = "all", request_path;
  std::string field = "real";
  double t_value = 0.0, u1 = 0.0, u2 = 0.0;
  std::vector<double> domain;
  std::size_t trials = 100, dim = 4;
  std::uint64_t seed = 42;

  auto* eval = app.add_subcommand("eval", "evaluate g(T)");
  add_common(eval, common);
  eval->add_option("--matrix-T", matrix_t, "matrix T")->required();

  auto* diff = app.add_subcommand("diff", "Fréchet differential g^[1](T)(h)");
  add_common(diff, common);
  diff->add_option("--matrix-T", matrix_t, "matrix T")->required();
  diff->add_option("--matrix-h", matrix_h, "direction h")->required();
  diff->add_option("--algorithm", algorithm,
                   "direct|commutant|power-commutant|derivative-series|all")
      ->capture_default_str();

  auto* compare = app.add_subcommand("compare", "run every applicable algorithm and compare");
  add_common(compare, common);
  compare->add_option("--matrix-T", matrix_t, "matrix T")->required();
  compare->add_option("--matrix-h", matrix_h, "direction h")->required();

  auto* curve = app.add_subcommand("curve", "d/dt g(T(t)) for a polynomial curve");
  add_common(curve, common);
  curve->add_option("--curve", curve_spec, "poly:<C0.json>,<C1.json>,... for T(t) = Σ t^j C_j")
      ->required();
  curve->add_option("--t", t_value, "curve parameter")->required();
  curve->add_option("--domain", domain, "open interval lo hi")->expected(2);

  auto* integral = app.add_subcommand("integral", "check W ∫ g'(tW) dt = g(u2 W) - g(u1 W)");
  add_common(integral, common);
  integral->add_option("--W", matrix_w, "matrix W")->required();
  integral->add_option("--u1", u1, "lower limit")->required();
  integral->add_option("--u2", u2, "upper limit")->required();

  auto* identities = app.add_subcommand("identities", "run the algebraic identity suite");
  add_common(identities, common, false);
  identities->add_option("--trials", trials)->capture_default_str();
  identities->add_option("--dim", dim)->capture_default_str();
  identities->add_option("--seed", seed)->capture_default_str();
  identities->add_option("--field", field, "real|complex")->capture_default_str();

  auto* run = app.add_subcommand("run", "replay a saved request");
  run->add_option("request", request_path, "request JSON file")->required();
  run->add_option("--out", common.out, "write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();

  CommandRequest request;
  try {
    if (command == "run") {
      request.body = json_io::load_argument(request_path, "request");
      if (!common.out.empty()) request.body["output_path"] = common.out;
    } else {
      json body = base_request(command, common);
      auto matrix = [](const std::string& arg, const char* what) {
        return json_io::load_argument(arg, what);
      };
      if (command == "eval") {
        body["inputs"]["T"] = matrix(matrix_t, "matrix T");
      } else if (command == "diff" || command == "compare") {
        body["inputs"]["T"] = matrix(matrix_t, "matrix T");
        body["inputs"]["h"] = matrix(matrix_h, "matrix h");
        if (command == "diff") body["policy"]["algorithm"] = algorithm;
      } else if (command == "curve") {
        const std::string prefix = "poly:";
        if (curve_spec.rfind(prefix, 0) != 0) {
          throw frechet::Error(frechet::ErrorCode::invalid_argument,
                               "--curve must start with 'poly:'");
        }
        json coeffs = json::array();
        for (const auto& path : split(curve_spec.substr(prefix.size()), ',')) {
          coeffs.push_back(matrix(path, "curve coefficient"));
        }
        body["inputs"]["curve"] = std::move(coeffs);
        body["inputs"]["t"] = t_value;
        if (domain.size() == 2) body["inputs"]["domain"] = domain;
      } else if (command == "integral") {
        body["inputs"]["W"] = matrix(matrix_w, "matrix W");
        body["inputs"]["u1"] = u1;
        body["inputs"]["u2"] = u2;
      } else if (command == "identities") {
        body["inputs"] = {{"trials", trials}, {"dim", dim}, {"seed", seed}, {"field", field}};
      }
      request.body = std::move(body);
    }
    if (!common.save_request.empty()) {
      std::ofstream f(common.save_request, std::ios::binary);
      f << json_io::dump_canonical(request.body);
    }
  } catch (const frechet::Error& e) {
    return fail(command, e);
  }

  return emit(frechet::cli::run(request), request.output_path());
}
