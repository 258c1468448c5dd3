// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "frechet/cli.hpp"
#include "frechet/frechet.hpp"

using namespace frechet;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// AC1: four-way agreement.
template <FieldScalar S>
double four_way(std::size_t& runs, std::size_t& skipped) {
  double worst = 0.0;
  const TruncationPolicy policy = TruncationPolicy{}.with_tolerance(1e-12);
  for (auto name : kBuiltinSeriesNames) {
    const auto g = builtin_series<S>(name);
    const double bound = 0.3 * std::min(g.radius(), 1.0);
    for (std::size_t dim : {2u, 3u, 4u, 6u}) {
      Rng rng(1000 + dim);
      for (int pair = 0; pair < 50; ++pair) {
        const auto t = random_matrix_with_norm<S>(dim, uniform(rng, 0.05, 1.0) * bound, rng);
        const auto h = random_matrix<S>(dim, rng);
        const auto cmp = frechet_compare(g, t, h, policy);
        skipped += cmp.skipped.size();
        worst = std::max(worst, cmp.max_pairwise);
        ++runs;
      }
    }
  }
  return worst;
}

void ac1() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t runs = 0, skipped = 0;
  const double worst = std::max(four_way<Real>(runs, skipped), four_way<Complex>(runs, skipped));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report("AC1", worst <= 1e-9 && skipped == 0 && seconds < 30.0,
         "four-way agreement: " + std::to_string(runs) + " cases, max pairwise rel diff " +
             fmt("%.3e", worst) + " (<= 1e-9), " + fmt("%.1f", seconds) + " s (< 30 s)");
}

// AC2: monomial four forms.
void ac2() {
  Rng rng(2002);
  double worst = 0.0, worst_commuting = 0.0;
  for (std::size_t n = 2; n <= 12; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto t = random_matrix<Real>(4, rng);
      const auto h = random_matrix<Real>(4, rng);
      const auto f = monomial_differential_forms(n, t, h);
      for (const auto* m : {&f.power_commutant, &f.binomial, &f.weighted_commutant}) {
        worst = std::max(worst, relative_difference(f.direct, *m));
      }
      const auto hc = Matrix<Real>::identity(4) * uniform(rng, -1, 1) + t * uniform(rng, -1, 1) +
                      t * t * uniform(rng, -1, 1);
      const auto fc = monomial_differential_forms(n, t, hc);
      const auto collapsed = hc * matrix_power(t, n - 1) * static_cast<double>(n);
      for (const auto* m : {&fc.direct, &fc.power_commutant, &fc.binomial, &fc.weighted_commutant}) {
        worst_commuting = std::max(worst_commuting, relative_difference(*m, collapsed));
      }
    }
  }
  report("AC2", worst <= 1e-12 && worst_commuting <= 1e-13,
         "monomial forms n=2..12: max rel diff " + fmt("%.3e", worst) + " (<= 1e-12), commuting " +
             fmt("%.3e", worst_commuting) + " (<= 1e-13)");
}

// AC3: identity suite.
void ac3() {
  double worst = 0.0;
  for (std::size_t dim = 1; dim <= 8; ++dim) {
    IdentitySuiteOptions opts;
    opts.trials = 200;
    opts.dim = dim;
    opts.seed = 3000 + dim;
    for (const auto& r : run_identity_suite<Real>(opts)) worst = std::max(worst, r.max_scaled_residual);
    for (const auto& r : run_identity_suite<Complex>(opts)) worst = std::max(worst, r.max_scaled_residual);
  }
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::size_t s = 1; s <= n; ++s) {
      const auto r = binomial_sum_identity(n, s);
      if (r.lhs != r.rhs) ++mismatches;
    }
  }
  report("AC3", worst <= 1e-10 && mismatches == 0,
         "identity suite dims 1..8 x 200 trials: max scaled residual " + fmt("%.3e", worst) +
             " (<= 1e-10); binomial sum mismatches " + std::to_string(mismatches) + " (== 0)");
}

// AC4: oracle agreement.
void ac4() {
  Rng rng(4004);
  const TruncationPolicy policy;
  double worst_fd = 0.0, worst_block = 0.0, worst_resolvent = 0.0, min_slope = kInfinity;
  for (auto name : kBuiltinSeriesNames) {
    const auto g = builtin_series<Real>(name);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t dim = 2 + trial % 4;
      const auto t = random_matrix_with_norm<Real>(dim, uniform(rng, 0.05, 0.3), rng);
      auto h = random_matrix<Real>(dim, rng);
      h = h * (1.0 / algebra_norm(h));
      const auto direct = frechet_direct(g, t, h, policy).value;
      const auto block = block_triangular_differential(g, t, h, policy);
      worst_fd = std::max(worst_fd, relative_difference(
                                        direct, fd_differential(g, t, h, kDefaultFiniteDifferenceStep, policy)));
      worst_block = std::max(worst_block, relative_difference(direct, block));
      if (name == std::string("exp") && trial < 3) {
        std::vector<double> xs, ys;
        for (double delta : {1e-2, 1e-3, 1e-4}) {
          xs.push_back(std::log10(delta));
          ys.push_back(std::log10(algebra_norm(fd_differential(g, t, h, delta, policy) - block)));
        }
        const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
        double num = 0, den = 0;
        for (int i = 0; i < 3; ++i) {
          num += (xs[i] - mx) * (ys[i] - my);
          den += (xs[i] - mx) * (xs[i] - mx);
        }
        min_slope = std::min(min_slope, num / den);
      }
    }
  }
  const auto geo = builtin_series<Real>("geometric");
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 2 + trial % 5;
    const auto t = random_matrix_with_norm<Real>(dim, uniform(rng, 0.05, 0.4), rng);
    const auto h = random_matrix<Real>(dim, rng);
    const auto oracle = resolvent_differential(t, h);
    for (Algorithm a : kAllAlgorithms) {
      if (a == Algorithm::DerivativeSeriesForm && !(algebra_norm(t) < 1.0 / 3.0)) continue;
      worst_resolvent =
          std::max(worst_resolvent, relative_difference(frechet_differential(a, geo, t, h, policy).value, oracle));
    }
  }
  report("AC4",
         worst_fd <= 1e-6 && worst_block <= 1e-9 && worst_resolvent <= 1e-9 && min_slope >= 1.9,
         "oracles: fd " + fmt("%.3e", worst_fd) + " (<= 1e-6), block " + fmt("%.3e", worst_block) +
             " (<= 1e-9), resolvent " + fmt("%.3e", worst_resolvent) + " (<= 1e-9), fd slope " +
             fmt("%.3f", min_slope) + " (>= 1.9)");
}

// AC5: monomial norm bound.
void ac5() {
  Rng rng(5005);
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const std::size_t dim = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const auto t = random_matrix<Complex>(dim, rng);
    const auto h = random_matrix<Complex>(dim, rng);
    const double bound =
        static_cast<double>(n) * std::pow(algebra_norm(t), static_cast<double>(n - 1)) * algebra_norm(h);
    const double value = algebra_norm(monomial_differential(n, t, h));
    worst_ratio = std::max(worst_ratio, value / bound);
    if (value > bound * (1 + 1e-12)) ++violations;
  }
  report("AC5", violations == 0,
         "norm bound over 500 cases: violations " + std::to_string(violations) +
             ", max ratio " + fmt("%.4f", worst_ratio));
}

// AC6: commuting collapse.
void ac6() {
  Rng rng(6006);
  const TruncationPolicy policy;
  double worst = 0.0;
  for (auto name : kBuiltinSeriesNames) {
    const auto g = builtin_series<Complex>(name);
    const auto dg = g.derivative(1);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t dim = 2 + trial % 4;
      const auto t = random_matrix_with_norm<Complex>(dim, uniform(rng, 0.01, 0.25), rng);
      const auto h = Matrix<Complex>::identity(dim) * Complex(2.0) + t * Complex(3.0) + t * t;
      const auto expected = eval_matrix(dg, t, policy).value * h;
      for (Algorithm a : kAllAlgorithms) {
        worst = std::max(worst, relative_difference(frechet_differential(a, g, t, h, policy).value, expected));
      }
    }
  }
  report("AC6", worst <= 1e-9, "commuting collapse: max rel diff " + fmt("%.3e", worst) + " (<= 1e-9)");
}

// AC7: R/3 guard.
void ac7() {
  Rng rng(7007);
  const TruncationPolicy policy;
  std::size_t wrong_guard = 0, wrong_compare = 0, cases = 0;
  for (auto name : {"geometric", "log1p", "atan"}) {
    const auto g = builtin_series<Real>(name);
    for (double ratio : {1.0 / 3.0, 0.34, 0.5, 0.9}) {
      Matrix<Real> t(1);
      t(0, 0) = ratio * g.radius();
      try {
        frechet_derivative_series(g, t, Matrix<Real>::identity(1), policy);
        ++wrong_guard;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::outside_third_radius) ++wrong_guard;
      }
    }
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t dim = 2 + trial % 3;
      const auto t = random_matrix_with_norm<Real>(dim, uniform(rng, 0.41, 0.99) * g.radius(), rng);
      const auto h = random_matrix<Real>(dim, rng);
      const auto cmp = frechet_compare(g, t, h, policy);
      ++cases;
      if (cmp.results.size() != 3 || cmp.skipped.size() != 1 ||
          cmp.skipped[0].algorithm != Algorithm::DerivativeSeriesForm) {
        ++wrong_compare;
      }
    }
  }
  report("AC7", wrong_guard == 0 && wrong_compare == 0,
         "R/3 guard: wrong guard outcomes " + std::to_string(wrong_guard) + ", compare cases " +
             std::to_string(cases) + " with wrong shape " + std::to_string(wrong_compare));
}

// AC8: curve derivative.
void ac8() {
  Rng rng(8008);
  const TruncationPolicy policy;
  double worst = 0.0;
  std::size_t evaluated = 0;
  for (auto name : {"exp", "log1p", "sin"}) {
    const auto g = builtin_series<Real>(name);
    const auto a = random_matrix_with_norm<Real>(3, 1.0, rng);
    const auto b = random_matrix_with_norm<Real>(3, 1.0, rng);
    const auto curve = polynomial_curve<Real>({Matrix<Real>::zero(3), a, b});
    const double t_max = std::isinf(g.radius()) ? 1.0 : 0.2;
    for (int k = 0; k < 10; ++k) {
      const double t = -t_max + 2.0 * t_max * (k + 0.5) / 10.0;
      if (!(algebra_norm(curve.value_at(t)) < g.radius() / 3.0)) continue;
      const auto r = curve_derivative(g, curve, t, policy).value;
      const double step = 1e-5;
      const auto fd = (eval_matrix(g, curve.value_at(t + step), policy).value -
                       eval_matrix(g, curve.value_at(t - step), policy).value) *
                      (1.0 / (2.0 * step));
      worst = std::max(worst, relative_difference(r, fd));
      ++evaluated;
    }
  }
  report("AC8", worst <= 1e-6 && evaluated == 30,
         "curve derivative at " + std::to_string(evaluated) + " points: max rel diff vs fd " +
             fmt("%.3e", worst) + " (<= 1e-6)");
}

// AC9: integral identity.
void ac9() {
  Rng rng(9009);
  const TruncationPolicy policy;
  double worst = 0.0;
  for (auto name : {"exp", "geometric"}) {
    const auto g = builtin_series<Real>(name);
    const double reach = std::isinf(g.radius()) ? 2.0 : 0.9 * g.radius();
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t dim = 2 + trial % 4;
      const double w_norm = uniform(rng, 0.2, 2.0);
      const auto w = random_matrix_with_norm<Real>(dim, w_norm, rng);
      const double u_max = reach / w_norm;
      const double u1 = uniform(rng, -u_max, u_max);
      const double u2 = uniform(rng, -u_max, u_max);
      worst = std::max(worst, integral_identity_check(g, w, u1, u2, policy).residual);
    }
  }
  report("AC9", worst <= 1e-8, "integral identity over 40 cases: max residual " + fmt("%.3e", worst) +
                                   " (<= 1e-8)");
}

// AC10: CLI determinism and goldens.
void ac10() {
  std::size_t differing = 0, golden_mismatch = 0;
  for (const auto& command : cli::command_names()) {
    const std::string base = std::string(FRECHET_GOLDEN_DIR) + "/" + command;
    std::string first, second, golden;
    try {
      const auto body = json_io::parse(json_io::read_file(base + ".request.json"), "request");
      first = cli::render(cli::run(cli::CommandRequest{body}));
      second = cli::render(cli::run(cli::CommandRequest{body}));
      golden = json_io::read_file(base + ".report.json");
    } catch (const Error& e) {
      std::printf("  %s: %s\n", command.c_str(), e.what());
      ++golden_mismatch;
      continue;
    }
    if (first != second) ++differing;
    if (first != golden) {
      std::printf("  %s: report differs from golden\n", command.c_str());
      ++golden_mismatch;
    }
  }
  report("AC10", differing == 0 && golden_mismatch == 0,
         "CLI: " + std::to_string(cli::command_names().size()) + " commands, nondeterministic " +
             std::to_string(differing) + ", golden mismatches " + std::to_string(golden_mismatch));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report("AC?", false, std::string("unexpected exception: ") + e.what());
    }
  }
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
