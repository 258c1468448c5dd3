#pragma once

/**
 * @file identities.hpp
 * @brief Executable forms of the algebraic identities behind the expansions.
 *
 * Each matrix identity returns its two sides evaluated independently; the
 * suite runner checks them on seeded random inputs. Residuals are also
 * reported scaled by 1 + (product of the input norms with multiplicity),
 * since the raw residual grows with the size of the inputs.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frechet/algebra.hpp"
#include "frechet/error.hpp"
#include "frechet/random.hpp"

namespace frechet {

template <FieldScalar S>
struct IdentitySides {
  Matrix<S> lhs;
  Matrix<S> rhs;
};

/// [A_1 ... A_(n+1), B] against Σ_s (A_1..A_s) [A_(s+1), B] (A_(s+2)..A_(n+1)),
/// with [X, Y] = XY - YX and empty products equal to the identity.
template <FieldScalar S>
IdentitySides<S> product_commutator_expansion(const std::vector<Matrix<S>>& factors,
                                              const Matrix<S>& b) {
  if (factors.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "product commutator expansion needs >= 2 factors");
  }
  for (const auto& a : factors) require_same_dim(a, b);
  const std::size_t dim = b.dim();
  const std::size_t count = factors.size();
  auto bracket = [](const Matrix<S>& x, const Matrix<S>& y) { return x * y - y * x; };

  Matrix<S> product = Matrix<S>::identity(dim);
  for (const auto& a : factors) product = product * a;
  Matrix<S> lhs = bracket(product, b);

  // suffix[i] = A_(i+1) ... A_count (0-based: factors[i..])
  std::vector<Matrix<S>> suffix(count + 1, Matrix<S>::identity(dim));
  for (std::size_t i = count; i-- > 0;) suffix[i] = factors[i] * suffix[i + 1];

  Matrix<S> rhs = Matrix<S>::zero(dim);
  Matrix<S> prefix = Matrix<S>::identity(dim);
  for (std::size_t s = 0; s < count; ++s) {
    rhs += prefix * bracket(factors[s], b) * suffix[s + 1];
    prefix = prefix * factors[s];
  }
  return {std::move(lhs), std::move(rhs)};
}

/// C(T^(n+1))(h) against Σ_(s=0..n) T^s C(T)(h) T^(n-s).
template <FieldScalar S>
IdentitySides<S> power_commutant_decomposition(const Matrix<S>& t, const Matrix<S>& h,
                                               std::size_t n) {
  require_same_dim(t, h);
  const Matrix<S> tn1 = matrix_power(t, n + 1);
  Matrix<S> lhs = h * tn1 - tn1 * h;
  const Matrix<S> c = h * t - t * h;
  Matrix<S> rhs = Matrix<S>::zero(t.dim());
  for (std::size_t s = 0; s <= n; ++s) {
    rhs += matrix_power(t, s) * c * matrix_power(t, n - s);
  }
  return {std::move(lhs), std::move(rhs)};
}

/// Pascal-triangle binomials C(n, k) for n <= kMaxExactBinomial, exact in 64 bits.
inline constexpr std::size_t kMaxExactBinomial = 60;

inline std::uint64_t exact_binomial(std::size_t n, std::size_t k) {
  static const auto table = [] {
    std::vector<std::vector<std::uint64_t>> rows(kMaxExactBinomial + 1);
    for (std::size_t i = 0; i <= kMaxExactBinomial; ++i) {
      rows[i].assign(i + 1, 1);
      for (std::size_t j = 1; j < i; ++j) {
        std::uint64_t v = 0;
        if (__builtin_add_overflow(rows[i - 1][j - 1], rows[i - 1][j], &v)) {
          throw Error(ErrorCode::invalid_argument, "binomial overflow");
        }
        rows[i][j] = v;
      }
    }
    return rows;
  }();
  if (n > kMaxExactBinomial || k > n) {
    throw Error(ErrorCode::invalid_argument,
                "binomial C(" + std::to_string(n) + ", " + std::to_string(k) + ") out of range");
  }
  return table[n][k];
}

/// C(T)^n(h) by nesting against Σ_k (-1)^k C(n,k) T^k h T^(n-k).
template <FieldScalar S>
IdentitySides<S> commutant_power_binomial(const Matrix<S>& t, const Matrix<S>& h,
                                          std::size_t n) {
  require_same_dim(t, h);
  Matrix<S> lhs = apply_commutant_power(t, h, n);
  Matrix<S> rhs = Matrix<S>::zero(t.dim());
  for (std::size_t k = 0; k <= n; ++k) {
    const double c = static_cast<double>(exact_binomial(n, k)) * (k % 2 == 0 ? 1.0 : -1.0);
    rhs += (matrix_power(t, k) * h * matrix_power(t, n - k)) * S(c);
  }
  return {std::move(lhs), std::move(rhs)};
}

struct IntegerSides {
  std::uint64_t lhs = 0;
  std::uint64_t rhs = 0;
};

/// Σ_(p=s..n) C(p-1, s-1) against C(n, s), exact.
inline IntegerSides binomial_sum_identity(std::size_t n, std::size_t s) {
  if (s < 1 || s > n) {
    throw Error(ErrorCode::invalid_argument, "binomial sum identity needs 1 <= s <= n");
  }
  IntegerSides out;
  for (std::size_t p = s; p <= n; ++p) {
    if (__builtin_add_overflow(out.lhs, exact_binomial(p - 1, s - 1), &out.lhs)) {
      throw Error(ErrorCode::invalid_argument, "binomial sum overflow");
    }
  }
  out.rhs = exact_binomial(n, s);
  return out;
}

/// Σ_(p=1..n) C(n,p) T^(n-p) C(T)^(p-1)(h) against Σ_(s=1..n) T^(n-s) h T^(s-1).
template <FieldScalar S>
IdentitySides<S> operator_sum_identity(const Matrix<S>& t, const Matrix<S>& h, std::size_t n) {
  require_same_dim(t, h);
  if (n < 1) {
    throw Error(ErrorCode::invalid_argument, "operator sum identity needs n >= 1");
  }
  Matrix<S> lhs = Matrix<S>::zero(t.dim());
  for (std::size_t p = 1; p <= n; ++p) {
    lhs += (matrix_power(t, n - p) * apply_commutant_power(t, h, p - 1)) *
           S(static_cast<double>(exact_binomial(n, p)));
  }
  Matrix<S> rhs = Matrix<S>::zero(t.dim());
  for (std::size_t s = 1; s <= n; ++s) {
    rhs += matrix_power(t, n - s) * h * matrix_power(t, s - 1);
  }
  return {std::move(lhs), std::move(rhs)};
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 5> kIdentityNames = {
    "product_commutator_expansion", "power_commutant_decomposition", "commutant_power_binomial",
    "binomial_sum_identity", "operator_sum_identity"};

template <FieldScalar S>
struct IdentityReport {
  std::string identity;
  double max_abs_residual = 0.0;
  double max_scaled_residual = 0.0;
  std::size_t trials = 0;
  /// Inputs of the worst trial (first entry is T or B, then h or the factors).
  std::vector<Matrix<S>> worst_case;
};

struct IdentitySuiteOptions {
  std::size_t trials = 100;
  std::size_t dim = 4;
  std::uint64_t seed = 42;
  std::size_t max_power = 10;
  std::size_t max_factors = 5;
  std::size_t max_binomial = 40;
};

namespace detail {

template <FieldScalar S>
void record(IdentityReport<S>& report, const IdentitySides<S>& sides, double scale,
            std::vector<Matrix<S>> inputs) {
  const double r = algebra_norm(sides.lhs - sides.rhs);
  const double scaled = r / (1.0 + scale);
  if (report.trials == 0 || r > report.max_abs_residual) {
    report.worst_case = std::move(inputs);
  }
  report.max_abs_residual = std::max(report.max_abs_residual, r);
  report.max_scaled_residual = std::max(report.max_scaled_residual, scaled);
  ++report.trials;
}

}  // namespace detail

/**
 * Runs the five identities on seeded random inputs. Each trial draws its
 * inputs from a generator seeded by (seed, trial index), so the report is
 * independent of evaluation order.
 */
template <FieldScalar S>
std::vector<IdentityReport<S>> run_identity_suite(const IdentitySuiteOptions& opts) {
  if (opts.trials < 1 || opts.dim < 1) {
    throw Error(ErrorCode::invalid_argument, "identity suite needs trials >= 1 and dim >= 1");
  }
  std::vector<IdentityReport<S>> reports(kIdentityNames.size());
  for (std::size_t i = 0; i < reports.size(); ++i) reports[i].identity = kIdentityNames[i];

  for (std::size_t trial = 0; trial < opts.trials; ++trial) {
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(trial)};
    Rng rng(seq);
    auto pick = [&rng](std::size_t lo, std::size_t hi) {
      return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };

    {
      const std::size_t count = pick(2, std::max<std::size_t>(2, opts.max_factors));
      std::vector<Matrix<S>> factors;
      double scale = 1.0;
      for (std::size_t k = 0; k < count; ++k) {
        factors.push_back(random_matrix<S>(opts.dim, rng));
        scale *= algebra_norm(factors.back());
      }
      const Matrix<S> b = random_matrix<S>(opts.dim, rng);
      scale *= algebra_norm(b);
      auto inputs = factors;
      inputs.insert(inputs.begin(), b);
      detail::record(reports[0], product_commutator_expansion(factors, b), scale,
                     std::move(inputs));
    }

    const Matrix<S> t = random_matrix<S>(opts.dim, rng);
    const Matrix<S> h = random_matrix<S>(opts.dim, rng);
    const double tn = algebra_norm(t);
    const double hn = algebra_norm(h);
    {
      const std::size_t n = pick(0, opts.max_power);
      detail::record(reports[1], power_commutant_decomposition(t, h, n),
                     hn * std::pow(tn, static_cast<double>(n + 1)), {t, h});
    }
    {
      const std::size_t n = pick(0, opts.max_power);
      detail::record(reports[2], commutant_power_binomial(t, h, n),
                     hn * std::pow(tn, static_cast<double>(n)), {t, h});
    }
    {
      const std::size_t n = pick(1, opts.max_binomial);
      const std::size_t s = pick(1, n);
      const IntegerSides sides = binomial_sum_identity(n, s);
      const double r = sides.lhs == sides.rhs
                           ? 0.0
                           : std::abs(static_cast<double>(sides.lhs) -
                                      static_cast<double>(sides.rhs));
      reports[3].max_abs_residual = std::max(reports[3].max_abs_residual, r);
      reports[3].max_scaled_residual = std::max(reports[3].max_scaled_residual, r);
      ++reports[3].trials;
    }
    {
      const std::size_t n = pick(1, opts.max_power);
      detail::record(reports[4], operator_sum_identity(t, h, n),
                     hn * std::pow(tn, static_cast<double>(n - 1)), {t, h});
    }
  }
  return reports;
}

}  // namespace frechet
