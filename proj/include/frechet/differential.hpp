#pragma once

/**
 * @file differential.hpp
 * @brief Fréchet differential g^[1](T)(h) of a matrix power series.
 *
 * Four expansions are provided; all converge to the same matrix.
 *
 *   Direct:          Σ_n α_n u_n(h),  u_n(h) = Σ_(p=1..n) T^(n-p) h T^(p-1)
 *
 *   CommutantForm:   h g'(T) - Σ_(p>=0) T^p C(T)(h) Σ_(n>=p+2) (n-p-1) α_n T^(n-2-p)
 *
 *   PowerCommutantForm:
 *                    h g'(T) - Σ_(k>=2) C(T^(k-1))(h) Σ_(n>=k) α_n T^(n-k)
 *
 *   DerivativeSeriesForm (requires ‖T‖ < R/3):
 *                    Σ_(p>=1) (1/p!) g^(p)(T) C(T)^(p-1)(h)
 *
 * Here C(T)(h) = hT - Th. The first three converge on the whole ball of
 * radius R; the derivative-series form is only guaranteed on the ball of
 * radius R/3 and is rejected outside it.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "frechet/algebra.hpp"
#include "frechet/error.hpp"
#include "frechet/quadrature.hpp"
#include "frechet/series.hpp"

namespace frechet {

enum class Algorithm { Direct, CommutantForm, PowerCommutantForm, DerivativeSeriesForm };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Direct, Algorithm::CommutantForm,
                                               Algorithm::PowerCommutantForm,
                                               Algorithm::DerivativeSeriesForm};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Direct: return "direct";
    case Algorithm::CommutantForm: return "commutant";
    case Algorithm::PowerCommutantForm: return "power-commutant";
    case Algorithm::DerivativeSeriesForm: return "derivative-series";
  }
  return "unknown";
}

template <FieldScalar S>
struct DifferentialResult {
  Matrix<S> value;
  Algorithm algorithm;
  EvalDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

/// u_n^[1](T)(h) = Σ_(p=1..n) T^(n-p) h T^(p-1), summed term by term.
template <FieldScalar S>
Matrix<S> monomial_differential(std::size_t n, const Matrix<S>& t, const Matrix<S>& h) {
  require_same_dim(t, h);
  Matrix<S> acc = Matrix<S>::zero(t.dim());
  for (std::size_t p = 1; p <= n; ++p) {
    acc += matrix_power(t, n - p) * h * matrix_power(t, p - 1);
  }
  return acc;
}

template <FieldScalar S>
struct MonomialForms {
  Matrix<S> direct;             // Σ T^(n-p) h T^(p-1)
  Matrix<S> power_commutant;    // n hT^(n-1) - Σ_(k=2..n) C(T^(k-1))(h) T^(n-k)
  Matrix<S> binomial;           // Σ C(n,p) T^(n-p) C(T)^(p-1)(h)
  Matrix<S> weighted_commutant; // n hT^(n-1) - Σ_(s=0..n-2) (n-s-1) T^s C(T)(h) T^(n-2-s)
};

/// The four equal expressions for u_n^[1](T)(h), n >= 2.
template <FieldScalar S>
MonomialForms<S> monomial_differential_forms(std::size_t n, const Matrix<S>& t,
                                             const Matrix<S>& h) {
  require_same_dim(t, h);
  if (n < 2) {
    throw Error(ErrorCode::invalid_argument, "monomial forms need n >= 2");
  }
  const std::size_t dim = t.dim();
  std::vector<Matrix<S>> pw;
  pw.reserve(n + 1);
  pw.push_back(Matrix<S>::identity(dim));
  for (std::size_t k = 1; k <= n; ++k) pw.push_back(pw.back() * t);

  Matrix<S> direct = Matrix<S>::zero(dim);
  for (std::size_t p = 1; p <= n; ++p) direct += pw[n - p] * h * pw[p - 1];

  const Matrix<S> lead = static_cast<double>(n) * (h * pw[n - 1]);

  Matrix<S> second = lead;
  for (std::size_t k = 2; k <= n; ++k) {
    second -= apply_commutant(pw[k - 1], h) * pw[n - k];
  }

  // Binomial form, accumulated in extended precision and rounded once.
  using Wide = std::conditional_t<std::is_same_v<S, Real>, long double, std::complex<long double>>;
  using WideStorage = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;
  const WideStorage wt = t.storage().template cast<Wide>();
  std::vector<WideStorage> wpw{WideStorage::Identity(wt.rows(), wt.cols())};
  for (std::size_t k = 1; k <= n; ++k) wpw.push_back(wpw.back() * wt);
  WideStorage wide_third = WideStorage::Zero(wt.rows(), wt.cols());
  WideStorage nested = h.storage().template cast<Wide>();  // C(T)^(p-1)(h)
  long double binom = static_cast<long double>(n);         // C(n, 1)
  for (std::size_t p = 1; p <= n; ++p) {
    wide_third += Wide(binom) * (wpw[n - p] * nested);
    nested = (nested * wt - wt * nested).eval();
    binom = binom * static_cast<long double>(n - p) / static_cast<long double>(p + 1);
  }
  Matrix<S> third(typename Matrix<S>::Storage(wide_third.template cast<S>()));

  const Matrix<S> ch = apply_commutant(t, h);
  Matrix<S> fourth = lead;
  for (std::size_t s = 0; s + 2 <= n; ++s) {
    fourth -= static_cast<double>(n - s - 1) * (pw[s] * ch * pw[n - 2 - s]);
  }
  return {std::move(direct), std::move(second), std::move(third), std::move(fourth)};
}

// ---------------------------------------------------------------------------
// Series algorithms
// ---------------------------------------------------------------------------

namespace detail {

template <FieldScalar S>
double require_in_radius(const PowerSeries<S>& g, const Matrix<S>& t, const Matrix<S>& h) {
  require_same_dim(t, h);
  const double s = algebra_norm(t);
  if (!(s < g.radius())) {
    throw Error(ErrorCode::outside_radius, "‖T‖ = " + std::to_string(s) +
                                               " is not below the radius of convergence " +
                                               std::to_string(g.radius()));
  }
  return s;
}

// Inner series truncated so that its Value tail, scaled by `weight`, stays
// below `tol`. Returns the truncation plan.
template <FieldScalar S>
TruncationPlan inner_plan(const PowerSeries<S>& inner, double s, double weight, double tol,
                          const TruncationPolicy& policy) {
  const double scaled_tol = weight > 0.0 ? tol / weight : kInfinity;
  if (!std::isfinite(scaled_tol)) {
    return TruncationPlan{0, 0.0, false};
  }
  return truncation_plan(inner, s, policy.with_bound(BoundKind::Value).with_tolerance(scaled_tol));
}

// h g'(T), the leading sum Σ n α_n h T^(n-1) shared by both commutant forms.
template <FieldScalar S>
Matrix<S> leading_term(const PowerSeries<S>& g, PowerTable<S>& powers, const Matrix<S>& h,
                       double s, double tol, const TruncationPolicy& policy,
                       EvalDiagnostics& diag) {
  const PowerSeries<S> dg = g.derivative(1);
  const TruncationPlan plan =
      truncation_plan(dg, s, policy.with_bound(BoundKind::Value).with_tolerance(tol));
  diag.tail_bound += plan.tail;
  diag.cap_hit = diag.cap_hit || plan.cap_hit;
  diag.inner_terms = std::max(diag.inner_terms, plan.index);
  return h * sum_on_powers(dg, powers, plan.index);
}

}  // namespace detail

/// Σ_(n=1..N) α_n u_n(h) with N from the first-derivative majorant.
template <FieldScalar S>
DifferentialResult<S> frechet_direct(const PowerSeries<S>& g, const Matrix<S>& t,
                                     const Matrix<S>& h, const TruncationPolicy& policy) {
  const double s = detail::require_in_radius(g, t, h);
  const TruncationPlan plan =
      truncation_plan(g, s, policy.with_bound(BoundKind::FirstDerivative));

  const std::size_t dim = t.dim();
  Matrix<S> acc = Matrix<S>::zero(dim);
  Matrix<S> u = h;                            // u_n(h)
  Matrix<S> tn = t;                           // T^n
  for (std::size_t n = 1; n <= plan.index; ++n) {
    const S a = g.coefficient(n);
    if (a != S(0)) acc.storage().noalias() += a * u.storage();
    if (n == plan.index) break;
    // u_(n+1)(h) = u_n(h) T + T^n h
    u = u * t + tn * h;
    tn = tn * t;
  }
  EvalDiagnostics d;
  d.terms_used = plan.index;
  d.tail_bound = plan.tail;
  d.ball_radius_used = s;
  d.cap_hit = plan.cap_hit;
  return {std::move(acc), Algorithm::Direct, d};
}

/**
 * Commutant expansion with the weighted inner sums
 * Σ_(n>=p+2) (n-p-1) α_n T^(n-2-p). The outer index p is truncated with the
 * second-order majorant: the terms with p > P only involve n >= P+3.
 */
template <FieldScalar S>
DifferentialResult<S> frechet_commutant(const PowerSeries<S>& g, const Matrix<S>& t,
                                        const Matrix<S>& h, const TruncationPolicy& policy) {
  const double s = detail::require_in_radius(g, t, h);
  const double h_norm = algebra_norm(h);
  EvalDiagnostics d;
  d.ball_radius_used = s;
  PowerTable<S> powers(t);
  const double tol = policy.tolerance / 3.0;

  Matrix<S> acc = detail::leading_term(g, powers, h, s, tol, policy, d);

  const TruncationPlan outer =
      truncation_plan(g, s, policy.with_bound(BoundKind::SecondOrder).with_tolerance(tol));
  d.tail_bound += outer.tail;
  d.cap_hit = d.cap_hit || outer.cap_hit;
  const std::size_t outer_count = outer.index >= 2 ? outer.index - 1 : 0;  // p = 0..N-2
  d.terms_used = outer.index;

  Matrix<S> x = apply_commutant(t, h);  // T^p C(T)(h)
  for (std::size_t p = 0; p < outer_count; ++p) {
    const double x_norm = algebra_norm(x);
    if (x_norm == 0.0) break;
    const PowerSeries<S> inner =
        g.shifted(p + 2, [](std::size_t m) { return static_cast<double>(m + 1); });
    const double weight = h_norm > 0.0 ? x_norm / h_norm : 0.0;
    const TruncationPlan ip =
        detail::inner_plan(inner, s, weight, tol / static_cast<double>(outer_count), policy);
    d.tail_bound += ip.tail * weight;
    d.cap_hit = d.cap_hit || ip.cap_hit;
    d.inner_terms = std::max(d.inner_terms, ip.index);
    acc -= x * sum_on_powers(inner, powers, ip.index);
    x = t * x;
  }
  return {std::move(acc), Algorithm::CommutantForm, d};
}

/**
 * Expansion in the commutants C(T^(k-1))(h) = hT^(k-1) - T^(k-1)h with inner
 * sums Σ_(n>=k) α_n T^(n-k). The outer index is truncated with the
 * second-order majorant.
 */
template <FieldScalar S>
DifferentialResult<S> frechet_power_commutant(const PowerSeries<S>& g, const Matrix<S>& t,
                                              const Matrix<S>& h,
                                              const TruncationPolicy& policy) {
  const double s = detail::require_in_radius(g, t, h);
  const double h_norm = algebra_norm(h);
  EvalDiagnostics d;
  d.ball_radius_used = s;
  PowerTable<S> powers(t);
  const double tol = policy.tolerance / 3.0;

  Matrix<S> acc = detail::leading_term(g, powers, h, s, tol, policy, d);

  const TruncationPlan outer =
      truncation_plan(g, s, policy.with_bound(BoundKind::SecondOrder).with_tolerance(tol));
  d.tail_bound += outer.tail;
  d.cap_hit = d.cap_hit || outer.cap_hit;
  d.terms_used = outer.index;
  const std::size_t outer_count = outer.index >= 2 ? outer.index - 1 : 0;  // k = 2..N

  for (std::size_t k = 2; k <= outer.index; ++k) {
    const Matrix<S>& tk = powers[k - 1];
    Matrix<S> y = apply_commutant(tk, h);
    const double y_norm = algebra_norm(y);
    if (y_norm == 0.0) continue;
    const PowerSeries<S> inner = g.shifted(k, [](std::size_t) { return 1.0; });
    const double weight = h_norm > 0.0 ? y_norm / h_norm : 0.0;
    const TruncationPlan ip =
        detail::inner_plan(inner, s, weight, tol / static_cast<double>(outer_count), policy);
    d.tail_bound += ip.tail * weight;
    d.cap_hit = d.cap_hit || ip.cap_hit;
    d.inner_terms = std::max(d.inner_terms, ip.index);
    acc -= y * sum_on_powers(inner, powers, ip.index);
  }
  return {std::move(acc), Algorithm::PowerCommutantForm, d};
}

/**
 * Σ_(p=1..P) (1/p!) g^(p)(T) K_(p-1) with K_0 = h, K_p = C(T)(K_(p-1)).
 * Only valid for ‖T‖ < R/3; P comes from the majorant s^-1 Σ |α_n| (3s)^n.
 */
template <FieldScalar S>
DifferentialResult<S> frechet_derivative_series(const PowerSeries<S>& g, const Matrix<S>& t,
                                                const Matrix<S>& h,
                                                const TruncationPolicy& policy) {
  require_same_dim(t, h);
  const double s = algebra_norm(t);
  if (!(s < g.radius() / 3.0)) {
    throw Error(ErrorCode::outside_third_radius,
                "‖T‖ = " + std::to_string(s) + " is not below R/3 = " +
                    std::to_string(g.radius() / 3.0) +
                    "; the derivative-series expansion may not converge there");
  }
  const double h_norm = algebra_norm(h);
  EvalDiagnostics d;
  d.ball_radius_used = s;
  PowerTable<S> powers(t);
  const double tol = policy.tolerance / 2.0;

  const TruncationPlan outer = truncation_plan(g, s, policy.with_bound(BoundKind::ThreeS).with_tolerance(tol));
  d.cap_hit = outer.cap_hit;
  d.terms_used = outer.index;

  Matrix<S> acc = Matrix<S>::zero(t.dim());
  Matrix<S> k = h;
  bool exhausted = false;
  for (std::size_t p = 1; p <= outer.index; ++p) {
    const double k_norm = algebra_norm(k);
    if (k_norm == 0.0) {
      // Every later nested commutant vanishes too; the outer sum is exact.
      exhausted = true;
      break;
    }
    const PowerSeries<S> taylor = g.taylor_coefficient(p);
    const double weight = h_norm > 0.0 ? k_norm / h_norm : 0.0;
    const TruncationPlan ip =
        detail::inner_plan(taylor, s, weight, tol / static_cast<double>(outer.index), policy);
    d.tail_bound += ip.tail * weight;
    d.cap_hit = d.cap_hit || ip.cap_hit;
    d.inner_terms = std::max(d.inner_terms, ip.index);
    acc += sum_on_powers(taylor, powers, ip.index) * k;
    k = apply_commutant(t, k);
  }
  if (!exhausted && !(outer.index > 0 && algebra_norm(k) == 0.0)) {
    d.tail_bound += outer.tail;
  }
  return {std::move(acc), Algorithm::DerivativeSeriesForm, d};
}

template <FieldScalar S>
DifferentialResult<S> frechet_differential(Algorithm algorithm, const PowerSeries<S>& g,
                                           const Matrix<S>& t, const Matrix<S>& h,
                                           const TruncationPolicy& policy) {
  switch (algorithm) {
    case Algorithm::Direct: return frechet_direct(g, t, h, policy);
    case Algorithm::CommutantForm: return frechet_commutant(g, t, h, policy);
    case Algorithm::PowerCommutantForm: return frechet_power_commutant(g, t, h, policy);
    case Algorithm::DerivativeSeriesForm: return frechet_derivative_series(g, t, h, policy);
  }
  throw Error(ErrorCode::invalid_argument, "unknown algorithm");
}

/// Norms of the derivative-series terms and partial sums, without the R/3
/// guard. Diagnostic only: beyond R/3 the series may or may not converge.
struct GrowthProbe {
  std::vector<double> term_norms;
  std::vector<double> partial_sum_norms;
};

template <FieldScalar S>
GrowthProbe derivative_series_growth(const PowerSeries<S>& g, const Matrix<S>& t,
                                     const Matrix<S>& h, std::size_t terms,
                                     const TruncationPolicy& policy) {
  const double s = detail::require_in_radius(g, t, h);
  PowerTable<S> powers(t);
  GrowthProbe probe;
  Matrix<S> acc = Matrix<S>::zero(t.dim());
  Matrix<S> k = h;
  for (std::size_t p = 1; p <= terms; ++p) {
    const PowerSeries<S> taylor = g.taylor_coefficient(p);
    const TruncationPlan ip =
        truncation_plan(taylor, s, policy.with_bound(BoundKind::Value));
    const Matrix<S> term = sum_on_powers(taylor, powers, ip.index) * k;
    acc += term;
    probe.term_norms.push_back(algebra_norm(term));
    probe.partial_sum_norms.push_back(algebra_norm(acc));
    k = apply_commutant(t, k);
  }
  return probe;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct SkipRecord {
  Algorithm algorithm;
  std::string reason;
};

struct PairwiseDifference {
  Algorithm first;
  Algorithm second;
  double relative_difference;
};

template <FieldScalar S>
struct CompareReport {
  std::vector<DifferentialResult<S>> results;
  std::vector<SkipRecord> skipped;
  std::vector<PairwiseDifference> pairwise;
  double max_pairwise = 0.0;
};

/// Runs every applicable algorithm and tabulates their pairwise agreement.
template <FieldScalar S>
CompareReport<S> frechet_compare(const PowerSeries<S>& g, const Matrix<S>& t, const Matrix<S>& h,
                                 const TruncationPolicy& policy) {
  const double s = detail::require_in_radius(g, t, h);
  CompareReport<S> report;
  for (Algorithm a : kAllAlgorithms) {
    if (a == Algorithm::DerivativeSeriesForm && !(s < g.radius() / 3.0)) {
      report.skipped.push_back(
          {a, "‖T‖ = " + std::to_string(s) + " is not below R/3 = " +
                  std::to_string(g.radius() / 3.0) +
                  "; the derivative-series expansion is only guaranteed inside R/3"});
      continue;
    }
    report.results.push_back(frechet_differential(a, g, t, h, policy));
  }
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    for (std::size_t j = i + 1; j < report.results.size(); ++j) {
      const double r = relative_difference(report.results[i].value, report.results[j].value);
      report.pairwise.push_back(
          {report.results[i].algorithm, report.results[j].algorithm, r});
      report.max_pairwise = std::max(report.max_pairwise, r);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

/// A differentiable path t -> T(t) on an open interval.
template <FieldScalar S>
struct MatrixCurve {
  std::function<Matrix<S>(double)> value_at;
  std::function<Matrix<S>(double)> derivative_at;
  double lower = -kInfinity;
  double upper = kInfinity;

  bool contains(double t) const { return lower < t && t < upper; }

  /// Central-difference step used when no derivative is supplied.
  static double auto_step(double t) { return std::max(1e-6, 1e-8 * (1.0 + std::abs(t))); }
};

/// Curve whose derivative is a central difference of its value.
template <FieldScalar S>
MatrixCurve<S> curve_with_auto_derivative(std::function<Matrix<S>(double)> value_at,
                                          double lower = -kInfinity, double upper = kInfinity) {
  MatrixCurve<S> c;
  c.value_at = value_at;
  c.derivative_at = [value_at](double t) {
    const double step = MatrixCurve<S>::auto_step(t);
    return (value_at(t + step) - value_at(t - step)) * (1.0 / (2.0 * step));
  };
  c.lower = lower;
  c.upper = upper;
  return c;
}

/// T(t) = Σ_j t^j C_j with the exact derivative Σ_j j t^(j-1) C_j.
template <FieldScalar S>
MatrixCurve<S> polynomial_curve(std::vector<Matrix<S>> coefficients, double lower = -kInfinity,
                                double upper = kInfinity) {
  if (coefficients.empty()) {
    throw Error(ErrorCode::invalid_argument, "polynomial curve needs at least one coefficient");
  }
  for (const auto& c : coefficients) require_same_dim(c, coefficients.front());
  auto shared = std::make_shared<const std::vector<Matrix<S>>>(std::move(coefficients));
  MatrixCurve<S> c;
  c.value_at = [shared](double t) {
    Matrix<S> acc = shared->back();
    for (std::size_t j = shared->size() - 1; j-- > 0;) {
      acc = acc * S(t) + (*shared)[j];
    }
    return acc;
  };
  c.derivative_at = [shared](double t) {
    const std::size_t deg = shared->size() - 1;
    Matrix<S> acc = Matrix<S>::zero(shared->front().dim());
    for (std::size_t j = deg; j >= 1; --j) {
      acc = acc * S(t) + (*shared)[j] * S(static_cast<double>(j));
    }
    return acc;
  };
  c.lower = lower;
  c.upper = upper;
  return c;
}

/// d/dt g(T(t)) = Σ_(p>=1) (1/p!) g^(p)(T(t)) C(T(t))^(p-1)(T'(t)).
template <FieldScalar S>
DifferentialResult<S> curve_derivative(const PowerSeries<S>& g, const MatrixCurve<S>& curve,
                                       double t, const TruncationPolicy& policy) {
  if (!curve.contains(t)) {
    throw Error(ErrorCode::outside_domain, "t = " + std::to_string(t) +
                                               " is outside the curve domain (" +
                                               std::to_string(curve.lower) + ", " +
                                               std::to_string(curve.upper) + ")");
  }
  return frechet_derivative_series(g, curve.value_at(t), curve.derivative_at(t), policy);
}

// ---------------------------------------------------------------------------
// Integral identity along a ray
// ---------------------------------------------------------------------------

struct IntegralCheck {
  double residual = 0.0;
  std::size_t evaluations = 0;
  bool depth_limited = false;
};

/**
 * ‖W ∫_(u1..u2) g'(tW) dt - (g(u2 W) - g(u1 W))‖ with adaptive Simpson
 * quadrature of the matrix-valued integrand.
 */
template <FieldScalar S>
IntegralCheck integral_identity_check(const PowerSeries<S>& g, const Matrix<S>& w, double u1,
                                      double u2, const TruncationPolicy& policy,
                                      const SimpsonOptions& quad = {}) {
  const double w_norm = algebra_norm(w);
  if (w_norm == 0.0) {
    throw Error(ErrorCode::invalid_argument, "W must be nonzero");
  }
  for (double u : {u1, u2}) {
    if (!(std::abs(u) * w_norm < g.radius())) {
      throw Error(ErrorCode::outside_domain,
                  "|u| ‖W‖ = " + std::to_string(std::abs(u) * w_norm) +
                      " is not below the radius of convergence " + std::to_string(g.radius()));
    }
  }
  const PowerSeries<S> dg = g.derivative(1);
  auto integrand = [&](double t) { return eval_matrix(dg, w * S(t), policy).value; };
  auto norm = [](const Matrix<S>& m) { return algebra_norm(m); };
  SimpsonStats stats;
  Matrix<S> integral = Matrix<S>::zero(w.dim());
  if (u1 != u2) {
    integral = adaptive_simpson(integrand, norm, u1, u2, quad, &stats);
  }
  const Matrix<S> lhs = w * integral;
  const Matrix<S> rhs =
      eval_matrix(g, w * S(u2), policy).value - eval_matrix(g, w * S(u1), policy).value;
  return {algebra_norm(lhs - rhs), stats.evaluations, stats.depth_limited};
}

}  // namespace frechet
