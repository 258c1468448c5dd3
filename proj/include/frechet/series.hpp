#pragma once

/**
 * @file series.hpp
 * @brief Power series g(λ) = Σ α_n λ^n and their evaluation on matrices.
 *
 * Truncation is driven by scalar majorants. For a matrix T with s = ‖T‖ the
 * error committed by stopping at index N is bounded by the tail of one of
 *
 *   Value:            Σ |α_n| s^n
 *   FirstDerivative:  Σ n |α_n| s^(n-1)
 *   SecondOrder:      Σ n (n-1) |α_n| s^(n-1)
 *   ThreeS:           Σ |α_n| 3^n s^(n-1)
 *
 * The tail is summed numerically until the running term falls below
 * tolerance * 1e-3; the remainder past that point is dominated by a
 * geometric series with the observed term ratio.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "frechet/algebra.hpp"
#include "frechet/error.hpp"

namespace frechet {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class BoundKind { Value, FirstDerivative, SecondOrder, ThreeS };

inline const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Value: return "value";
    case BoundKind::FirstDerivative: return "first_derivative";
    case BoundKind::SecondOrder: return "second_order";
    case BoundKind::ThreeS: return "three_s";
  }
  return "unknown";
}

struct TruncationPolicy {
  double tolerance = 1e-12;
  std::size_t max_terms = 10'000;
  BoundKind bound = BoundKind::Value;

  TruncationPolicy with_bound(BoundKind kind) const {
    TruncationPolicy out = *this;
    out.bound = kind;
    return out;
  }
  TruncationPolicy with_tolerance(double tol) const {
    TruncationPolicy out = *this;
    out.tolerance = tol;
    return out;
  }
};

/// Result of a truncation search. `tail` bounds the discarded terms.
struct TruncationPlan {
  std::size_t index = 0;
  double tail = 0.0;
  bool cap_hit = false;
};

struct EvalDiagnostics {
  /// Highest series index included in the partial sum (outer index for
  /// the nested differential expansions).
  std::size_t terms_used = 0;
  /// Largest truncation index used by any inner series; zero if none.
  std::size_t inner_terms = 0;
  /// Bound on the discarded tail. For differentials this bounds the
  /// operator norm, so the error in g^[1](T)(h) is at most tail_bound*‖h‖.
  double tail_bound = 0.0;
  double ball_radius_used = 0.0;
  bool within_radius = true;
  bool cap_hit = false;
};

namespace detail {

inline const std::array<double, 200>& inverse_factorials() {
  static const std::array<double, 200> table = [] {
    std::array<double, 200> t{};
    t[0] = 1.0;
    for (std::size_t n = 1; n < t.size(); ++n) {
      t[n] = t[n - 1] / static_cast<double>(n);
    }
    return t;
  }();
  return table;
}

inline double inverse_factorial(std::size_t n) {
  const auto& t = inverse_factorials();
  return n < t.size() ? t[n] : 0.0;
}

// n (n-1) ... (n-p+1), accumulated left to right in doubles.
inline double falling_factorial(std::size_t n, std::size_t p) {
  double w = 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    w *= static_cast<double>(n - i);
  }
  return w;
}

// C(m+p, p) as a double, multiplied in a fixed order.
inline double binomial_double(std::size_t m, std::size_t p) {
  double w = 1.0;
  for (std::size_t i = 1; i <= p; ++i) {
    w = w * static_cast<double>(m + i) / static_cast<double>(i);
  }
  return w;
}

inline double log_binomial(std::size_t m, std::size_t p) {
  return std::lgamma(static_cast<double>(m + p + 1)) -
         std::lgamma(static_cast<double>(p + 1)) - std::lgamma(static_cast<double>(m + 1));
}

}  // namespace detail

/**
 * A power series with a coefficient rule and a radius of convergence.
 *
 * Derivative series are stored as (base rule, derivative order) so that
 * repeated differentiation and a single differentiation of the same total
 * order produce bit-identical coefficients.
 */
template <FieldScalar S>
class PowerSeries {
 public:
  using Rule = std::function<S(std::size_t)>;

  PowerSeries(Rule rule, double radius, std::string name = {},
              std::optional<std::size_t> degree = std::nullopt, bool radius_approximate = false)
      : base_(std::make_shared<const Rule>(std::move(rule))),
        radius_(radius),
        name_(std::move(name)),
        degree_(degree),
        radius_approximate_(radius_approximate) {
    if (!(radius > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "radius of convergence must be positive");
    }
  }

  S coefficient(std::size_t n) const {
    if (degree_ && n > *degree_) {
      return S(0);
    }
    const S base = (*base_)(n + order_);
    if (order_ == 0 || base == S(0)) {
      return base;
    }
    return base * detail::falling_factorial(n + order_, order_);
  }

  double radius() const noexcept { return radius_; }
  bool radius_approximate() const noexcept { return radius_approximate_; }
  const std::string& name() const noexcept { return name_; }
  /// Index past which every coefficient vanishes, if known.
  std::optional<std::size_t> degree() const noexcept { return degree_; }
  std::size_t derivative_order() const noexcept { return order_; }

  /// Termwise p-th derivative: β_m = α_(m+p) (m+p)!/m!. Radius unchanged.
  PowerSeries derivative(std::size_t p) const {
    PowerSeries out = *this;
    out.order_ += p;
    if (degree_) {
      if (*degree_ < p) {
        out.base_ = std::make_shared<const Rule>([](std::size_t) { return S(0); });
        out.order_ = 0;
        out.degree_ = 0;
      } else {
        out.degree_ = *degree_ - p;
      }
    }
    if (!name_.empty()) {
      out.name_ = name_ + "'" + (p == 1 ? "" : "^" + std::to_string(p));
    }
    return out;
  }

  /// Series of λ -> α_n restricted to n >= shift, re-indexed from zero and
  /// weighted: m -> weight(m) α_(m+shift). Used for the inner sums of the
  /// nested differential expansions.
  PowerSeries shifted(std::size_t shift, std::function<double(std::size_t)> weight) const {
    PowerSeries self = *this;
    Rule rule = [self, shift, weight = std::move(weight)](std::size_t m) {
      const S a = self.coefficient(m + shift);
      return a == S(0) ? a : a * weight(m);
    };
    std::optional<std::size_t> degree;
    if (degree_) {
      degree = *degree_ >= shift ? *degree_ - shift : 0;
    }
    return PowerSeries(std::move(rule), radius_, {}, degree, radius_approximate_);
  }

  /// (1/p!) g^(p): coefficients C(m+p, p) α_(m+p).
  PowerSeries taylor_coefficient(std::size_t p) const {
    return shifted(p, [p](std::size_t m) {
      const double w = detail::binomial_double(m, p);
      return std::isfinite(w) ? w : std::exp(detail::log_binomial(m, p));
    });
  }

 private:
  std::shared_ptr<const Rule> base_;
  std::size_t order_ = 0;
  double radius_;
  std::string name_;
  std::optional<std::size_t> degree_;
  bool radius_approximate_;
};

template <FieldScalar S>
PowerSeries<S> derivative_series(const PowerSeries<S>& g, std::size_t p) {
  if (p == 0) {
    throw Error(ErrorCode::invalid_argument, "derivative order must be positive");
  }
  return g.derivative(p);
}

inline constexpr std::array<std::string_view, 6> kBuiltinSeriesNames = {
    "exp", "sin", "cos", "log1p", "geometric", "atan"};

template <FieldScalar S>
PowerSeries<S> builtin_series(std::string_view name) {
  using detail::inverse_factorial;
  const std::string tag(name);
  if (name == "exp") {
    return PowerSeries<S>([](std::size_t n) { return S(inverse_factorial(n)); }, kInfinity, tag);
  }
  if (name == "sin") {
    return PowerSeries<S>(
        [](std::size_t n) {
          if (n % 2 == 0) return S(0);
          return S(((n - 1) / 2) % 2 == 0 ? inverse_factorial(n) : -inverse_factorial(n));
        },
        kInfinity, tag);
  }
  if (name == "cos") {
    return PowerSeries<S>(
        [](std::size_t n) {
          if (n % 2 == 1) return S(0);
          return S((n / 2) % 2 == 0 ? inverse_factorial(n) : -inverse_factorial(n));
        },
        kInfinity, tag);
  }
  if (name == "log1p") {
    return PowerSeries<S>(
        [](std::size_t n) {
          if (n == 0) return S(0);
          const double v = 1.0 / static_cast<double>(n);
          return S(n % 2 == 1 ? v : -v);
        },
        1.0, tag);
  }
  if (name == "geometric") {
    return PowerSeries<S>([](std::size_t) { return S(1); }, 1.0, tag);
  }
  if (name == "atan") {
    return PowerSeries<S>(
        [](std::size_t n) {
          if (n % 2 == 0) return S(0);
          const double v = 1.0 / static_cast<double>(n);
          return S(((n - 1) / 2) % 2 == 0 ? v : -v);
        },
        1.0, tag);
  }
  throw Error(ErrorCode::unknown_series, "unknown builtin series '" + tag + "'");
}

/**
 * Radius of convergence estimated from a finite coefficient window.
 *
 * Uses the last 20% of the list as a limsup proxy for |α_n|^(1/n). A window
 * whose roots decay like 1/n or faster (log-log slope below -0.5) is
 * reported as +infinity, as is any estimate above 1e12.
 */
template <FieldScalar S>
double radius_estimate(const std::vector<S>& coeffs) {
  if (coeffs.empty()) {
    throw Error(ErrorCode::invalid_argument, "radius estimate needs at least one coefficient");
  }
  const std::size_t len = coeffs.size();
  const std::size_t window = std::max<std::size_t>(2, len / 5);
  const std::size_t start = len > window ? len - window : 1;

  std::vector<std::pair<double, double>> points;  // (log n, log root)
  double max_root = 0.0;
  for (std::size_t n = std::max<std::size_t>(start, 1); n < len; ++n) {
    const double a = std::abs(coeffs[n]);
    if (a == 0.0) continue;
    const double log_root = std::log(a) / static_cast<double>(n);
    max_root = std::max(max_root, std::exp(log_root));
    points.emplace_back(std::log(static_cast<double>(n)), log_root);
  }
  if (max_root == 0.0) {
    return kInfinity;
  }
  if (points.size() >= 3) {
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : points) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : points) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    if (sxx > 0.0 && sxy / sxx < -0.5) {
      return kInfinity;
    }
  }
  const double r = 1.0 / max_root;
  return r > 1e12 ? kInfinity : r;
}

/// A polynomial from an explicit coefficient list. Without a radius the
/// radius is estimated and flagged approximate.
template <FieldScalar S>
PowerSeries<S> series_from_coefficients(std::vector<S> coeffs, std::optional<double> radius) {
  if (coeffs.empty()) {
    throw Error(ErrorCode::invalid_argument, "coefficient list is empty");
  }
  const bool approximate = !radius.has_value();
  const double r = radius ? *radius : radius_estimate(coeffs);
  const std::size_t degree = coeffs.size() - 1;
  auto shared = std::make_shared<const std::vector<S>>(std::move(coeffs));
  return PowerSeries<S>(
      [shared](std::size_t n) { return n < shared->size() ? (*shared)[n] : S(0); }, r, {},
      degree, approximate);
}

namespace detail {

inline std::size_t first_majorant_index(BoundKind kind) {
  switch (kind) {
    case BoundKind::Value: return 0;
    case BoundKind::FirstDerivative: return 1;
    case BoundKind::SecondOrder: return 2;
    case BoundKind::ThreeS: return 1;
  }
  return 0;
}

// n-th term of the selected majorant, evaluated in log space so that
// intermediate powers cannot overflow.
template <FieldScalar S>
double majorant_term(const PowerSeries<S>& g, BoundKind kind, std::size_t n, double s) {
  const double a = std::abs(g.coefficient(n));
  if (a == 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  double factor_log = 0.0;
  double exponent = nd;
  switch (kind) {
    case BoundKind::Value:
      break;
    case BoundKind::FirstDerivative:
      factor_log = std::log(nd);
      exponent = nd - 1.0;
      break;
    case BoundKind::SecondOrder:
      factor_log = std::log(nd) + std::log(nd - 1.0);
      exponent = nd - 1.0;
      break;
    case BoundKind::ThreeS:
      factor_log = nd * std::log(3.0);
      exponent = nd - 1.0;
      break;
  }
  if (s == 0.0) {
    return exponent == 0.0 ? a * std::exp(factor_log) : 0.0;
  }
  return std::exp(std::log(a) + factor_log + exponent * std::log(s));
}

}  // namespace detail

/**
 * Smallest N such that the selected majorant tail Σ_(n>N) is below the
 * tolerance, together with that tail. Hitting policy.max_terms is reported
 * through `cap_hit`, not thrown.
 */
template <FieldScalar S>
TruncationPlan truncation_plan(const PowerSeries<S>& g, double s, const TruncationPolicy& policy) {
  if (!(s >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "ball radius must be nonnegative");
  }
  if (!(policy.tolerance > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  }
  if (policy.bound == BoundKind::ThreeS) {
    if (!(s < g.radius() / 3.0)) {
      throw Error(ErrorCode::outside_third_radius,
                  "norm " + std::to_string(s) + " is not below R/3 = " +
                      std::to_string(g.radius() / 3.0));
    }
  } else if (!(s < g.radius())) {
    throw Error(ErrorCode::outside_radius, "norm " + std::to_string(s) +
                                               " is not below the radius of convergence " +
                                               std::to_string(g.radius()));
  }

  const std::size_t first = detail::first_majorant_index(policy.bound);
  const double stop_level = policy.tolerance * 1e-3;
  // Term ratios of the majorants tend to s/R (3s/R for ThreeS); the
  // geometric domination of the remainder never uses a smaller ratio.
  const double limit_ratio =
      std::isinf(g.radius()) ? 0.0 : (policy.bound == BoundKind::ThreeS ? 3.0 * s : s) / g.radius();
  std::vector<double> terms;  // terms[i] is the majorant term at n = first + i
  auto observed_ratio = [&](std::size_t a, std::size_t b) {
    const double r = std::pow(terms[b - first] / terms[a - first], 1.0 / static_cast<double>(b - a));
    return std::max(r, limit_ratio);
  };
  const std::size_t cap = policy.max_terms;
  double remainder = 0.0;
  bool settled = false;
  std::optional<std::size_t> last_nonzero, prev_nonzero;

  for (std::size_t n = first; n <= cap; ++n) {
    const double t = detail::majorant_term(g, policy.bound, n, s);
    terms.push_back(t);
    if (t > 0.0) {
      prev_nonzero = last_nonzero;
      last_nonzero = n;
    }
    if (g.degree() && n >= *g.degree()) {
      settled = true;
      break;
    }
    if (s == 0.0 && n > first) {
      settled = true;
      break;
    }
    if (terms.size() < 2 || t >= stop_level || terms[terms.size() - 2] >= stop_level) {
      continue;
    }
    if (!last_nonzero) {
      continue;
    }
    if (!prev_nonzero) {
      continue;
    }
    const double tb = terms[*last_nonzero - first];
    const double ratio = observed_ratio(*prev_nonzero, *last_nonzero);
    if (!(ratio < 1.0)) {
      continue;
    }
    remainder = tb * std::pow(ratio, static_cast<double>(n + 1 - *last_nonzero)) / (1.0 - ratio);
    if (remainder < stop_level) {
      settled = true;
      break;
    }
  }

  TruncationPlan plan;
  if (!settled) {
    // Cap reached: estimate what lies beyond it if the terms are decaying.
    plan.cap_hit = true;
    plan.index = cap;
    if (last_nonzero && prev_nonzero) {
      const double tb = terms[*last_nonzero - first];
      const double ratio = observed_ratio(*prev_nonzero, *last_nonzero);
      plan.tail = ratio < 1.0 ? tb * std::pow(ratio, static_cast<double>(cap + 1 - *last_nonzero)) /
                                    (1.0 - ratio)
                              : kInfinity;
    } else {
      plan.tail = kInfinity;
    }
    return plan;
  }

  // suffix[i] = Σ_(j >= i) terms[j] + remainder, summed smallest first.
  std::vector<double> suffix(terms.size() + 1);
  suffix[terms.size()] = remainder;
  for (std::size_t i = terms.size(); i-- > 0;) {
    suffix[i] = suffix[i + 1] + terms[i];
  }
  const std::size_t last = first + terms.size() - 1;
  for (std::size_t n = 0; n <= last; ++n) {
    const std::size_t from = std::max(n + 1, first) - first;
    const double tail = suffix[std::min(from, terms.size())];
    if (tail < policy.tolerance) {
      plan.index = n;
      plan.tail = tail;
      return plan;
    }
  }
  plan.index = last;
  plan.tail = remainder;
  return plan;
}

template <FieldScalar S>
std::size_t choose_truncation(const PowerSeries<S>& g, double s, const TruncationPolicy& policy) {
  return truncation_plan(g, s, policy).index;
}

template <FieldScalar S>
struct ScalarEvaluation {
  S value{};
  EvalDiagnostics diagnostics;
};

template <FieldScalar S>
ScalarEvaluation<S> eval_scalar_with_diagnostics(const PowerSeries<S>& g, S lambda,
                                                 const TruncationPolicy& policy) {
  const double s = std::abs(lambda);
  const TruncationPlan plan = truncation_plan(g, s, policy.with_bound(BoundKind::Value));
  S acc = g.coefficient(plan.index);
  for (std::size_t n = plan.index; n-- > 0;) {
    acc = acc * lambda + g.coefficient(n);
  }
  EvalDiagnostics d;
  d.terms_used = plan.index;
  d.tail_bound = plan.tail;
  d.ball_radius_used = s;
  d.cap_hit = plan.cap_hit;
  return {acc, d};
}

template <FieldScalar S>
S eval_scalar(const PowerSeries<S>& g, S lambda, const TruncationPolicy& policy) {
  return eval_scalar_with_diagnostics(g, lambda, policy).value;
}

/// Powers T^0, T^1, ... computed on demand and kept for reuse.
template <FieldScalar S>
class PowerTable {
 public:
  explicit PowerTable(Matrix<S> t) : base_(std::move(t)) {
    powers_.push_back(Matrix<S>::identity(base_.dim()));
  }

  const Matrix<S>& base() const noexcept { return base_; }

  const Matrix<S>& operator[](std::size_t k) {
    while (powers_.size() <= k) {
      powers_.push_back(powers_.back() * base_);
    }
    return powers_[k];
  }

 private:
  Matrix<S> base_;
  std::vector<Matrix<S>> powers_;
};

/// Σ_(m=0..n) c_m T^m using cached powers.
template <FieldScalar S>
Matrix<S> sum_on_powers(const PowerSeries<S>& g, PowerTable<S>& powers, std::size_t n) {
  Matrix<S> acc = Matrix<S>::zero(powers.base().dim());
  for (std::size_t m = 0; m <= n; ++m) {
    const S c = g.coefficient(m);
    if (c != S(0)) {
      acc.storage().noalias() += c * powers[m].storage();
    }
  }
  return acc;
}

template <FieldScalar S>
struct MatrixEvaluation {
  Matrix<S> value;
  EvalDiagnostics diagnostics;
};

/// Σ_(n=0..N) α_n T^n by Horner's rule; N from the Value majorant at ‖T‖.
template <FieldScalar S>
MatrixEvaluation<S> eval_matrix(const PowerSeries<S>& g, const Matrix<S>& t,
                                const TruncationPolicy& policy) {
  const double s = algebra_norm(t);
  const TruncationPlan plan = truncation_plan(g, s, policy.with_bound(BoundKind::Value));
  const std::size_t dim = t.dim();
  Matrix<S> acc = Matrix<S>::identity(dim) * g.coefficient(plan.index);
  for (std::size_t n = plan.index; n-- > 0;) {
    acc = acc * t;
    const S c = g.coefficient(n);
    if (c != S(0)) {
      acc.storage().diagonal().array() += c;
    }
  }
  EvalDiagnostics d;
  d.terms_used = plan.index;
  d.tail_bound = plan.tail;
  d.ball_radius_used = s;
  d.cap_hit = plan.cap_hit;
  return {std::move(acc), d};
}

}  // namespace frechet
