#pragma once

/**
 * @file oracle.hpp
 * @brief Reference values for g^[1](T)(h) computed without the series
 * expansions of differential.hpp.
 *
 * block_triangular_differential relies on the standard matrix-function
 * identity
 *
 *     g([[T, h], [0, T]]) = [[g(T), g^[1](T)(h)], [0, g(T)]],
 *
 * which is external ground truth: a disagreement with it points at the
 * expansions, not at the identity.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "frechet/algebra.hpp"
#include "frechet/error.hpp"
#include "frechet/series.hpp"

namespace frechet {

enum class OracleKind { CentralFiniteDifference, BlockTriangular, ResolventClosedForm,
                        PolynomialExpansion };

inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;

/// [g(T + δh) - g(T - δh)] / (2δ).
template <FieldScalar S>
Matrix<S> fd_differential(const PowerSeries<S>& g, const Matrix<S>& t, const Matrix<S>& h,
                          double delta, const TruncationPolicy& policy) {
  require_same_dim(t, h);
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "finite-difference step must be positive");
  }
  if (!(algebra_norm(t) + delta * algebra_norm(h) < g.radius())) {
    throw Error(ErrorCode::outside_radius,
                "perturbed points T ± δh leave the ball of convergence");
  }
  const Matrix<S> plus = eval_matrix(g, t + h * S(delta), policy).value;
  const Matrix<S> minus = eval_matrix(g, t - h * S(delta), policy).value;
  return (plus - minus) * S(1.0 / (2.0 * delta));
}

/// Upper-right block of g([[T, γh], [0, T]]) divided by γ.
template <FieldScalar S>
Matrix<S> block_triangular_differential(const PowerSeries<S>& g, const Matrix<S>& t,
                                        const Matrix<S>& h, const TruncationPolicy& policy) {
  require_same_dim(t, h);
  const std::size_t n = t.dim();
  const double t_norm = algebra_norm(t);
  const double h_norm = algebra_norm(h);
  if (h_norm == 0.0) {
    return Matrix<S>::zero(n);
  }
  // ‖M‖_F^2 = 2‖T‖^2 + γ^2‖h‖^2 must stay below R^2.
  const double radius = g.radius();
  const double room = radius * radius - 2.0 * t_norm * t_norm;
  if (!(room > 0.0)) {
    throw Error(ErrorCode::outside_radius,
                "block matrix [[T, h], [0, T]] cannot be rescaled into the ball of convergence");
  }
  double gamma = 0.1 / std::max(1.0, h_norm);
  if (std::isfinite(room)) {
    gamma = std::min(gamma, 0.5 * std::sqrt(room) / h_norm);
  }

  typename Matrix<S>::Storage m = Matrix<S>::Storage::Zero(2 * n, 2 * n);
  const auto ni = static_cast<Eigen::Index>(n);
  m.topLeftCorner(ni, ni) = t.storage();
  m.bottomRightCorner(ni, ni) = t.storage();
  m.topRightCorner(ni, ni) = S(gamma) * h.storage();
  const Matrix<S> big = eval_matrix(g, Matrix<S>(std::move(m)), policy).value;
  return big.block(0, n, n) * S(1.0 / gamma);
}

/// (I - T)^-1 h (I - T)^-1 via LU solves; the differential of the
/// geometric series.
template <FieldScalar S>
Matrix<S> resolvent_differential(const Matrix<S>& t, const Matrix<S>& h) {
  require_same_dim(t, h);
  using Storage = typename Matrix<S>::Storage;
  const Storage a = Storage::Identity(t.storage().rows(), t.storage().cols()) - t.storage();
  Eigen::PartialPivLU<Storage> lu(a);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::singular, "I - T is singular to working precision");
  }
  const Storage x = lu.solve(h.storage());  // (I - T)^-1 h
  // y (I - T) = x  <=>  (I - T)^T y^T = x^T
  Eigen::PartialPivLU<Storage> lu_t(a.transpose());
  const Storage y = lu_t.solve(x.transpose()).transpose();
  return Matrix<S>(y);
}

/// Σ_n α_n u_n(h) for a finite coefficient list, no truncation logic.
template <FieldScalar S>
Matrix<S> polynomial_differential(const std::vector<S>& coeffs, const Matrix<S>& t,
                                  const Matrix<S>& h) {
  require_same_dim(t, h);
  const std::size_t dim = t.dim();
  Matrix<S> acc = Matrix<S>::zero(dim);
  for (std::size_t n = 1; n < coeffs.size(); ++n) {
    if (coeffs[n] == S(0)) continue;
    Matrix<S> u = Matrix<S>::zero(dim);
    for (std::size_t p = 1; p <= n; ++p) {
      u += matrix_power(t, n - p) * h * matrix_power(t, p - 1);
    }
    acc += u * coeffs[n];
  }
  return acc;
}

}  // namespace frechet
