#pragma once

/**
 * @file algebra.hpp
 * @brief Square matrices as elements of a Banach algebra.
 *
 * The algebra is the set of n x n matrices over the reals or the complex
 * numbers with the Frobenius norm, which is submultiplicative.
 *
 * Three linear operators act on the algebra for a fixed element T:
 *
 *   - 𝓛(T): h -> h T   (apply_left)
 *   - ℛ(T): h -> T h   (apply_right)
 *   - C(T) = 𝓛(T) - ℛ(T): h -> h T - T h   (apply_commutant)
 *
 * WARNING: the operator names follow the underlying algebraic convention,
 * not the side on which T sits. apply_left(T, h) multiplies h by T on the
 * RIGHT and apply_right(T, h) multiplies h by T on the LEFT. Every formula
 * in this library is written against that convention.
 *
 * None of the operators is ever materialized as an n^2 x n^2 matrix.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>

#include "frechet/error.hpp"

namespace frechet {

enum class ScalarField { Real, Complex };

inline const char* to_string(ScalarField field) {
  return field == ScalarField::Real ? "real" : "complex";
}

template <class S>
concept FieldScalar =
    std::same_as<S, double> || std::same_as<S, std::complex<double>>;

template <FieldScalar S>
inline constexpr ScalarField field_of =
    std::is_same_v<S, double> ? ScalarField::Real : ScalarField::Complex;

using Real = double;
using Complex = std::complex<double>;

/// A dense, nonempty, square matrix. Mixed-field arithmetic does not compile.
template <FieldScalar S>
class Matrix {
 public:
  using Scalar = S;
  using Storage = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  explicit Matrix(std::size_t dim) : data_(Storage::Zero(checked(dim), checked(dim))) {}

  explicit Matrix(Storage data) : data_(std::move(data)) {
    if (data_.rows() == 0 || data_.rows() != data_.cols()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "matrix must be square with positive dimension, got " +
                      std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
    }
  }

  static Matrix zero(std::size_t dim) { return Matrix(dim); }

  static Matrix identity(std::size_t dim) {
    return Matrix(Storage::Identity(checked(dim), checked(dim)));
  }

  /// Row-major construction, `entries.size()` must be dim*dim.
  template <class Range>
  static Matrix from_row_major(std::size_t dim, const Range& entries) {
    if (std::size(entries) != dim * dim) {
      throw Error(ErrorCode::dimension_mismatch,
                  "expected " + std::to_string(dim * dim) + " entries, got " +
                      std::to_string(std::size(entries)));
    }
    Matrix out(dim);
    std::size_t k = 0;
    for (const auto& v : entries) {
      out(k / dim, k % dim) = static_cast<S>(v);
      ++k;
    }
    return out;
  }

  static Matrix from_row_major(std::size_t dim, std::initializer_list<S> entries) {
    return from_row_major<std::initializer_list<S>>(dim, entries);
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  static constexpr ScalarField field() noexcept { return field_of<S>; }

  S& operator()(std::size_t i, std::size_t j) { return data_(index(i), index(j)); }
  const S& operator()(std::size_t i, std::size_t j) const { return data_(index(i), index(j)); }

  const Storage& storage() const noexcept { return data_; }
  Storage& storage() noexcept { return data_; }

  Matrix& operator+=(const Matrix& other) {
    require_same_dim(*this, other);
    data_ += other.data_;
    return *this;
  }
  Matrix& operator-=(const Matrix& other) {
    require_same_dim(*this, other);
    data_ -= other.data_;
    return *this;
  }
  Matrix& operator*=(S scalar) {
    data_ *= scalar;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    a.data_ = -a.data_;
    return a;
  }
  friend Matrix operator*(Matrix a, S scalar) { return a *= scalar; }
  friend Matrix operator*(S scalar, Matrix a) { return a *= scalar; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b);
    return Matrix(Storage(a.data_ * b.data_));
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.dim() == b.dim() && a.data_ == b.data_;
  }

  bool is_zero() const { return data_.isZero(0.0); }

  /// Copy of the rows/cols block starting at (row, col).
  Matrix block(std::size_t row, std::size_t col, std::size_t dim) const {
    return Matrix(Storage(data_.block(index(row), index(col), index(dim), index(dim))));
  }

 private:
  static Eigen::Index index(std::size_t i) { return static_cast<Eigen::Index>(i); }

  static Eigen::Index checked(std::size_t dim) {
    if (dim == 0) {
      throw Error(ErrorCode::invalid_argument, "matrix dimension must be positive");
    }
    return index(dim);
  }

  Storage data_;
};

template <FieldScalar S>
void require_same_dim(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
}

template <FieldScalar S>
Matrix<S> mat_mul(const Matrix<S>& a, const Matrix<S>& b) {
  return a * b;
}

/// Frobenius norm, the algebra norm used throughout.
template <FieldScalar S>
double algebra_norm(const Matrix<S>& a) {
  return a.storage().norm();
}

/// Induced 2-norm (largest singular value). Offered for diagnostics only.
template <FieldScalar S>
double spectral_norm(const Matrix<S>& a) {
  Eigen::JacobiSVD<typename Matrix<S>::Storage> svd(a.storage());
  return svd.singularValues()(0);
}

/// Open ball B_s(0) of the algebra.
struct BallSpec {
  double radius = std::numeric_limits<double>::infinity();

  template <FieldScalar S>
  bool contains(const Matrix<S>& a) const {
    return algebra_norm(a) < radius;
  }
};

/// 𝓛(T)(h) = h T.
template <FieldScalar S>
Matrix<S> apply_left(const Matrix<S>& t, const Matrix<S>& h) {
  return h * t;
}

/// ℛ(T)(h) = T h.
template <FieldScalar S>
Matrix<S> apply_right(const Matrix<S>& t, const Matrix<S>& h) {
  return t * h;
}

/// C(T)(h) = h T - T h, i.e. the bracket [h, T] with [A, B] = AB - BA.
template <FieldScalar S>
Matrix<S> apply_commutant(const Matrix<S>& t, const Matrix<S>& h) {
  require_same_dim(t, h);
  return Matrix<S>(typename Matrix<S>::Storage(h.storage() * t.storage() -
                                               t.storage() * h.storage()));
}

/// C(T)^p(h) by p nested applications of C(T).
template <FieldScalar S>
Matrix<S> apply_commutant_power(const Matrix<S>& t, const Matrix<S>& h, std::size_t p) {
  require_same_dim(t, h);
  Matrix<S> k = h;
  for (std::size_t i = 0; i < p; ++i) {
    k = apply_commutant(t, k);
  }
  return k;
}

/// Integer power by repeated multiplication; T^0 is the identity.
template <FieldScalar S>
Matrix<S> matrix_power(const Matrix<S>& t, std::size_t n) {
  Matrix<S> out = Matrix<S>::identity(t.dim());
  for (std::size_t i = 0; i < n; ++i) {
    out = out * t;
  }
  return out;
}

/// Frobenius norm of a - b divided by max(|a|, |b|); zero when both vanish.
template <FieldScalar S>
double relative_difference(const Matrix<S>& a, const Matrix<S>& b) {
  const double scale = std::max(algebra_norm(a), algebra_norm(b));
  const double diff = algebra_norm(a - b);
  if (scale == 0.0) {
    return diff;
  }
  return diff / scale;
}

}  // namespace frechet
