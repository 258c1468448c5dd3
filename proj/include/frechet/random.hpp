#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "frechet/algebra.hpp"

namespace frechet {

using Rng = std::mt19937_64;

template <FieldScalar S>
S random_scalar(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if constexpr (std::is_same_v<S, double>) {
    return u(rng);
  } else {
    const double re = u(rng);
    const double im = u(rng);
    return S(re, im);
  }
}

/// Entries uniform in [-1, 1]; complex entries draw both parts.
template <FieldScalar S>
Matrix<S> random_matrix(std::size_t dim, Rng& rng) {
  Matrix<S> m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      m(i, j) = random_scalar<S>(rng);
    }
  }
  return m;
}

/// Random matrix rescaled to the given Frobenius norm.
template <FieldScalar S>
Matrix<S> random_matrix_with_norm(std::size_t dim, double norm, Rng& rng) {
  Matrix<S> m = random_matrix<S>(dim, rng);
  const double n = algebra_norm(m);
  return n > 0.0 ? m * S(norm / n) : m;
}

}  // namespace frechet
