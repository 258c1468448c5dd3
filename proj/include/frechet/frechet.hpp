#pragma once

/**
 * @file frechet.hpp
 * @brief Umbrella header: matrix power series and their Fréchet differentials.
 *
 * @code
 * #include <frechet/frechet.hpp>
 *
 * using namespace frechet;
 * auto g = builtin_series<Real>("exp");
 * Matrix<Real> T = ..., h = ...;
 * auto r = frechet_direct(g, T, h, TruncationPolicy{});
 * // r.value is exp^[1](T)(h), r.diagnostics the truncation record
 * @endcode
 */

#include "frechet/algebra.hpp"
#include "frechet/differential.hpp"
#include "frechet/error.hpp"
#include "frechet/identities.hpp"
#include "frechet/oracle.hpp"
#include "frechet/quadrature.hpp"
#include "frechet/random.hpp"
#include "frechet/series.hpp"
