#pragma once

#include <vector>

#include "ktd/unscented.hpp"

namespace ktd {

/// argmin_theta sum_j (targets_j - rows_j^T theta)^2 / noise_variance
///             + (theta - theta0)^T P0^{-1} (theta - theta0).
/// One row of `rows` per observation.
Vector regularized_least_squares(const Vector& theta0, const Matrix& p0, const Matrix& rows,
                                 const Vector& targets, double noise_variance);

/// Discounted returns G_j = sum_{k >= j} gamma^{k-j} r_k of one episode that
/// ends in an absorbing state of value zero.
Vector discounted_returns(const std::vector<double>& rewards, double gamma);

}  // namespace ktd
