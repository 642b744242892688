#pragma once

#include <random>

#include "ktd/funcapprox.hpp"
#include "ktd/unscented.hpp"

namespace ktd {

/// Mean and standard deviation of an estimated value under the parameter belief.
struct ValueStats {
    double mean = 0.0;
    double std_dev = 0.0;
};

/// Variances in [-tolerance, 0) are treated as zero; anything below raises.
inline constexpr double kVarianceTolerance = 1e-10;

/// Sigma points of the belief pushed through V_theta(s) (or Q_theta(s, a)).
ValueStats value_stats(const GaussianBelief& belief, const Approximator& approximator,
                       const State& s, Action a = kNoAction, double kappa = 0.0);

/// Standard deviation of Q_theta(s, b) for every action b, sharing one set of
/// sigma points.
Vector action_std_devs(const GaussianBelief& belief, const Approximator& approximator,
                       const State& s, double kappa = 0.0);

/// p(b) = sigma_b / sum(sigma); uniform when every sigma is zero.
Vector action_probabilities(const Vector& std_devs);

/// Samples a behavior action in proportion to the uncertainty of its Q-value.
Action active_policy(const GaussianBelief& belief, const Approximator& approximator, const State& s,
                     double kappa, std::mt19937_64& rng);

}  // namespace ktd
