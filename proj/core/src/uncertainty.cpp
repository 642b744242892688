#include "ktd/uncertainty.hpp"

#include <cmath>
#include <string>

#include "ktd/error.hpp"

namespace ktd {

namespace {

double checked_std_dev(double variance) {
    if (variance >= 0.0) return std::sqrt(variance);
    if (variance >= -kVarianceTolerance) return 0.0;
    throw ContractViolation("propagated variance is negative: " + std::to_string(variance));
}

}  // namespace

ValueStats value_stats(const GaussianBelief& belief, const Approximator& approximator,
                       const State& s, Action a, double kappa) {
    if (belief.dimension() != approximator.parameter_count()) {
        throw ContractViolation("belief dimension does not match the approximator");
    }
    const SigmaPointSet set = generate_sigma_points(belief, kappa);
    Vector images(set.size());
    for (Index j = 0; j < set.size(); ++j) images(j) = approximator.evaluate(set.point(j), s, a);
    const ScalarMoments m = moments_from_images(set, images);
    return {m.mean, checked_std_dev(m.variance)};
}

Vector action_std_devs(const GaussianBelief& belief, const Approximator& approximator,
                       const State& s, double kappa) {
    const Index actions = approximator.action_count();
    if (actions <= 0) throw ContractViolation("action uncertainty needs a Q-function");
    if (belief.dimension() != approximator.parameter_count()) {
        throw ContractViolation("belief dimension does not match the approximator");
    }
    const SigmaPointSet set = generate_sigma_points(belief, kappa);
    Matrix images(set.size(), actions);
    if (const auto* linear = dynamic_cast<const LinearApproximator*>(&approximator)) {
        images = set.points.transpose() * linear->action_features(s);
    } else {
        for (Index j = 0; j < set.size(); ++j) {
            images.row(j) = approximator.action_values(set.point(j), s).transpose();
        }
    }
    const Eigen::RowVectorXd mean = set.weights.transpose() * images;
    Vector out(actions);
    for (Index b = 0; b < actions; ++b) {
        const Vector centered = images.col(b).array() - mean(b);
        out(b) = checked_std_dev(set.weights.dot(centered.cwiseAbs2()));
    }
    return out;
}

Vector action_probabilities(const Vector& std_devs) {
    if (std_devs.size() == 0) throw ContractViolation("action set must be non-empty");
    if ((std_devs.array() < 0.0).any()) throw ContractViolation("standard deviations must be >= 0");
    const double total = std_devs.sum();
    if (!(total > 0.0)) return Vector::Constant(std_devs.size(), 1.0 / static_cast<double>(std_devs.size()));
    return std_devs / total;
}

Action active_policy(const GaussianBelief& belief, const Approximator& approximator, const State& s,
                     double kappa, std::mt19937_64& rng) {
    const Vector p = action_probabilities(action_std_devs(belief, approximator, s, kappa));
    std::discrete_distribution<int> pick(p.data(), p.data() + p.size());
    return pick(rng);
}

}  // namespace ktd
