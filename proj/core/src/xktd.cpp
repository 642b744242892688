#include "ktd/xktd.hpp"

#include <utility>

#include "ktd/error.hpp"

namespace ktd {

Eigen::Matrix2d colored_noise_covariance(double sigma2, double gamma) {
    Eigen::Matrix2d block;
    block << 1.0, -gamma,
             -gamma, gamma * gamma;
    return sigma2 * block;
}

ExtendedState ExtendedState::from_prior(Vector theta0, const Matrix& p0, double sigma2, double gamma) {
    if (!(sigma2 > 0.0)) throw ContractViolation("residual variance must be positive");
    const Index p = theta0.size();
    if (p0.rows() != p || p0.cols() != p) throw ContractViolation("prior covariance shape mismatch");
    GaussianBelief{theta0, p0}.validate();

    ExtendedState state;
    state.belief.mean = Vector::Zero(p + 2);
    state.belief.mean.head(p) = std::move(theta0);
    state.belief.covariance = Matrix::Zero(p + 2, p + 2);
    state.belief.covariance.topLeftCorner(p, p) = p0;
    state.belief.covariance.bottomRightCorner(2, 2) = colored_noise_covariance(sigma2, gamma);
    return state;
}

ExtendedState xpredict(const ExtendedState& state, double sigma2, const ProcessNoise& process,
                       double gamma) {
    if (!(sigma2 > 0.0)) throw ContractViolation("residual variance must be positive");
    const Index p = state.parameter_count();
    const Index w = state.omega_index();
    const Index n = state.noise_index();
    const Vector& mean = state.belief.mean;
    const Matrix& cov = state.belief.covariance;

    ExtendedState out;
    out.step = state.step;
    out.belief.mean = mean;
    out.belief.mean(w) = 0.0;
    out.belief.mean(n) = mean(w);

    // F P F^T: theta untouched, omega zeroed, n takes over omega.
    Matrix& pred = out.belief.covariance;
    pred = Matrix::Zero(p + 2, p + 2);
    pred.topLeftCorner(p, p) = cov.topLeftCorner(p, p);
    pred.block(0, n, p, 1) = cov.block(0, w, p, 1);
    pred.block(n, 0, 1, p) = cov.block(w, 0, 1, p);
    pred(n, n) = cov(w, w);

    if (!std::holds_alternative<ZeroNoise>(process)) {
        pred.topLeftCorner(p, p) += process_covariance(process, cov.topLeftCorner(p, p));
    }
    pred.bottomRightCorner(2, 2) += colored_noise_covariance(sigma2, gamma);
    return out;
}

ExtendedState reset_noise(const ExtendedState& state, double sigma2, double gamma) {
    ExtendedState out = state;
    const Index p = state.parameter_count();
    out.belief.mean.tail(2).setZero();
    out.belief.covariance.block(0, p, p, 2).setZero();
    out.belief.covariance.block(p, 0, 2, p).setZero();
    out.belief.covariance.bottomRightCorner(2, 2) = colored_noise_covariance(sigma2, gamma);
    return out;
}

XktdStepResult xstep_detailed(const ExtendedState& state, const ObservationModel& model,
                              const Transition& t, double sigma2, const ProcessNoise& process,
                              double kappa) {
    if (model.kind() == Bellman::QOptimality || t.kind() == Bellman::QOptimality) {
        throw OffPolicyUnsupported(
            "colored-noise filtering remembers past transitions and cannot learn off-policy");
    }
    const Index p = state.parameter_count();
    if (model.parameter_count() != p) {
        throw ContractViolation("observation model parameter count does not match the belief");
    }

    // The absorbing state has no return residual, so u_i = 0 for the last step.
    const double noise_gamma = t.terminal ? 0.0 : model.gamma();
    ExtendedState predicted = xpredict(state, sigma2, process, noise_gamma);

    const SigmaPointSet set = generate_sigma_points(predicted.belief, kappa);
    Vector images = observe_columns(model, set.points.topRows(p), t);
    images += set.points.row(predicted.noise_index()).transpose();
    const ScalarMoments m = moments_from_images(set, images);
    const InnovationStatistics stats{m.mean, m.cross_covariance, m.variance};

    apply_correction(predicted.belief, t.reward, stats);
    ++predicted.step;
    if (t.terminal) predicted = reset_noise(predicted, sigma2, model.gamma());
    return {std::move(predicted), stats, t.reward - stats.predicted_reward};
}

ExtendedState xstep(const ExtendedState& state, const ObservationModel& model, const Transition& t,
                    double sigma2, const ProcessNoise& process, double kappa) {
    return xstep_detailed(state, model, t, sigma2, process, kappa).state;
}

}  // namespace ktd
