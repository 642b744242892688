#include "ktd/ktd.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ktd/error.hpp"

namespace ktd {

void validate_process_noise(const ProcessNoise& noise, Index parameter_count) {
    if (const auto* adaptive = std::get_if<AdaptiveNoise>(&noise)) {
        if (!(adaptive->eta > 0.0)) throw ContractViolation("adaptive process noise needs eta > 0");
    } else if (const auto* constant = std::get_if<ConstantNoise>(&noise)) {
        const Matrix& pv = constant->covariance;
        if (pv.rows() != parameter_count || pv.cols() != parameter_count) {
            throw ContractViolation("process noise covariance must be " +
                                    std::to_string(parameter_count) + "x" +
                                    std::to_string(parameter_count));
        }
        GaussianBelief{Vector::Zero(parameter_count), pv}.validate();
    }
}

void NoiseConfig::validate(Index parameter_count) const {
    if (!(observation_variance > 0.0)) {
        throw ContractViolation("observation variance must be positive");
    }
    validate_process_noise(process, parameter_count);
}

Matrix process_covariance(const ProcessNoise& noise, const Matrix& previous) {
    if (const auto* adaptive = std::get_if<AdaptiveNoise>(&noise)) return adaptive->eta * previous;
    if (const auto* constant = std::get_if<ConstantNoise>(&noise)) return constant->covariance;
    return Matrix::Zero(previous.rows(), previous.cols());
}

KtdState KtdState::from_prior(Vector theta0, Matrix p0) {
    KtdState state{GaussianBelief{std::move(theta0), std::move(p0)}, 0};
    state.belief.validate();
    return state;
}

KtdState predict(const KtdState& state, const NoiseConfig& noise) {
    KtdState out = state;
    if (!std::holds_alternative<ZeroNoise>(noise.process)) {
        out.belief.covariance += process_covariance(noise.process, state.belief.covariance);
    }
    return out;
}

InnovationStatistics statistics_linear(const KtdState& predicted, const Vector& h,
                                       double observation_variance) {
    if (h.size() != predicted.belief.dimension()) {
        throw ContractViolation("observation row length does not match the parameter count");
    }
    InnovationStatistics stats;
    stats.predicted_reward = h.dot(predicted.belief.mean);
    stats.cross_covariance = predicted.belief.covariance * h;
    stats.innovation_variance = h.dot(stats.cross_covariance) + observation_variance;
    return stats;
}

InnovationStatistics statistics_ut(const KtdState& predicted, const ObservationModel& model,
                                   const Transition& t, double observation_variance, double kappa) {
    if (model.parameter_count() != predicted.belief.dimension()) {
        throw ContractViolation("observation model parameter count does not match the belief");
    }
    const SigmaPointSet set = generate_sigma_points(predicted.belief, kappa);
    const Vector images = observe_columns(model, set.points, t);
    const ScalarMoments m = moments_from_images(set, images);
    return {m.mean, m.cross_covariance, m.variance + observation_variance};
}

void apply_correction(GaussianBelief& belief, double reward, const InnovationStatistics& stats) {
    if (!(stats.innovation_variance > 0.0)) {
        throw SingularInnovation("innovation variance must be positive, got " +
                                 std::to_string(stats.innovation_variance));
    }
    if (stats.cross_covariance.size() != belief.dimension()) {
        throw ContractViolation("cross-covariance length does not match the belief");
    }
    const Vector gain = stats.cross_covariance / stats.innovation_variance;
    belief.mean += gain * (reward - stats.predicted_reward);
    Matrix& p = belief.covariance;
    p.noalias() -= stats.innovation_variance * gain * gain.transpose();
    p = 0.5 * (p + p.transpose()).eval();
}

KtdState correct(const KtdState& predicted, double reward, const InnovationStatistics& stats) {
    KtdState out = predicted;
    apply_correction(out.belief, reward, stats);
    ++out.step;
    return out;
}

KtdStepResult step_detailed(const KtdState& state, const ObservationModel& model, const Transition& t,
                            const NoiseConfig& noise, double kappa) {
    const KtdState predicted = predict(state, noise);
    const InnovationStatistics stats =
        model.is_linear()
            ? statistics_linear(predicted, observation_row(model, t), noise.observation_variance)
            : statistics_ut(predicted, model, t, noise.observation_variance, kappa);
    KtdStepResult result{correct(predicted, t.reward, stats), stats, t.reward - stats.predicted_reward};
    return result;
}

KtdState step(const KtdState& state, const ObservationModel& model, const Transition& t,
              const NoiseConfig& noise, double kappa) {
    return step_detailed(state, model, t, noise, kappa).state;
}

}  // namespace ktd
