#pragma once

#include <cstdint>
#include <variant>

#include "ktd/statespace.hpp"
#include "ktd/unscented.hpp"

namespace ktd {

/// No evolution noise: the parameters are a constant to be estimated.
struct ZeroNoise {};

/// Fixed evolution covariance P_v.
struct ConstantNoise {
    Matrix covariance;
};

/// P_v = eta * P of the previous posterior; emphasizes recent observations.
struct AdaptiveNoise {
    double eta = 0.0;
};

using ProcessNoise = std::variant<ZeroNoise, ConstantNoise, AdaptiveNoise>;

struct NoiseConfig {
    double observation_variance = 1.0;  ///< P_n (or the residual variance for xktd)
    ProcessNoise process = ZeroNoise{};

    /// Throws ContractViolation unless P_n > 0, eta > 0 and a constant P_v is
    /// a p x p symmetric PSD matrix.
    void validate(Index parameter_count) const;
};

void validate_process_noise(const ProcessNoise& noise, Index parameter_count);

/// Covariance added during prediction given the previous posterior covariance.
Matrix process_covariance(const ProcessNoise& noise, const Matrix& previous);

/// Filter state: the belief over theta and the number of corrections applied.
struct KtdState {
    GaussianBelief belief;
    std::uint64_t step = 0;

    /// Priors are mandatory; there is no default for either.
    static KtdState from_prior(Vector theta0, Matrix p0);

    const Vector& theta() const { return belief.mean; }
    const Matrix& covariance() const { return belief.covariance; }
};

/// Predicted reward, parameter/innovation cross-covariance and innovation variance.
struct InnovationStatistics {
    double predicted_reward = 0.0;
    Vector cross_covariance;
    double innovation_variance = 0.0;
};

/// Random-walk prediction: mean unchanged, covariance += P_v.
KtdState predict(const KtdState& state, const NoiseConfig& noise);

/// Closed-form statistics for an observation r = h^T theta + n.
InnovationStatistics statistics_linear(const KtdState& predicted, const Vector& h,
                                       double observation_variance);

/// Sigma-point statistics for an arbitrary observation model.
InnovationStatistics statistics_ut(const KtdState& predicted, const ObservationModel& model,
                                   const Transition& t, double observation_variance,
                                   double kappa = 0.0);

/// In-place Kalman correction of any belief: K = P_xr / P_r,
/// mean += K (r - r_hat), P -= K P_r K^T, then P = (P + P^T) / 2.
/// Throws SingularInnovation if P_r <= 0.
void apply_correction(GaussianBelief& belief, double reward, const InnovationStatistics& stats);

/// apply_correction on the predicted state; increments the step counter.
KtdState correct(const KtdState& predicted, double reward, const InnovationStatistics& stats);

struct KtdStepResult {
    KtdState state;
    InnovationStatistics statistics;
    double innovation = 0.0;  ///< r - r_hat
};

/// predict, statistics (analytic when model.is_linear(), sigma points
/// otherwise) and correct.
KtdStepResult step_detailed(const KtdState& state, const ObservationModel& model, const Transition& t,
                            const NoiseConfig& noise, double kappa = 0.0);

KtdState step(const KtdState& state, const ObservationModel& model, const Transition& t,
              const NoiseConfig& noise, double kappa = 0.0);

}  // namespace ktd
