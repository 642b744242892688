#pragma once

#include <cstdint>

#include "ktd/ktd.hpp"

namespace ktd {

/// Colored-noise filter state. The belief is over x = (theta; omega; n): the
/// parameters followed by the auxiliary AR component omega_i and the current
/// observation noise n_i.
struct ExtendedState {
    GaussianBelief belief;
    std::uint64_t step = 0;

    /// Mean (theta0; 0; 0), covariance blockdiag(P0, sigma2 [[1, -g], [-g, g^2]]).
    static ExtendedState from_prior(Vector theta0, const Matrix& p0, double sigma2, double gamma);

    Index parameter_count() const { return belief.dimension() - 2; }
    Index omega_index() const { return belief.dimension() - 2; }
    Index noise_index() const { return belief.dimension() - 1; }

    Vector theta() const { return belief.mean.head(parameter_count()); }
    Matrix theta_covariance() const {
        return belief.covariance.topLeftCorner(parameter_count(), parameter_count());
    }
    /// Marginal belief over theta alone.
    GaussianBelief theta_belief() const { return {theta(), theta_covariance()}; }
};

/// Covariance of u' = (u, -gamma u): sigma2 [[1, -gamma], [-gamma, gamma^2]].
Eigen::Matrix2d colored_noise_covariance(double sigma2, double gamma);

/// x -> F x with F = blockdiag(I_p, [[0, 0], [1, 0]]) and P -> F P F^T + P_v',
/// where P_v' carries the parameter process noise and the colored-noise block.
ExtendedState xpredict(const ExtendedState& state, double sigma2, const ProcessNoise& process,
                       double gamma);

/// Restarts the noise components for a new episode: (omega, n) get mean zero,
/// the prior noise block and no correlation with theta.
ExtendedState reset_noise(const ExtendedState& state, double sigma2, double gamma);

struct XktdStepResult {
    ExtendedState state;
    InnovationStatistics statistics;
    double innovation = 0.0;
};

/// One colored-noise step: predict, sigma points over the extended belief with
/// images g_t(theta_j) + n_j, then the usual correction. A terminal transition
/// draws no residual for the absorbing state and ends the episode, so the noise
/// components are reset afterwards. Q-optimality transitions throw
/// OffPolicyUnsupported.
XktdStepResult xstep_detailed(const ExtendedState& state, const ObservationModel& model,
                              const Transition& t, double sigma2, const ProcessNoise& process,
                              double kappa = 0.0);

ExtendedState xstep(const ExtendedState& state, const ObservationModel& model, const Transition& t,
                    double sigma2, const ProcessNoise& process, double kappa = 0.0);

/// The moving-average observation noise n_i = -gamma u_i + u_{i-1} generated
/// through its two-dimensional autoregressive form.
class ColoredNoiseProcess {
public:
    explicit ColoredNoiseProcess(double gamma, double omega0 = 0.0, double noise0 = 0.0)
        : gamma_(gamma), omega_(omega0), noise_(noise0) {}

    /// Feeds the next white sample u_i and returns n_i.
    double next(double u) {
        noise_ = omega_ - gamma_ * u;
        omega_ = u;
        return noise_;
    }

    double omega() const { return omega_; }
    double noise() const { return noise_; }

private:
    double gamma_;
    double omega_;
    double noise_;
};

}  // namespace ktd
