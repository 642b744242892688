#pragma once

#include <cstdint>

#include "ktd/statespace.hpp"
#include "ktd/unscented.hpp"

namespace ktd {

/// theta + alpha * delta * grad V_theta(s): TD(0), SARSA or Q-learning
/// depending on the observation model.
Vector direct_update(const Vector& theta, const ObservationModel& model, const Transition& t,
                     double alpha);

/// theta + alpha * delta * grad(V_theta(s) - gamma V_theta(s')). Evaluation
/// and SARSA transitions only.
Vector residual_update(const Vector& theta, const ObservationModel& model, const Transition& t,
                       double alpha);

/// Recursive least-squares TD.
struct LstdState {
    Vector theta;
    Matrix c;

    static LstdState from_prior(Vector theta0, Matrix c0);
};

/// K = C phi(s) / (1 + H^T C phi(s)), theta += K (r - H^T theta),
/// C -= K H^T C, with H = phi(s) - gamma phi(s'). Throws SingularUpdate when
/// the denominator vanishes.
LstdState lstd_update(const LstdState& state, const Vector& phi_s, const Vector& phi_s_next,
                      double gamma, double reward);

/// Parametric Gaussian-process TD.
struct GptdState {
    Vector theta;
    Matrix p;
    double sigma2 = 1.0;

    static GptdState from_prior(Vector theta0, Matrix p0, double sigma2);
};

/// K = P dphi / (sigma2 + dphi^T P dphi), theta += K (r - dphi^T theta),
/// P -= K dphi^T P, with dphi = phi(s) - gamma phi(s').
GptdState gptd_update(const GptdState& state, const Vector& phi_s, const Vector& phi_s_next,
                      double gamma, double reward);

/// alpha_i = alpha0 (n0 + 1) / (n0 + i) for i = 1, 2, ...; alpha_1 = alpha0.
class LearningRateSchedule {
public:
    LearningRateSchedule(double alpha0, double n0);

    /// Rate for the i-th update, counting from 1.
    double at(std::uint64_t i) const;
    double alpha0() const { return alpha0_; }
    double n0() const { return n0_; }

private:
    double alpha0_;
    double n0_;
};

}  // namespace ktd
