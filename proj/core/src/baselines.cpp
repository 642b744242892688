#include "ktd/baselines.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ktd/error.hpp"

namespace ktd {

namespace {

void check_rate(double alpha) {
    if (!(alpha > 0.0)) throw ContractViolation("learning rate must be positive");
}

void check_features(const Vector& theta, const Vector& phi_s, const Vector& phi_s_next) {
    if (phi_s.size() != theta.size() || phi_s_next.size() != theta.size()) {
        throw ContractViolation("feature length does not match the parameter count");
    }
}

}  // namespace

Vector direct_update(const Vector& theta, const ObservationModel& model, const Transition& t,
                     double alpha) {
    check_rate(alpha);
    const Approximator& f = model.approximator();
    if (!f.has_gradient()) throw Unsupported("direct update needs an approximator with a gradient");
    const double delta = td_error(model, theta, t);
    return theta + alpha * delta * f.gradient(theta, t.state(), t.action());
}

Vector residual_update(const Vector& theta, const ObservationModel& model, const Transition& t,
                       double alpha) {
    check_rate(alpha);
    if (t.kind() == Bellman::QOptimality) {
        throw Unsupported("residual update is defined for evaluation and SARSA transitions");
    }
    const Approximator& f = model.approximator();
    if (!f.has_gradient()) throw Unsupported("residual update needs an approximator with a gradient");
    const double delta = td_error(model, theta, t);
    Vector direction = f.gradient(theta, t.state(), t.action());
    if (!t.terminal) {
        Action next_action = kNoAction;
        if (const auto* x = std::get_if<SarsaStep>(&t.step)) next_action = x->a_next;
        direction -= model.gamma() * f.gradient(theta, t.next_state(), next_action);
    }
    return theta + alpha * delta * direction;
}

LstdState LstdState::from_prior(Vector theta0, Matrix c0) {
    if (c0.rows() != theta0.size() || c0.cols() != theta0.size()) {
        throw ContractViolation("initial LSTD matrix shape mismatch");
    }
    if (!c0.allFinite()) throw ContractViolation("initial LSTD matrix must be finite");
    return {std::move(theta0), std::move(c0)};
}

LstdState lstd_update(const LstdState& state, const Vector& phi_s, const Vector& phi_s_next,
                      double gamma, double reward) {
    check_features(state.theta, phi_s, phi_s_next);
    const Vector h = phi_s - gamma * phi_s_next;
    const Vector c_phi = state.c * phi_s;
    const double denominator = 1.0 + h.dot(c_phi);
    if (denominator == 0.0 || !std::isfinite(denominator)) {
        throw SingularUpdate("LSTD gain denominator is " + std::to_string(denominator));
    }
    const Vector gain = c_phi / denominator;
    LstdState out = state;
    out.theta += gain * (reward - h.dot(state.theta));
    out.c.noalias() -= gain * (h.transpose() * state.c);
    return out;
}

GptdState GptdState::from_prior(Vector theta0, Matrix p0, double sigma2) {
    if (!(sigma2 > 0.0)) throw ContractViolation("GPTD noise variance must be positive");
    GaussianBelief{theta0, p0}.validate();
    return {std::move(theta0), std::move(p0), sigma2};
}

GptdState gptd_update(const GptdState& state, const Vector& phi_s, const Vector& phi_s_next,
                      double gamma, double reward) {
    check_features(state.theta, phi_s, phi_s_next);
    const Vector dphi = phi_s - gamma * phi_s_next;
    const Vector p_dphi = state.p * dphi;
    const Vector gain = p_dphi / (state.sigma2 + dphi.dot(p_dphi));
    GptdState out = state;
    out.theta += gain * (reward - dphi.dot(state.theta));
    out.p.noalias() -= gain * p_dphi.transpose();
    out.p = 0.5 * (out.p + out.p.transpose()).eval();
    return out;
}

LearningRateSchedule::LearningRateSchedule(double alpha0, double n0) : alpha0_(alpha0), n0_(n0) {
    if (!(alpha0 > 0.0)) throw ContractViolation("alpha0 must be positive");
    if (!(n0 > 0.0)) throw ContractViolation("n0 must be positive");
}

double LearningRateSchedule::at(std::uint64_t i) const {
    if (i == 0) throw ContractViolation("learning-rate steps are counted from 1");
    return alpha0_ * (n0_ + 1.0) / (n0_ + static_cast<double>(i));
}

}  // namespace ktd
