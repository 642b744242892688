#include "ktd/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ktd/error.hpp"

namespace ktd {

StepOutcome<int> TsitsiklisChain::step(int state, Rng& rng) {
    if (state < 1 || state > 3) throw ContractViolation("chain state must be 1, 2 or 3");
    std::bernoulli_distribution stay(0.5);
    if (stay(rng)) return {state, 0.0, false};
    return {state == 1 ? 3 : state - 1, 0.0, false};
}

int TsitsiklisChain::random_state(Rng& rng) {
    std::uniform_int_distribution<int> pick(1, 3);
    return pick(rng);
}

StepOutcome<int> BoyanChain::step(int state, double reward_scale, Rng& rng) {
    if (state == kAbsorbingState) throw ContractViolation("cannot step from the absorbing state");
    if (state < 0 || state > kStartState) throw ContractViolation("chain state must lie in 0..12");
    if (state == 1) return {0, -2.0 * reward_scale, true};
    std::bernoulli_distribution skip(0.5);
    const int next = skip(rng) ? state - 2 : state - 1;
    return {next, -3.0 * reward_scale, next == kAbsorbingState};
}

// ---------------------------------------------------------------------------

Maze::Maze(MazeConfig config) : config_(config) {
    if (!(config_.step_size > 0.0)) throw ContractViolation("maze step must be positive");
    if (!(config_.start_x_std > 0.0)) throw ContractViolation("start spread must be positive");
    if (!(config_.up_probability >= 0.0 && config_.up_probability <= 1.0)) {
        throw ContractViolation("up probability must lie in [0, 1]");
    }
}

StepOutcome<Eigen::Vector2d> Maze::step(const Eigen::Vector2d& pos, int action) const {
    if (action < 0 || action >= kActions) throw ContractViolation("maze action must lie in 0..3");
    Eigen::Vector2d next = pos;
    switch (action) {
        case Left: next.x() -= config_.step_size; break;
        case Right: next.x() += config_.step_size; break;
        case Up: next.y() += config_.step_size; break;
        default: next.y() -= config_.step_size; break;
    }
    if (next.y() > 1.0) {
        const bool through_exit = next.x() >= config_.exit_low && next.x() <= config_.exit_high;
        return {next, through_exit ? 1.0 : -1.0, true};
    }
    const bool outside = next.x() < 0.0 || next.x() > 1.0 || next.y() < 0.0;
    if (outside) {
        if (!config_.clamp_walls) return {pos, 0.0, false};
        next.x() = std::clamp(next.x(), 0.0, 1.0);
        next.y() = std::max(next.y(), 0.0);
    }
    return {next, 0.0, false};
}

Eigen::Vector2d Maze::random_start(Rng& rng) const {
    std::normal_distribution<double> x_dist(config_.start_x_mean, config_.start_x_std);
    std::uniform_real_distribution<double> y_dist(0.0, config_.start_y_max);
    double x = x_dist(rng);
    while (x < 0.0 || x > 1.0) x = x_dist(rng);
    return {x, y_dist(rng)};
}

int Maze::behavior_action(Rng& rng) const {
    std::bernoulli_distribution go_up(config_.up_probability);
    if (go_up(rng)) return Up;
    static constexpr std::array<int, 3> others{Left, Right, Down};
    std::uniform_int_distribution<int> pick(0, 2);
    return others[static_cast<std::size_t>(pick(rng))];
}

// ---------------------------------------------------------------------------

Pendulum::Pendulum(PendulumConfig config) : config_(config) {
    if (!(config_.dt > 0.0)) throw ContractViolation("time step must be positive");
    if (!(config_.pole_mass > 0.0 && config_.cart_mass > 0.0 && config_.length > 0.0)) {
        throw ContractViolation("masses and length must be positive");
    }
    if (!(config_.start_perturbation >= 0.0)) throw ContractViolation("perturbation must be >= 0");
}

double Pendulum::angular_acceleration(const Eigen::Vector2d& state, int action) const {
    if (action < 0 || action >= kActions) throw ContractViolation("pendulum action must lie in 0..2");
    const double phi = state(0);
    const double omega = state(1);
    const double beta = 1.0 / (config_.pole_mass + config_.cart_mass);
    const double ml = config_.pole_mass * config_.length;
    const double c = std::cos(phi);
    const double numerator = config_.gravity * std::sin(phi) -
                             beta * ml * omega * omega * std::sin(2.0 * phi) / 2.0 -
                             config_.force * beta * c * direction(action);
    const double denominator = 4.0 * config_.length / 3.0 - beta * ml * c * c;
    return numerator / denominator;
}

bool Pendulum::fallen(const Eigen::Vector2d& state) {
    return std::abs(state(0)) > std::numbers::pi / 2.0;
}

StepOutcome<Eigen::Vector2d> Pendulum::step(const Eigen::Vector2d& state, int action) const {
    if (fallen(state)) throw ContractViolation("cannot step a fallen pendulum");
    const double accel = angular_acceleration(state, action);
    Eigen::Vector2d next;
    next(1) = state(1) + config_.dt * accel;
    next(0) = state(0) + config_.dt * state(1);
    if (fallen(next)) return {next, -1.0, true};
    return {next, 0.0, false};
}

Eigen::Vector2d Pendulum::random_start(Rng& rng) const {
    std::uniform_real_distribution<double> d(-config_.start_perturbation, config_.start_perturbation);
    const double phi = d(rng);
    return {phi, d(rng)};
}

}  // namespace ktd
