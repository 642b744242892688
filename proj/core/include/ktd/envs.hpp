#pragma once

#include <array>
#include <random>

#include <Eigen/Dense>

namespace ktd {

/// Seeded generator used by every environment and experiment.
using Rng = std::mt19937_64;

template <class S>
struct StepOutcome {
    S next_state;
    double reward = 0.0;
    bool terminal = false;
};

/// Three-state chain with zero reward: i -> i or i - 1 equiprobably, and
/// 1 -> 1 or 3. States are numbered 1..3.
struct TsitsiklisChain {
    static StepOutcome<int> step(int state, Rng& rng);
    static int random_state(Rng& rng);
};

/// 13-state chain drifting to the absorbing state 0. The reward scale is
/// applied by the caller (1 normally, 10 after the reward switch).
struct BoyanChain {
    static constexpr int kStartState = 12;
    static constexpr int kAbsorbingState = 0;
    static StepOutcome<int> step(int state, double reward_scale, Rng& rng);
};

struct MazeConfig {
    double step_size = 0.05;
    double exit_low = 0.375;
    double exit_high = 0.625;
    /// When false, moves that would leave through a side or bottom wall are
    /// cancelled instead of clamped to the wall.
    bool clamp_walls = true;
    double start_x_mean = 0.5;
    double start_x_std = 0.125;
    double start_y_max = 0.05;
    double up_probability = 0.9;
};

/// Continuous unit-square maze left through the top edge.
class Maze {
public:
    enum Move : int { Left = 0, Right = 1, Up = 2, Down = 3 };
    static constexpr int kActions = 4;

    explicit Maze(MazeConfig config = {});

    const MazeConfig& config() const { return config_; }
    StepOutcome<Eigen::Vector2d> step(const Eigen::Vector2d& pos, int action) const;
    /// x ~ N(mean, std) redrawn until it lies in [0, 1], y ~ U[0, start_y_max].
    Eigen::Vector2d random_start(Rng& rng) const;
    /// Up with the configured probability, otherwise uniform over the rest.
    int behavior_action(Rng& rng) const;

private:
    MazeConfig config_;
};

struct PendulumConfig {
    double gravity = 9.8;
    double pole_mass = 2.0;
    double cart_mass = 8.0;
    double length = 0.5;
    double force = 50.0;
    double dt = 0.1;
    double start_perturbation = 0.1;
};

/// Cart-pole balancing with three forces (left, none, right) and Euler
/// integration. State is (angle, angular velocity).
class Pendulum {
public:
    static constexpr int kActions = 3;

    explicit Pendulum(PendulumConfig config = {});

    const PendulumConfig& config() const { return config_; }
    /// Force direction of action index b: -1, 0 or +1.
    static double direction(int action) { return static_cast<double>(action - 1); }

    double angular_acceleration(const Eigen::Vector2d& state, int action) const;
    StepOutcome<Eigen::Vector2d> step(const Eigen::Vector2d& state, int action) const;
    Eigen::Vector2d random_start(Rng& rng) const;
    static bool fallen(const Eigen::Vector2d& state);

private:
    PendulumConfig config_;
};

}  // namespace ktd
