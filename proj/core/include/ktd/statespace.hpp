#pragma once

#include <memory>
#include <variant>

#include "ktd/funcapprox.hpp"

namespace ktd {

/// Which Bellman operator links the reward to the parameters.
enum class Bellman { Evaluation, Sarsa, QOptimality };

const char* to_string(Bellman kind);

struct VEvalStep {
    State s;
    State s_next;
};

struct SarsaStep {
    State s;
    Action a = 0;
    State s_next;
    Action a_next = 0;
};

struct QOptStep {
    State s;
    Action a = 0;
    State s_next;
};

/// One observed MDP step. `terminal` marks s_next as absorbing: its value is
/// taken to be zero in every Bellman operator.
struct Transition {
    std::variant<VEvalStep, SarsaStep, QOptStep> step;
    double reward = 0.0;
    bool terminal = false;

    Bellman kind() const;
    const State& state() const;
    const State& next_state() const;
    /// Action taken in `state()`, or kNoAction for value evaluation.
    Action action() const;

    static Transition evaluation(State s, State s_next, double reward, bool terminal = false);
    static Transition sarsa(State s, Action a, State s_next, Action a_next, double reward,
                            bool terminal = false);
    static Transition q_optimality(State s, Action a, State s_next, double reward,
                                   bool terminal = false);
};

/// g_t(theta): binds an approximator, a Bellman operator and a discount.
class ObservationModel {
public:
    ObservationModel(std::shared_ptr<const Approximator> approximator, Bellman kind, double gamma);

    static ObservationModel evaluation(std::shared_ptr<const Approximator> approximator, double gamma);
    static ObservationModel sarsa(std::shared_ptr<const Approximator> approximator, double gamma);
    /// The action set is {0, ..., approximator->action_count() - 1}; it must be non-empty.
    static ObservationModel q_optimality(std::shared_ptr<const Approximator> approximator, double gamma);

    Bellman kind() const { return kind_; }
    double gamma() const { return gamma_; }
    const Approximator& approximator() const { return *approximator_; }
    const std::shared_ptr<const Approximator>& approximator_ptr() const { return approximator_; }
    Index parameter_count() const { return approximator_->parameter_count(); }

    /// True when the observation is linear in theta (linear approximator and
    /// not the optimality operator), so the filters can skip sigma points.
    bool is_linear() const;

private:
    std::shared_ptr<const Approximator> approximator_;
    Bellman kind_;
    double gamma_;
};

/// V(s) - gamma V(s'), Q(s,a) - gamma Q(s',a') or Q(s,a) - gamma max_b Q(s',b).
double observe(const ObservationModel& model, const Vector& theta, const Transition& t);

/// r - observe(model, theta, t).
double td_error(const ObservationModel& model, const Vector& theta, const Transition& t);

/// H with observe(theta) = H^T theta. Requires model.is_linear().
Vector observation_row(const ObservationModel& model, const Transition& t);

/// observe() evaluated on every column of `thetas`.
Vector observe_columns(const ObservationModel& model, const Matrix& thetas, const Transition& t);

/// argmax_b Q_theta(s, b), lowest index on ties.
Action greedy_action(const Approximator& approximator, const Vector& theta, const State& s);

}  // namespace ktd
