#include "ktd/statespace.hpp"

#include <string>
#include <type_traits>
#include <utility>

#include "ktd/error.hpp"

namespace ktd {

const char* to_string(Bellman kind) {
    switch (kind) {
        case Bellman::Evaluation: return "evaluation";
        case Bellman::Sarsa: return "sarsa";
        case Bellman::QOptimality: return "q-optimality";
    }
    return "unknown";
}

Bellman Transition::kind() const {
    switch (step.index()) {
        case 0: return Bellman::Evaluation;
        case 1: return Bellman::Sarsa;
        default: return Bellman::QOptimality;
    }
}

const State& Transition::state() const {
    return std::visit([](const auto& x) -> const State& { return x.s; }, step);
}

const State& Transition::next_state() const {
    return std::visit([](const auto& x) -> const State& { return x.s_next; }, step);
}

Action Transition::action() const {
    if (const auto* x = std::get_if<SarsaStep>(&step)) return x->a;
    if (const auto* x = std::get_if<QOptStep>(&step)) return x->a;
    return kNoAction;
}

Transition Transition::evaluation(State s, State s_next, double reward, bool terminal) {
    return {VEvalStep{std::move(s), std::move(s_next)}, reward, terminal};
}

Transition Transition::sarsa(State s, Action a, State s_next, Action a_next, double reward,
                             bool terminal) {
    return {SarsaStep{std::move(s), a, std::move(s_next), a_next}, reward, terminal};
}

Transition Transition::q_optimality(State s, Action a, State s_next, double reward, bool terminal) {
    return {QOptStep{std::move(s), a, std::move(s_next)}, reward, terminal};
}

// ---------------------------------------------------------------------------

ObservationModel::ObservationModel(std::shared_ptr<const Approximator> approximator, Bellman kind,
                                   double gamma)
    : approximator_(std::move(approximator)), kind_(kind), gamma_(gamma) {
    if (!approximator_) throw ContractViolation("observation model needs an approximator");
    if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw ContractViolation("discount must lie in [0, 1]");
    const bool q_function = approximator_->action_count() > 0;
    if (kind_ == Bellman::Evaluation && q_function) {
        throw ContractViolation("value evaluation needs a state-value approximator");
    }
    if (kind_ != Bellman::Evaluation && !q_function) {
        throw ContractViolation(std::string(to_string(kind_)) +
                                " needs a Q-function over a finite, non-empty action set");
    }
}

ObservationModel ObservationModel::evaluation(std::shared_ptr<const Approximator> approximator,
                                              double gamma) {
    return {std::move(approximator), Bellman::Evaluation, gamma};
}

ObservationModel ObservationModel::sarsa(std::shared_ptr<const Approximator> approximator,
                                         double gamma) {
    return {std::move(approximator), Bellman::Sarsa, gamma};
}

ObservationModel ObservationModel::q_optimality(std::shared_ptr<const Approximator> approximator,
                                                double gamma) {
    return {std::move(approximator), Bellman::QOptimality, gamma};
}

bool ObservationModel::is_linear() const {
    return approximator_->is_linear() && kind_ != Bellman::QOptimality;
}

// ---------------------------------------------------------------------------

namespace {

void check_variant(const ObservationModel& model, const Transition& t) {
    if (t.kind() != model.kind()) {
        throw ContractViolation(std::string("transition variant ") + to_string(t.kind()) +
                                " does not match observation model " + to_string(model.kind()));
    }
}

}  // namespace

double observe(const ObservationModel& model, const Vector& theta, const Transition& t) {
    check_variant(model, t);
    const Approximator& f = model.approximator();
    const double gamma = model.gamma();
    return std::visit(
        [&](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, VEvalStep>) {
                const double now = f.evaluate(theta, x.s);
                return t.terminal ? now : now - gamma * f.evaluate(theta, x.s_next);
            } else if constexpr (std::is_same_v<T, SarsaStep>) {
                const double now = f.evaluate(theta, x.s, x.a);
                return t.terminal ? now : now - gamma * f.evaluate(theta, x.s_next, x.a_next);
            } else {
                const double now = f.evaluate(theta, x.s, x.a);
                return t.terminal ? now : now - gamma * f.action_values(theta, x.s_next).maxCoeff();
            }
        },
        t.step);
}

double td_error(const ObservationModel& model, const Vector& theta, const Transition& t) {
    return t.reward - observe(model, theta, t);
}

Vector observation_row(const ObservationModel& model, const Transition& t) {
    check_variant(model, t);
    const auto* linear = dynamic_cast<const LinearApproximator*>(&model.approximator());
    if (linear == nullptr || !model.is_linear()) {
        throw ContractViolation("observation row requires a linear observation model");
    }
    const double gamma = model.gamma();
    Vector h = linear->features(t.state(), t.action());
    if (!t.terminal) {
        Action next_action = kNoAction;
        if (const auto* x = std::get_if<SarsaStep>(&t.step)) next_action = x->a_next;
        h -= gamma * linear->features(t.next_state(), next_action);
    }
    return h;
}

Vector observe_columns(const ObservationModel& model, const Matrix& thetas, const Transition& t) {
    check_variant(model, t);
    if (thetas.rows() != model.parameter_count()) {
        throw ContractViolation("parameter matrix has the wrong number of rows");
    }
    if (model.is_linear()) {
        return thetas.transpose() * observation_row(model, t);
    }
    const auto* linear = dynamic_cast<const LinearApproximator*>(&model.approximator());
    if (linear != nullptr) {
        // Linear Q-function under the optimality operator: features once, max per column.
        const auto& x = std::get<QOptStep>(t.step);
        Vector images = thetas.transpose() * linear->features(x.s, x.a);
        if (!t.terminal) {
            const Matrix next = thetas.transpose() * linear->action_features(x.s_next);
            images -= model.gamma() * next.rowwise().maxCoeff();
        }
        return images;
    }
    Vector images(thetas.cols());
    for (Index j = 0; j < thetas.cols(); ++j) images(j) = observe(model, thetas.col(j), t);
    return images;
}

Action greedy_action(const Approximator& approximator, const Vector& theta, const State& s) {
    const Vector q = approximator.action_values(theta, s);
    Index best = 0;
    for (Index b = 1; b < q.size(); ++b) {
        if (q(b) > q(best)) best = b;
    }
    return static_cast<Action>(best);
}

}  // namespace ktd
