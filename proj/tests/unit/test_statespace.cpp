#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "ktd/error.hpp"
#include "ktd/funcapprox.hpp"
#include "ktd/statespace.hpp"
#include "oracles.hpp"

using namespace ktd;
using ktd::testing::random_vector;

namespace {

State scalar(double i) { return State::Constant(1, i); }

std::shared_ptr<const Approximator> two_state_indicator() { return std::make_shared<TabularFeatures>(2); }

}  // namespace

TEST(Observe, ValueEvaluation) {
    const auto model = ObservationModel::evaluation(two_state_indicator(), 0.9);
    const Vector theta = Eigen::Vector2d(1.0, 2.0);
    const Transition t = Transition::evaluation(scalar(0), scalar(1), 0.0);
    EXPECT_NEAR(observe(model, theta, t), -0.8, 1e-15);
    EXPECT_NEAR(td_error(model, theta, t), 0.8, 1e-15);
}

TEST(Observe, QOptimalityTakesTheMax) {
    const auto q = std::make_shared<TabularFeatures>(1, 2);
    const auto model = ObservationModel::q_optimality(q, 0.5);
    const Vector theta = Eigen::Vector2d(1.0, 3.0);
    EXPECT_NEAR(observe(model, theta, Transition::q_optimality(scalar(0), 0, scalar(0), 0.0)), -0.5, 1e-15);
}

TEST(Observe, SarsaWithoutDiscountIsTheQValue) {
    // Parameters are laid out per action: theta(a * states + s).
    const auto q = std::make_shared<TabularFeatures>(2, 2);
    const auto model = ObservationModel::sarsa(q, 0.0);
    const Vector theta = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0);
    for (int s2 = 0; s2 < 2; ++s2) {
        for (int a2 = 0; a2 < 2; ++a2) {
            EXPECT_EQ(observe(model, theta, Transition::sarsa(scalar(1), 0, scalar(s2), a2, 0.0)), 2.0);
        }
    }
}

TEST(Observe, ExactFitGivesZeroError) {
    const auto model = ObservationModel::evaluation(two_state_indicator(), 0.9);
    const Vector theta = Eigen::Vector2d(1.0, 2.0);
    const Transition t = Transition::evaluation(scalar(0), scalar(1), -0.8);
    EXPECT_EQ(td_error(model, theta, t), 0.0);
}

TEST(Observe, BoyanOptimumHasNoTerminalError) {
    const auto model = ObservationModel::evaluation(std::make_shared<BoyanFeatures>(), 1.0);
    const Vector star = Eigen::Vector4d(-24, -16, -8, 0);
    EXPECT_NEAR(td_error(model, star, Transition::evaluation(scalar(1), scalar(0), -2.0, true)), 0.0, 1e-12);
    const double two_down = td_error(model, star, Transition::evaluation(scalar(7), scalar(5), -3.0));
    const double one_down = td_error(model, star, Transition::evaluation(scalar(7), scalar(6), -3.0));
    EXPECT_NEAR(0.5 * (two_down + one_down), 0.0, 1e-12);
}

TEST(Observe, TerminalNextStateHasZeroValue) {
    const auto model = ObservationModel::evaluation(two_state_indicator(), 0.9);
    const Vector theta = Eigen::Vector2d(1.0, 2.0);
    EXPECT_EQ(observe(model, theta, Transition::evaluation(scalar(0), scalar(1), 0.0, true)), 1.0);
    const auto qmodel = ObservationModel::q_optimality(std::make_shared<TabularFeatures>(1, 2), 0.5);
    EXPECT_EQ(observe(qmodel, Eigen::Vector2d(1.0, 3.0), Transition::q_optimality(scalar(0), 0, scalar(0), 0.0, true)),
              1.0);
}

TEST(Observe, VariantMismatchThrows) {
    const auto v = ObservationModel::evaluation(two_state_indicator(), 0.9);
    const Vector theta = Vector::Zero(2);
    EXPECT_THROW(observe(v, theta, Transition::sarsa(scalar(0), 0, scalar(1), 0, 0.0)), ContractViolation);
    const auto q = ObservationModel::sarsa(std::make_shared<TabularFeatures>(2, 2), 0.9);
    EXPECT_THROW(observe(q, Vector::Zero(4), Transition::evaluation(scalar(0), scalar(1), 0.0)), ContractViolation);
}

TEST(Observe, QOptimalityNeedsActions) {
    EXPECT_THROW(ObservationModel::q_optimality(two_state_indicator(), 0.9), ContractViolation);
}

TEST(Observe, LinearInParameters) {
    std::mt19937_64 rng(3);
    const auto q = std::make_shared<TabularFeatures>(3, 2);
    const auto sarsa = ObservationModel::sarsa(q, 0.8);
    const auto eval = ObservationModel::evaluation(std::make_shared<TabularFeatures>(3), 0.8);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector a = random_vector(6, rng);
        const Vector b = random_vector(6, rng);
        const Transition t = Transition::sarsa(scalar(rep % 3), rep % 2, scalar((rep + 1) % 3), (rep / 2) % 2, 0.0);
        EXPECT_NEAR(observe(sarsa, a + b, t),
                    observe(sarsa, a, t) + observe(sarsa, b, t) - observe(sarsa, Vector::Zero(6), t), 1e-12);
        EXPECT_NEAR(observe(sarsa, a, t), observation_row(sarsa, t).dot(a), 1e-12);

        const Transition te = Transition::evaluation(scalar(rep % 3), scalar((rep + 2) % 3), 0.0);
        const Vector c = a.head(3);
        EXPECT_NEAR(observe(eval, c, te), observation_row(eval, te).dot(c), 1e-12);
    }
}

TEST(Observe, MaxDominatesEveryNextAction) {
    std::mt19937_64 rng(5);
    const auto q = std::make_shared<TabularFeatures>(3, 3);
    const auto opt = ObservationModel::q_optimality(q, 0.9);
    const auto sarsa = ObservationModel::sarsa(q, 0.9);
    for (int rep = 0; rep < 100; ++rep) {
        const Vector theta = random_vector(9, rng);
        const double qopt = observe(opt, theta, Transition::q_optimality(scalar(rep % 3), 1, scalar(2), 0.0));
        for (Action b = 0; b < 3; ++b) {
            EXPECT_LE(qopt, observe(sarsa, theta, Transition::sarsa(scalar(rep % 3), 1, scalar(2), b, 0.0)) + 1e-15);
        }
    }
}

TEST(Observe, ColumnsMatchPointwise) {
    std::mt19937_64 rng(8);
    const auto model = ObservationModel::evaluation(std::make_shared<TsitsiklisParam>(), 0.9);
    Matrix thetas(1, 5);
    thetas << -1.0, -0.5, 0.0, 0.5, 1.0;
    const Transition t = Transition::evaluation(scalar(1), scalar(3), 0.0);
    const Vector images = observe_columns(model, thetas, t);
    for (Index j = 0; j < 5; ++j) EXPECT_EQ(images(j), observe(model, thetas.col(j), t));
}

TEST(Observe, LinearDispatchFlag) {
    const auto q = std::make_shared<TabularFeatures>(2, 2);
    EXPECT_TRUE(ObservationModel::sarsa(q, 0.9).is_linear());
    EXPECT_FALSE(ObservationModel::q_optimality(q, 0.9).is_linear());
    EXPECT_FALSE(ObservationModel::evaluation(std::make_shared<TsitsiklisParam>(), 0.9).is_linear());
    EXPECT_THROW(observation_row(ObservationModel::q_optimality(q, 0.9),
                                 Transition::q_optimality(scalar(0), 0, scalar(1), 0.0)),
                 ContractViolation);
}

TEST(GreedyAction, LowestIndexOnTies) {
    const TabularFeatures q(1, 3);
    EXPECT_EQ(greedy_action(q, Eigen::Vector3d(1.0, 2.0, 2.0), scalar(0)), 1);
    EXPECT_EQ(greedy_action(q, Eigen::Vector3d::Zero(), scalar(0)), 0);
}
