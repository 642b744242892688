#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ktd/baselines.hpp"
#include "ktd/envs.hpp"
#include "ktd/error.hpp"
#include "ktd/funcapprox.hpp"
#include "oracles.hpp"

using namespace ktd;
using ktd::testing::random_spd;
using ktd::testing::random_vector;

namespace {

State scalar(double i) { return State::Constant(1, i); }

std::shared_ptr<const Approximator> identity_features(Index p) {
    return std::make_shared<LinearFeatures>(p, [](const State& s, Action) { return Vector(s); });
}

}  // namespace

TEST(DirectUpdate, StepsAlongTheFeatures) {
    std::mt19937_64 rng(1);
    const auto model = ObservationModel::evaluation(identity_features(3), 0.9);
    const Vector theta = random_vector(3, rng);
    const Transition t = Transition::evaluation(random_vector(3, rng), random_vector(3, rng), 0.4);
    const double delta = td_error(model, theta, t);
    const Vector out = direct_update(theta, model, t, 0.1);
    EXPECT_LT((out - theta - 0.1 * delta * t.state()).norm(), 1e-14);
}

TEST(DirectUpdate, FixedPointWhenErrorIsZero) {
    const auto model = ObservationModel::evaluation(std::make_shared<TabularFeatures>(2), 0.9);
    const Vector theta = Eigen::Vector2d(1.0, 2.0);
    EXPECT_EQ(direct_update(theta, model, Transition::evaluation(scalar(0), scalar(1), -0.8), 0.5), theta);
}

TEST(DirectUpdate, TabularTouchesOneEntry) {
    const auto model = ObservationModel::evaluation(std::make_shared<TabularFeatures>(3), 0.5);
    const Vector theta = Eigen::Vector3d(1.0, 2.0, 3.0);
    const Vector out = direct_update(theta, model, Transition::evaluation(scalar(1), scalar(2), 1.0), 0.2);
    EXPECT_EQ(out(0), 1.0);
    EXPECT_EQ(out(2), 3.0);
    EXPECT_NEAR(out(1), 2.0 + 0.2 * (1.0 + 0.5 * 3.0 - 2.0), 1e-15);
}

TEST(DirectUpdate, NeedsAGradient) {
    struct Opaque final : Approximator {
        Index parameter_count() const override { return 1; }
        bool is_linear() const override { return false; }
        double evaluate(const Vector& theta, const State&, Action) const override { return theta(0); }
    };
    const auto model = ObservationModel::evaluation(std::make_shared<Opaque>(), 0.9);
    EXPECT_THROW(direct_update(Vector::Zero(1), model, Transition::evaluation(scalar(0), scalar(0), 1.0), 0.1),
                 Unsupported);
}

TEST(ResidualUpdate, MatchesDirectWithoutDiscount) {
    std::mt19937_64 rng(2);
    const auto model = ObservationModel::evaluation(identity_features(3), 0.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Vector theta = random_vector(3, rng);
        const Transition t = Transition::evaluation(random_vector(3, rng), random_vector(3, rng), 1.0);
        EXPECT_EQ(residual_update(theta, model, t, 0.3), direct_update(theta, model, t, 0.3));
    }
}

TEST(ResidualUpdate, StepsAlongTheObservationRow) {
    std::mt19937_64 rng(3);
    const auto model = ObservationModel::evaluation(identity_features(3), 0.8);
    const Vector theta = random_vector(3, rng);
    const Transition t = Transition::evaluation(random_vector(3, rng), random_vector(3, rng), -0.2);
    const Vector h = t.state() - 0.8 * t.next_state();
    const Vector out = residual_update(theta, model, t, 0.1);
    EXPECT_LT((out - theta - 0.1 * td_error(model, theta, t) * h).norm(), 1e-14);
}

TEST(ResidualUpdate, SelfTransitionWithoutDiscountingIsStill) {
    const auto model = ObservationModel::evaluation(std::make_shared<TabularFeatures>(2), 1.0);
    const Vector theta = Eigen::Vector2d(1.0, 2.0);
    EXPECT_EQ(residual_update(theta, model, Transition::evaluation(scalar(1), scalar(1), 5.0), 0.5), theta);
}

TEST(ResidualUpdate, RejectsQOptimality) {
    const auto model = ObservationModel::q_optimality(std::make_shared<TabularFeatures>(1, 2), 0.9);
    EXPECT_THROW(residual_update(Vector::Zero(2), model, Transition::q_optimality(scalar(0), 0, scalar(0), 1.0), 0.1),
                 Unsupported);
}

TEST(Lstd, ScalarExample) {
    const LstdState s = LstdState::from_prior(Vector::Zero(1), Matrix::Identity(1, 1));
    const LstdState out = lstd_update(s, Vector::Ones(1), Vector::Zero(1), 0.9, 1.0);
    EXPECT_DOUBLE_EQ(out.theta(0), 0.5);
    EXPECT_DOUBLE_EQ(out.c(0, 0), 0.5);
}

TEST(Lstd, NullFeatureChangesNothing) {
    std::mt19937_64 rng(4);
    const LstdState s = LstdState::from_prior(random_vector(3, rng), random_spd(3, rng));
    const LstdState out = lstd_update(s, Vector::Zero(3), random_vector(3, rng), 0.9, 2.0);
    EXPECT_EQ(out.theta, s.theta);
    EXPECT_EQ(out.c, s.c);
}

TEST(Lstd, SingularDenominatorThrows) {
    const LstdState s = LstdState::from_prior(Vector::Zero(1), Matrix::Identity(1, 1));
    EXPECT_THROW(lstd_update(s, Vector::Ones(1), Vector::Constant(1, 2.0), 1.0, 0.0), SingularUpdate);
}

TEST(Lstd, ReplayOrderDoesNotMatter) {
    Rng rng(5);
    struct Sample {
        int s;
        int next;
        double r;
    };
    std::vector<Sample> data;
    for (int e = 0; e < 100; ++e) {
        int s = BoyanChain::kStartState;
        for (bool done = false; !done;) {
            const auto out = BoyanChain::step(s, 1.0, rng);
            data.push_back({s, out.next_state, out.reward});
            s = out.next_state;
            done = out.terminal;
        }
    }
    const BoyanFeatures f;
    auto replay = [&](const std::vector<Sample>& order) {
        LstdState st = LstdState::from_prior(Vector::Zero(4), 1e6 * Matrix::Identity(4, 4));
        for (const Sample& x : order) {
            const Vector next = x.next == 0 ? Vector(Vector::Zero(4)) : f.features(scalar(x.next));
            st = lstd_update(st, f.features(scalar(x.s)), next, 1.0, x.r);
        }
        return st.theta;
    };
    const Vector forward = replay(data);
    std::vector<Sample> shuffled = data;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<Sample> reversed(data.rbegin(), data.rend());
    EXPECT_LT(ktd::testing::relative_error(replay(shuffled), forward), 1e-4);
    EXPECT_LT(ktd::testing::relative_error(replay(reversed), forward), 1e-4);
    EXPECT_LT(ktd::testing::relative_error(forward, Vector(Eigen::Vector4d(-24, -16, -8, 0))), 0.1);
}

TEST(Gptd, ScalarExample) {
    const GptdState s = GptdState::from_prior(Vector::Zero(1), Matrix::Identity(1, 1), 1.0);
    const GptdState out = gptd_update(s, Vector::Ones(1), Vector::Zero(1), 0.9, 1.0);
    EXPECT_DOUBLE_EQ(out.theta(0), 0.5);
    EXPECT_DOUBLE_EQ(out.p(0, 0), 0.5);
}

TEST(Gptd, NullDifferenceChangesNothing) {
    std::mt19937_64 rng(6);
    const GptdState s = GptdState::from_prior(random_vector(3, rng), random_spd(3, rng), 0.5);
    const Vector phi = random_vector(3, rng);
    const GptdState out = gptd_update(s, phi, phi, 1.0, 3.0);
    EXPECT_EQ(out.theta, s.theta);
    EXPECT_EQ(out.p, s.p);
}

TEST(Gptd, CovarianceStaysSymmetricPsd) {
    std::mt19937_64 rng(7);
    GptdState s = GptdState::from_prior(Vector::Zero(5), 10.0 * Matrix::Identity(5, 5), 0.01);
    for (int i = 0; i < 2000; ++i) {
        s = gptd_update(s, random_vector(5, rng), random_vector(5, rng), 0.95, 1.0);
        ASSERT_LE((s.p - s.p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        ASSERT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(s.p).eigenvalues().minCoeff(), -1e-9);
    }
}

TEST(LearningRate, Schedule) {
    const LearningRateSchedule sched(0.5, 200.0);
    EXPECT_DOUBLE_EQ(sched.at(1), 0.5);
    EXPECT_DOUBLE_EQ(sched.at(2), 0.5 * 201.0 / 202.0);
    EXPECT_THROW(sched.at(0), ContractViolation);
    EXPECT_THROW(LearningRateSchedule(0.0, 1.0), ContractViolation);
}

TEST(LearningRate, TabularTdConvergesOnADeterministicChain) {
    // 0 -> 1 -> 2 -> end with rewards 1, 2, 3.
    const double gamma = 0.9;
    const auto model = ObservationModel::evaluation(std::make_shared<TabularFeatures>(3), gamma);
    const LearningRateSchedule sched(0.5, 200.0);
    Vector theta = Vector::Zero(3);
    for (std::uint64_t i = 1; i <= 100000; ++i) {
        const int s = static_cast<int>((i - 1) % 3);
        const bool terminal = s == 2;
        theta = direct_update(theta, model,
                              Transition::evaluation(scalar(s), scalar(terminal ? 0 : s + 1), s + 1.0, terminal),
                              sched.at(i));
    }
    const Eigen::Vector3d truth(1.0 + gamma * (2.0 + gamma * 3.0), 2.0 + gamma * 3.0, 3.0);
    EXPECT_LT((theta - truth).cwiseAbs().maxCoeff(), 1e-2);
}
