#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "ktd/experiments.hpp"
#include "ktd/ktd.hpp"
#include "ktd/uncertainty.hpp"
#include "ktd/unscented.hpp"
#include "ktd/xktd.hpp"

namespace {

using namespace ktd;

Matrix spd(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(n, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
    return a * a.transpose() / static_cast<double>(n) + Matrix::Identity(n, n);
}

void BM_SigmaPoints(benchmark::State& state) {
    const Index n = state.range(0);
    std::mt19937_64 rng(1);
    const GaussianBelief b{Vector::Zero(n), spd(n, rng)};
    for (auto _ : state) benchmark::DoNotOptimize(generate_sigma_points(b));
    state.SetComplexityN(n);
}
BENCHMARK(BM_SigmaPoints)->RangeMultiplier(2)->Range(2, 64)->Complexity();

void BM_LinearStep(benchmark::State& state) {
    const Index p = state.range(0);
    const auto model = ObservationModel::evaluation(
        std::make_shared<LinearFeatures>(p, [](const State& s, Action) { return Vector(s); }), 0.9);
    std::mt19937_64 rng(2);
    KtdState s = KtdState::from_prior(Vector::Zero(p), spd(p, rng));
    const Transition t = Transition::evaluation(Vector::Ones(p), Vector::Zero(p), 1.0);
    for (auto _ : state) {
        s = step(s, model, t, {1.0, ZeroNoise{}});
        benchmark::DoNotOptimize(s.belief.mean.data());
    }
}
BENCHMARK(BM_LinearStep)->RangeMultiplier(2)->Range(4, 64);

// The pendulum Q-learning step: 30 parameters, a max over three actions,
// always through sigma points.
void BM_QOptimalityStep(benchmark::State& state) {
    const auto model = ObservationModel::q_optimality(pendulum_basis(), 0.95);
    KtdState s = KtdState::from_prior(Vector::Zero(30), 10.0 * Matrix::Identity(30, 30));
    const Transition t = Transition::q_optimality(Eigen::Vector2d(0.05, -0.1), 2, Eigen::Vector2d(0.04, -0.3), 0.0);
    for (auto _ : state) {
        s = step(s, model, t, {1.0, ZeroNoise{}});
        benchmark::DoNotOptimize(s.belief.mean.data());
    }
}
BENCHMARK(BM_QOptimalityStep);

void BM_ColoredNoiseStep(benchmark::State& state) {
    const auto model = ObservationModel::evaluation(std::make_shared<BoyanFeatures>(), 1.0);
    ExtendedState x = ExtendedState::from_prior(Vector::Zero(4), Matrix::Identity(4, 4), 1e-3, 1.0);
    const Transition t = Transition::evaluation(Vector::Constant(1, 6.0), Vector::Constant(1, 5.0), -3.0);
    for (auto _ : state) {
        x = xstep(x, model, t, 1e-3, ZeroNoise{});
        benchmark::DoNotOptimize(x.belief.mean.data());
    }
}
BENCHMARK(BM_ColoredNoiseStep);

void BM_ActionStdDevs(benchmark::State& state) {
    const auto q = pendulum_basis();
    std::mt19937_64 rng(3);
    const GaussianBelief b{Vector::Zero(30), spd(30, rng)};
    const Eigen::Vector2d s(0.1, 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(action_std_devs(b, *q, s));
}
BENCHMARK(BM_ActionStdDevs);

void BM_GreedyEvaluation(benchmark::State& state) {
    const auto q = pendulum_basis();
    const Pendulum env;
    const Vector theta = Vector::Zero(30);
    for (auto _ : state) {
        Rng rng(4);
        benchmark::DoNotOptimize(evaluate_greedy_policy(*q, theta, env, 100, 3000, rng));
    }
}
BENCHMARK(BM_GreedyEvaluation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
