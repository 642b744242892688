#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ktd/config.hpp"
#include "ktd/envs.hpp"
#include "ktd/ktd.hpp"
#include "ktd/metrics.hpp"
#include "ktd/statespace.hpp"

namespace ktd {

/// Worst symmetry and definiteness seen over every covariance checked.
struct CovarianceAudit {
    double max_asymmetry = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    std::uint64_t checks = 0;

    void check(const Matrix& covariance);
    void merge(const CovarianceAudit& other);
    bool passes(double asymmetry_tol = 1e-9, double eigenvalue_floor = -1e-8) const;
};

/// Online learner driven by a stream of transitions.
class Learner {
public:
    virtual ~Learner() = default;

    virtual void update(const Transition& t) = 0;
    virtual Vector theta() const = 0;
    /// Belief over the parameters, if the learner maintains one.
    virtual std::optional<GaussianBelief> belief() const { return std::nullopt; }
    /// Full covariance the learner propagates (for auditing), if any.
    virtual const Matrix* covariance() const { return nullptr; }
};

/// Builds the learner named by `algorithm` (ktd, xktd, mcgptd, gptd, lstd,
/// td_direct, residual, qlearning) from the keys theta0, p0, noise_variance,
/// process_noise, eta, process_covariance, kappa, alpha, alpha0 and n0.
std::unique_ptr<Learner> make_learner(const std::string& algorithm, const Config& config,
                                      const ObservationModel& model);

ProcessNoise process_noise_from(const Config& config, Index parameter_count);

/// Mean episode length of the greedy policy from random starts, each episode
/// capped at max_steps.
double evaluate_greedy_policy(const Approximator& q, const Vector& theta, const Pendulum& env,
                              int episodes, long long max_steps, Rng& rng);

/// The pendulum Q-function basis: per action a constant and Gaussian kernels
/// on {-pi/4, 0, pi/4} x {-1, 0, 1}.
std::shared_ptr<const Approximator> pendulum_basis(double std_dev = 1.0);
/// Nine kernels on {0, 0.5, 1}^2 for the maze value function.
std::shared_ptr<const Approximator> maze_basis(double std_dev = 0.5);

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::vector<std::string> algorithms;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment_info(const std::string& name);

/// Baked-in settings of an experiment with its default algorithm.
Config default_config(const std::string& experiment);

/// Defaults of config["experiment"] overlaid with `user`; validates keys and
/// the algorithm. Throws ConfigError.
Config resolve_config(const Config& user);

struct ExperimentResult {
    Config config;
    MetricSeries series;
    CovarianceAudit audit;
    std::string output_path;  ///< empty when no CSV was written
};

/// Runs every trial (trial t seeded with seed + t), aggregates the metric and
/// writes the CSV to config["output"] unless it is "none".
ExperimentResult run_experiment(const Config& config);

}  // namespace ktd
