#include "ktd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <utility>

#include <Eigen/Eigenvalues>

#include "ktd/baselines.hpp"
#include "ktd/batch.hpp"
#include "ktd/error.hpp"
#include "ktd/uncertainty.hpp"
#include "ktd/xktd.hpp"

namespace ktd {

void CovarianceAudit::check(const Matrix& covariance) {
    const double asymmetry = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
    const Matrix sym = 0.5 * (covariance + covariance.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    max_asymmetry = std::max(max_asymmetry, asymmetry);
    min_eigenvalue = std::min(min_eigenvalue, eig.eigenvalues().minCoeff());
    ++checks;
}

void CovarianceAudit::merge(const CovarianceAudit& other) {
    max_asymmetry = std::max(max_asymmetry, other.max_asymmetry);
    min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
    checks += other.checks;
}

bool CovarianceAudit::passes(double asymmetry_tol, double eigenvalue_floor) const {
    return max_asymmetry <= asymmetry_tol && min_eigenvalue >= eigenvalue_floor;
}

// ---------------------------------------------------------------------------
// Learners

namespace {

class KtdLearner final : public Learner {
public:
    KtdLearner(ObservationModel model, KtdState state, NoiseConfig noise, double kappa)
        : model_(std::move(model)), state_(std::move(state)), noise_(std::move(noise)), kappa_(kappa) {}

    void update(const Transition& t) override { state_ = step(state_, model_, t, noise_, kappa_); }
    Vector theta() const override { return state_.theta(); }
    std::optional<GaussianBelief> belief() const override { return state_.belief; }
    const Matrix* covariance() const override { return &state_.belief.covariance; }

private:
    ObservationModel model_;
    KtdState state_;
    NoiseConfig noise_;
    double kappa_;
};

class XktdLearner final : public Learner {
public:
    XktdLearner(ObservationModel model, ExtendedState state, double sigma2, ProcessNoise process,
                double kappa)
        : model_(std::move(model)), state_(std::move(state)), sigma2_(sigma2),
          process_(std::move(process)), kappa_(kappa) {}

    void update(const Transition& t) override {
        state_ = xstep(state_, model_, t, sigma2_, process_, kappa_);
    }
    Vector theta() const override { return state_.theta(); }
    std::optional<GaussianBelief> belief() const override { return state_.theta_belief(); }
    const Matrix* covariance() const override { return &state_.belief.covariance; }

private:
    ObservationModel model_;
    ExtendedState state_;
    double sigma2_;
    ProcessNoise process_;
    double kappa_;
};

/// Feature pair (phi(s), phi(s')) with phi(s') = 0 past a terminal transition.
class FeaturePairs {
public:
    explicit FeaturePairs(const ObservationModel& model) : model_(model) {
        linear_ = dynamic_cast<const LinearApproximator*>(&model.approximator());
        if (linear_ == nullptr || model.kind() == Bellman::QOptimality) {
            throw ConfigError("this algorithm needs a linear approximator and an on-policy operator");
        }
    }

    std::pair<Vector, Vector> operator()(const Transition& t) const {
        Vector now = linear_->features(t.state(), t.action());
        if (t.terminal) return {std::move(now), Vector::Zero(now.size())};
        Action next_action = kNoAction;
        if (const auto* x = std::get_if<SarsaStep>(&t.step)) next_action = x->a_next;
        return {std::move(now), linear_->features(t.next_state(), next_action)};
    }

    double gamma() const { return model_.gamma(); }

private:
    ObservationModel model_;
    const LinearApproximator* linear_ = nullptr;
};

class LstdLearner final : public Learner {
public:
    LstdLearner(const ObservationModel& model, LstdState state)
        : pairs_(model), state_(std::move(state)) {}

    void update(const Transition& t) override {
        const auto [phi, phi_next] = pairs_(t);
        state_ = lstd_update(state_, phi, phi_next, pairs_.gamma(), t.reward);
    }
    Vector theta() const override { return state_.theta; }

private:
    FeaturePairs pairs_;
    LstdState state_;
};

class GptdLearner final : public Learner {
public:
    GptdLearner(const ObservationModel& model, GptdState state)
        : pairs_(model), state_(std::move(state)) {}

    void update(const Transition& t) override {
        const auto [phi, phi_next] = pairs_(t);
        state_ = gptd_update(state_, phi, phi_next, pairs_.gamma(), t.reward);
    }
    Vector theta() const override { return state_.theta; }
    std::optional<GaussianBelief> belief() const override {
        return GaussianBelief{state_.theta, state_.p};
    }
    const Matrix* covariance() const override { return &state_.p; }

private:
    FeaturePairs pairs_;
    GptdState state_;
};

class GradientLearner final : public Learner {
public:
    using Rate = std::function<double(std::uint64_t)>;

    GradientLearner(ObservationModel model, Vector theta, Rate rate, bool residual)
        : model_(std::move(model)), theta_(std::move(theta)), rate_(std::move(rate)), residual_(residual) {
        if (!model_.approximator().has_gradient()) {
            throw ConfigError("gradient algorithms need an approximator with a gradient");
        }
    }

    void update(const Transition& t) override {
        const double alpha = rate_(++updates_);
        theta_ = residual_ ? residual_update(theta_, model_, t, alpha)
                           : direct_update(theta_, model_, t, alpha);
    }
    Vector theta() const override { return theta_; }

private:
    ObservationModel model_;
    Vector theta_;
    Rate rate_;
    bool residual_;
    std::uint64_t updates_ = 0;
};

}  // namespace

ProcessNoise process_noise_from(const Config& config, Index parameter_count) {
    const std::string kind = config.text("process_noise");
    if (kind == "zero") return ZeroNoise{};
    if (kind == "adaptive") return AdaptiveNoise{config.number("eta")};
    if (kind == "constant") return ConstantNoise{config.covariance("process_covariance", parameter_count)};
    throw ConfigError("process_noise must be zero, constant or adaptive, got '" + kind + "'");
}

std::unique_ptr<Learner> make_learner(const std::string& algorithm, const Config& config,
                                      const ObservationModel& model) {
    const Index p = model.parameter_count();
    const auto theta0 = [&] { return config.vector("theta0", p); };
    const auto p0 = [&] { return config.covariance("p0", p); };
    try {
        if (algorithm == "ktd") {
            NoiseConfig noise{config.number("noise_variance"), process_noise_from(config, p)};
            noise.validate(p);
            return std::make_unique<KtdLearner>(model, KtdState::from_prior(theta0(), p0()), noise,
                                                config.number("kappa"));
        }
        if (algorithm == "xktd" || algorithm == "mcgptd") {
            const double sigma2 = config.number("noise_variance");
            const ProcessNoise process =
                algorithm == "mcgptd" ? ProcessNoise{ZeroNoise{}} : process_noise_from(config, p);
            validate_process_noise(process, p);
            return std::make_unique<XktdLearner>(
                model, ExtendedState::from_prior(theta0(), p0(), sigma2, model.gamma()), sigma2, process,
                config.number("kappa"));
        }
        if (algorithm == "gptd") {
            return std::make_unique<GptdLearner>(
                model, GptdState::from_prior(theta0(), p0(), config.number("noise_variance")));
        }
        if (algorithm == "lstd") {
            return std::make_unique<LstdLearner>(model, LstdState::from_prior(theta0(), p0()));
        }
        if (algorithm == "td_direct" || algorithm == "residual") {
            const double alpha = config.number("alpha");
            if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
            return std::make_unique<GradientLearner>(
                model, theta0(), [alpha](std::uint64_t) { return alpha; }, algorithm == "residual");
        }
        if (algorithm == "qlearning") {
            const LearningRateSchedule schedule(config.number("alpha0"), config.number("n0"));
            return std::make_unique<GradientLearner>(
                model, theta0(), [schedule](std::uint64_t i) { return schedule.at(i); }, false);
        }
    } catch (const ContractViolation& e) {
        throw ConfigError(algorithm + ": " + e.what());
    }
    throw ConfigError("unknown algorithm '" + algorithm + "'");
}

// ---------------------------------------------------------------------------

double evaluate_greedy_policy(const Approximator& q, const Vector& theta, const Pendulum& env,
                              int episodes, long long max_steps, Rng& rng) {
    if (episodes <= 0) throw ContractViolation("evaluation needs at least one episode");
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) {
        Eigen::Vector2d s = env.random_start(rng);
        long long steps = 0;
        while (steps < max_steps) {
            const auto out = env.step(s, greedy_action(q, theta, s));
            ++steps;
            if (out.terminal) break;
            s = out.next_state;
        }
        total += static_cast<double>(steps);
    }
    return total / static_cast<double>(episodes);
}

std::shared_ptr<const Approximator> pendulum_basis(double std_dev) {
    Matrix centers(9, 2);
    const double quarter = std::numbers::pi / 4.0;
    Index k = 0;
    for (const double phi : {-quarter, 0.0, quarter}) {
        for (const double omega : {-1.0, 0.0, 1.0}) centers.row(k++) << phi, omega;
    }
    return std::make_shared<RbfBasis>(centers, std_dev, true, Pendulum::kActions);
}

std::shared_ptr<const Approximator> maze_basis(double std_dev) {
    Matrix centers(9, 2);
    Index k = 0;
    for (const double x : {0.0, 0.5, 1.0}) {
        for (const double y : {0.0, 0.5, 1.0}) centers.row(k++) << x, y;
    }
    return std::make_shared<RbfBasis>(centers, std_dev);
}

// ---------------------------------------------------------------------------
// Protocols

namespace {

State scalar_state(int i) { return State::Constant(1, static_cast<double>(i)); }

Rng trial_rng(const Config& config, Index trial) {
    return Rng(static_cast<std::uint64_t>(config.count("seed")) + static_cast<std::uint64_t>(trial));
}

/// One trial's metric values (one per checkpoint) plus its covariance audit.
struct TrialOutput {
    Vector metric;
    CovarianceAudit audit;
};

class Protocol {
public:
    virtual ~Protocol() = default;
    virtual std::vector<long long> checkpoints() const = 0;
    virtual TrialOutput run_trial(Index trial) const = 0;
};

/// Shared learner plumbing: builds a fresh learner per trial and audits it.
class LearnerDriver {
public:
    LearnerDriver(const Config& config, ObservationModel model)
        : config_(config), model_(std::move(model)), algorithm_(config.text("algorithm")),
          audit_(config.number("audit_covariance") != 0.0) {
        make_learner(algorithm_, config_, model_);  // surface configuration errors up front
    }

    std::unique_ptr<Learner> fresh() const { return make_learner(algorithm_, config_, model_); }

    void update(Learner& learner, const Transition& t, CovarianceAudit& audit) const {
        learner.update(t);
        if (audit_) {
            if (const Matrix* p = learner.covariance()) audit.check(*p);
        }
    }

    const ObservationModel& model() const { return model_; }
    const std::string& algorithm() const { return algorithm_; }

private:
    Config config_;
    ObservationModel model_;
    std::string algorithm_;
    bool audit_;
};

std::vector<long long> range_checkpoints(long long first, long long last, long long stride = 1) {
    std::vector<long long> out;
    for (long long i = first; i <= last; i += stride) out.push_back(i);
    return out;
}

// Theta after every transition on the three-state chain.
class TsitsiklisProtocol final : public Protocol {
public:
    explicit TsitsiklisProtocol(const Config& config)
        : config_(config), transitions_(config.count("transitions")),
          driver_(config, ObservationModel::evaluation(
                              std::make_shared<TsitsiklisParam>(config.number("epsilon")),
                              config.number("gamma"))) {}

    std::vector<long long> checkpoints() const override { return range_checkpoints(0, transitions_); }

    TrialOutput run_trial(Index trial) const override {
        Rng rng = trial_rng(config_, trial);
        auto learner = driver_.fresh();
        TrialOutput out{Vector(transitions_ + 1), {}};
        out.metric(0) = learner->theta()(0);
        int s = TsitsiklisChain::random_state(rng);
        for (long long i = 1; i <= transitions_; ++i) {
            const auto step = TsitsiklisChain::step(s, rng);
            driver_.update(*learner, Transition::evaluation(scalar_state(s), scalar_state(step.next_state),
                                                            step.reward),
                           out.audit);
            out.metric(i) = learner->theta()(0);
            s = step.next_state;
        }
        return out;
    }

private:
    Config config_;
    long long transitions_;
    LearnerDriver driver_;
};

// Normalized parameter error after every episode, with a reward switch.
class BoyanProtocol final : public Protocol {
public:
    explicit BoyanProtocol(const Config& config)
        : config_(config), episodes_(config.count("episodes")), switch_episode_(config.count("switch_episode")),
          switch_scale_(config.number("switch_scale")), theta_star_(config.vector("theta_star", 4)),
          driver_(config, ObservationModel::evaluation(std::make_shared<BoyanFeatures>(),
                                                       config.number("gamma"))) {
        if (!(theta_star_.norm() > 0.0)) throw ConfigError("theta_star must be nonzero");
    }

    std::vector<long long> checkpoints() const override { return range_checkpoints(0, episodes_); }

    double scale(long long episode) const { return episode >= switch_episode_ ? switch_scale_ : 1.0; }

    TrialOutput run_trial(Index trial) const override {
        Rng rng = trial_rng(config_, trial);
        auto learner = driver_.fresh();
        TrialOutput out{Vector(episodes_ + 1), {}};
        out.metric(0) = normalized_param_error(learner->theta(), theta_star_);
        for (long long e = 0; e < episodes_; ++e) {
            const double k = scale(e);
            int s = BoyanChain::kStartState;
            bool done = false;
            while (!done) {
                const auto step = BoyanChain::step(s, k, rng);
                driver_.update(*learner,
                               Transition::evaluation(scalar_state(s), scalar_state(step.next_state),
                                                      step.reward, step.terminal),
                               out.audit);
                s = step.next_state;
                done = step.terminal;
            }
            out.metric(e + 1) = normalized_param_error(learner->theta(), k * theta_star_);
        }
        return out;
    }

private:
    Config config_;
    long long episodes_;
    long long switch_episode_;
    double switch_scale_;
    Vector theta_star_;
    LearnerDriver driver_;
};

MazeConfig maze_config_from(const Config& c) {
    MazeConfig m;
    m.step_size = c.number("maze_step");
    m.exit_low = c.number("maze_exit_low");
    m.exit_high = c.number("maze_exit_high");
    m.clamp_walls = c.number("maze_clamp_walls") != 0.0;
    m.start_x_std = c.number("maze_start_x_std");
    m.up_probability = c.number("maze_up_probability");
    return m;
}

// Value standard deviation on a regular grid after the last episode.
// Checkpoint j * grid + i is the point (i, j) / (grid - 1).
class MazeProtocol final : public Protocol {
public:
    explicit MazeProtocol(const Config& config)
        : config_(config), episodes_(config.count("episodes")), grid_(config.count("grid")),
          max_steps_(config.count("max_episode_steps")), maze_(maze_config_from(config)),
          basis_(maze_basis(config.number("rbf_std"))),
          driver_(config, ObservationModel::evaluation(basis_, config.number("gamma"))) {
        if (grid_ < 2) throw ConfigError("grid must be at least 2");
        if (!driver_.fresh()->belief()) throw ConfigError("maze uncertainty needs a Bayesian learner");
    }

    std::vector<long long> checkpoints() const override { return range_checkpoints(0, grid_ * grid_ - 1); }

    TrialOutput run_trial(Index trial) const override {
        Rng rng = trial_rng(config_, trial);
        auto learner = driver_.fresh();
        TrialOutput out{Vector(grid_ * grid_), {}};
        for (long long e = 0; e < episodes_; ++e) {
            Eigen::Vector2d pos = maze_.random_start(rng);
            for (long long i = 0; i < max_steps_; ++i) {
                const auto step = maze_.step(pos, maze_.behavior_action(rng));
                driver_.update(*learner, Transition::evaluation(pos, step.next_state, step.reward, step.terminal),
                               out.audit);
                if (step.terminal) break;
                pos = step.next_state;
            }
        }
        const GaussianBelief belief = *learner->belief();
        const double kappa = config_.number("kappa");
        const double h = 1.0 / static_cast<double>(grid_ - 1);
        for (long long j = 0; j < grid_; ++j) {
            for (long long i = 0; i < grid_; ++i) {
                const State s = Eigen::Vector2d(static_cast<double>(i) * h, static_cast<double>(j) * h);
                out.metric(j * grid_ + i) = value_stats(belief, *basis_, s, kNoAction, kappa).std_dev;
            }
        }
        return out;
    }

private:
    Config config_;
    long long episodes_;
    long long grid_;
    long long max_steps_;
    Maze maze_;
    std::shared_ptr<const Approximator> basis_;
    LearnerDriver driver_;
};

PendulumConfig pendulum_config_from(const Config& c) {
    PendulumConfig p;
    p.gravity = c.number("pendulum_gravity");
    p.pole_mass = c.number("pendulum_pole_mass");
    p.cart_mass = c.number("pendulum_cart_mass");
    p.length = c.number("pendulum_length");
    p.force = c.number("pendulum_force");
    p.dt = c.number("pendulum_dt");
    p.start_perturbation = c.number("start_perturbation");
    return p;
}

// Greedy-policy episode length every eval_every training episodes.
class PendulumProtocol final : public Protocol {
public:
    explicit PendulumProtocol(const Config& config)
        : config_(config), episodes_(config.count("episodes")), eval_every_(config.count("eval_every")),
          eval_episodes_(config.count("eval_episodes")), eval_max_steps_(config.count("eval_max_steps")),
          train_max_steps_(config.count("train_max_steps")), env_(pendulum_config_from(config)),
          basis_(pendulum_basis(config.number("rbf_std"))),
          driver_(config, ObservationModel::q_optimality(basis_, config.number("gamma"))) {
        const std::string behavior = config.text("behavior");
        if (behavior != "uniform" && behavior != "active") {
            throw ConfigError("behavior must be uniform or active");
        }
        active_ = behavior == "active";
        if (active_ && !driver_.fresh()->belief()) {
            throw ConfigError("active behavior needs a learner with a parameter belief");
        }
        if (eval_every_ < 1 || eval_episodes_ < 1) throw ConfigError("evaluation cadence and size must be >= 1");
    }

    std::vector<long long> checkpoints() const override {
        return range_checkpoints(eval_every_, episodes_, eval_every_);
    }

    TrialOutput run_trial(Index trial) const override {
        Rng rng = trial_rng(config_, trial);
        auto learner = driver_.fresh();
        const std::vector<long long> marks = checkpoints();
        TrialOutput out{Vector(static_cast<Index>(marks.size())), {}};
        const double kappa = config_.number("kappa");
        std::uniform_int_distribution<int> uniform(0, Pendulum::kActions - 1);
        std::size_t next_mark = 0;
        for (long long e = 1; e <= episodes_; ++e) {
            Eigen::Vector2d s = env_.random_start(rng);
            for (long long i = 0; i < train_max_steps_; ++i) {
                const int a = active_ ? active_policy(*learner->belief(), *basis_, s, kappa, rng) : uniform(rng);
                const auto step = env_.step(s, a);
                driver_.update(*learner, Transition::q_optimality(s, a, step.next_state, step.reward, step.terminal),
                               out.audit);
                if (step.terminal) break;
                s = step.next_state;
            }
            if (next_mark < marks.size() && marks[next_mark] == e) {
                // Evaluation starts depend only on (seed, trial, checkpoint), so
                // different learners are scored on the same episodes.
                std::seed_seq seq{static_cast<std::uint64_t>(config_.count("seed")), static_cast<std::uint64_t>(trial),
                                  static_cast<std::uint64_t>(e), std::uint64_t{0x65766131}};
                Rng eval_rng(seq);
                out.metric(static_cast<Index>(next_mark)) =
                    evaluate_greedy_policy(*basis_, learner->theta(), env_, static_cast<int>(eval_episodes_),
                                           eval_max_steps_, eval_rng);
                ++next_mark;
            }
        }
        return out;
    }

private:
    Config config_;
    long long episodes_;
    long long eval_every_;
    long long eval_episodes_;
    long long eval_max_steps_;
    long long train_max_steps_;
    Pendulum env_;
    std::shared_ptr<const Approximator> basis_;
    LearnerDriver driver_;
    bool active_ = false;
};

void require_zero_process_noise(const Config& config) {
    if (config.text("algorithm") != "mcgptd" && config.text("process_noise") != "zero") {
        throw ConfigError("oracle experiments need process_noise = zero");
    }
}

// Relative distance to the regularized least-squares solution after every
// transition of a random deterministic system.
class RegularizedOracleProtocol final : public Protocol {
public:
    explicit RegularizedOracleProtocol(const Config& config)
        : config_(config), transitions_(config.count("transitions")), features_(config.count("features")),
          states_(config.count("states")), gamma_(config.number("gamma")) {
        require_zero_process_noise(config);
        if (features_ < 1 || states_ < 2) throw ConfigError("need features >= 1 and states >= 2");
        auto probe = std::make_shared<TabularFeatures>(features_);
        make_learner(config.text("algorithm"), config, ObservationModel::evaluation(probe, gamma_));
    }

    std::vector<long long> checkpoints() const override { return range_checkpoints(1, transitions_); }

    TrialOutput run_trial(Index trial) const override {
        Rng rng = trial_rng(config_, trial);
        std::normal_distribution<double> normal(0.0, 1.0);
        const Index p = features_;
        const Index n = states_;
        Matrix table(n, p);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < p; ++j) table(i, j) = normal(rng);
        }
        std::vector<int> successor(static_cast<std::size_t>(n));
        Vector reward(n);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
        for (Index i = 0; i < n; ++i) {
            successor[static_cast<std::size_t>(i)] = pick(rng);
            reward(i) = normal(rng);
        }
        auto features = std::make_shared<LinearFeatures>(
            p, [table](const State& s, Action) -> Vector { return table.row(static_cast<Index>(s(0))).transpose(); });
        const ObservationModel model = ObservationModel::evaluation(features, gamma_);
        auto learner = make_learner(config_.text("algorithm"), config_, model);

        const Vector theta0 = config_.vector("theta0", p);
        const Matrix p0 = config_.covariance("p0", p);
        const double noise = config_.number("noise_variance");
        Matrix rows(transitions_, p);
        Vector targets(transitions_);
        TrialOutput out{Vector(transitions_), {}};
        const bool audit = config_.number("audit_covariance") != 0.0;
        for (long long i = 0; i < transitions_; ++i) {
            const int s = pick(rng);
            const int next = successor[static_cast<std::size_t>(s)];
            const Transition t = Transition::evaluation(scalar_state(s), scalar_state(next), reward(s));
            learner->update(t);
            if (audit) {
                if (const Matrix* cov = learner->covariance()) out.audit.check(*cov);
            }
            rows.row(i) = observation_row(model, t).transpose();
            targets(i) = t.reward;
            const Vector batch = regularized_least_squares(theta0, p0, rows.topRows(i + 1), targets.head(i + 1), noise);
            out.metric(i) = normalized_param_error(learner->theta(), batch);
        }
        return out;
    }

private:
    Config config_;
    long long transitions_;
    Index features_;
    Index states_;
    double gamma_;
};

// Relative distance to the regularized fit of Monte Carlo returns after every
// Boyan episode.
class ReturnsOracleProtocol final : public Protocol {
public:
    explicit ReturnsOracleProtocol(const Config& config)
        : config_(config), episodes_(config.count("episodes")), features_(std::make_shared<BoyanFeatures>()),
          driver_(config, ObservationModel::evaluation(features_, config.number("gamma"))) {
        require_zero_process_noise(config);
    }

    std::vector<long long> checkpoints() const override { return range_checkpoints(1, episodes_); }

    TrialOutput run_trial(Index trial) const override {
        Rng rng = trial_rng(config_, trial);
        auto learner = driver_.fresh();
        const Vector theta0 = config_.vector("theta0", 4);
        const Matrix p0 = config_.covariance("p0", 4);
        const double sigma2 = config_.number("noise_variance");
        const double gamma = driver_.model().gamma();
        std::vector<Vector> phis;
        std::vector<double> returns;
        TrialOutput out{Vector(episodes_), {}};
        for (long long e = 0; e < episodes_; ++e) {
            int s = BoyanChain::kStartState;
            std::vector<double> rewards;
            bool done = false;
            while (!done) {
                const auto step = BoyanChain::step(s, 1.0, rng);
                driver_.update(*learner,
                               Transition::evaluation(scalar_state(s), scalar_state(step.next_state),
                                                      step.reward, step.terminal),
                               out.audit);
                phis.push_back(features_->features(scalar_state(s)));
                rewards.push_back(step.reward);
                s = step.next_state;
                done = step.terminal;
            }
            const Vector g = discounted_returns(rewards, gamma);
            returns.insert(returns.end(), g.data(), g.data() + g.size());
            Matrix rows(static_cast<Index>(phis.size()), 4);
            for (std::size_t j = 0; j < phis.size(); ++j) rows.row(static_cast<Index>(j)) = phis[j].transpose();
            const Vector targets = Eigen::Map<const Vector>(returns.data(), static_cast<Index>(returns.size()));
            const Vector batch = regularized_least_squares(theta0, p0, rows, targets, sigma2);
            out.metric(e) = normalized_param_error(learner->theta(), batch);
        }
        return out;
    }

private:
    Config config_;
    long long episodes_;
    std::shared_ptr<const BoyanFeatures> features_;
    LearnerDriver driver_;
};

// ---------------------------------------------------------------------------
// Registry

Config common_defaults(const std::string& experiment, const std::string& algorithm, double trials) {
    Config c;
    c.set("experiment", experiment);
    c.set("algorithm", algorithm);
    c.set("seed", 1.0);
    c.set("trials", trials);
    c.set("kappa", 0.0);
    c.set("audit_covariance", 1.0);
    c.set("theta0", 0.0);
    return c;
}

void filter_defaults(Config& c, double p0, double noise_variance, const std::string& process, double eta) {
    c.set("p0", p0);
    c.set("noise_variance", noise_variance);
    c.set("process_noise", process);
    c.set("eta", eta);
}

void pendulum_defaults(Config& c) {
    filter_defaults(c, 10.0, 1.0, "zero", 0.01);
    c.set("gamma", 0.95);
    c.set("eval_episodes", 100.0);
    c.set("eval_max_steps", 3000.0);
    c.set("train_max_steps", 3000.0);
    c.set("alpha0", 0.5);
    c.set("n0", 200.0);
    c.set("rbf_std", 1.0);
    const PendulumConfig p;
    c.set("pendulum_gravity", p.gravity);
    c.set("pendulum_pole_mass", p.pole_mass);
    c.set("pendulum_cart_mass", p.cart_mass);
    c.set("pendulum_length", p.length);
    c.set("pendulum_force", p.force);
    c.set("pendulum_dt", p.dt);
    c.set("start_perturbation", p.start_perturbation);
}

Config builtin_defaults(const std::string& experiment) {
    if (experiment == "tsitsiklis") {
        Config c = common_defaults(experiment, "ktd", 10);
        filter_defaults(c, 10.0, 1e-3, "adaptive", 0.1);
        c.set("transitions", 3000.0);
        c.set("gamma", 0.9);
        c.set("epsilon", 0.05);
        c.set("alpha", 2e-3);
        return c;
    }
    if (experiment == "boyan") {
        Config c = common_defaults(experiment, "xktd", 300);
        filter_defaults(c, 1.0, 1e-3, "adaptive", 0.01);
        c.set("episodes", 140.0);
        c.set("switch_episode", 70.0);
        c.set("switch_scale", 10.0);
        c.set("gamma", 1.0);
        c.set("alpha", 0.05);
        Matrix star(1, 4);
        star << -24.0, -16.0, -8.0, 0.0;
        c.set("theta_star", star);
        return c;
    }
    if (experiment == "maze") {
        Config c = common_defaults(experiment, "ktd", 20);
        filter_defaults(c, 10.0, 1.0, "zero", 0.01);
        c.set("episodes", 30.0);
        c.set("gamma", 0.9);
        c.set("grid", 21.0);
        c.set("rbf_std", 0.5);
        c.set("max_episode_steps", 10000.0);
        const MazeConfig m;
        c.set("maze_step", m.step_size);
        c.set("maze_exit_low", m.exit_low);
        c.set("maze_exit_high", m.exit_high);
        c.set("maze_clamp_walls", m.clamp_walls ? 1.0 : 0.0);
        c.set("maze_start_x_std", m.start_x_std);
        c.set("maze_up_probability", m.up_probability);
        return c;
    }
    if (experiment == "pendulum") {
        Config c = common_defaults(experiment, "ktd", 100);
        pendulum_defaults(c);
        c.set("episodes", 1000.0);
        c.set("eval_every", 50.0);
        c.set("behavior", std::string("uniform"));
        return c;
    }
    if (experiment == "pendulum_active") {
        Config c = common_defaults(experiment, "ktd", 100);
        pendulum_defaults(c);
        c.set("episodes", 300.0);
        c.set("eval_every", 25.0);
        c.set("behavior", std::string("active"));
        return c;
    }
    if (experiment == "regularized_fit") {
        Config c = common_defaults(experiment, "ktd", 3);
        filter_defaults(c, 1.0, 1.0, "zero", 0.01);
        c.set("transitions", 200.0);
        c.set("features", 5.0);
        c.set("states", 20.0);
        c.set("gamma", 0.9);
        return c;
    }
    if (experiment == "returns_fit") {
        Config c = common_defaults(experiment, "xktd", 3);
        filter_defaults(c, 1.0, 1e-3, "zero", 0.01);
        c.set("episodes", 50.0);
        c.set("gamma", 1.0);
        return c;
    }
    throw ConfigError("unknown experiment '" + experiment + "'");
}

/// Keys accepted although they have no default.
const std::set<std::string>& optional_keys() {
    static const std::set<std::string> keys{"output", "process_covariance"};
    return keys;
}

std::unique_ptr<Protocol> make_protocol(const Config& c) {
    const std::string experiment = c.text("experiment");
    if (experiment == "tsitsiklis") return std::make_unique<TsitsiklisProtocol>(c);
    if (experiment == "boyan") return std::make_unique<BoyanProtocol>(c);
    if (experiment == "maze") return std::make_unique<MazeProtocol>(c);
    if (experiment == "pendulum" || experiment == "pendulum_active") return std::make_unique<PendulumProtocol>(c);
    if (experiment == "regularized_fit") return std::make_unique<RegularizedOracleProtocol>(c);
    if (experiment == "returns_fit") return std::make_unique<ReturnsOracleProtocol>(c);
    throw ConfigError("unknown experiment '" + experiment + "'");
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> list{
        {"tsitsiklis", "three-state chain with a spiral nonlinear value parameterization; theta per transition",
         {"ktd", "td_direct", "residual"}},
        {"boyan", "13-state Boyan chain, rewards scaled x10 mid-run; normalized parameter error per episode",
         {"ktd", "xktd", "lstd", "gptd", "mcgptd", "td_direct", "residual"}},
        {"maze", "continuous maze under a biased random walk; value std-dev on a grid after learning",
         {"ktd", "xktd", "gptd", "mcgptd"}},
        {"pendulum", "inverted pendulum control from uniform random episodes; greedy episode length",
         {"ktd", "qlearning"}},
        {"pendulum_active", "inverted pendulum with uncertainty-driven exploration; greedy episode length",
         {"ktd"}},
        {"regularized_fit", "random deterministic system; relative distance to the regularized least-squares fit",
         {"ktd"}},
        {"returns_fit", "Boyan chain; relative distance to the regularized fit of Monte Carlo returns",
         {"xktd", "mcgptd"}},
    };
    return list;
}

const ExperimentInfo& experiment_info(const std::string& name) {
    for (const auto& info : experiments()) {
        if (info.name == name) return info;
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

Config default_config(const std::string& experiment) {
    Config c = builtin_defaults(experiment);
    c.set("output", experiment + "_" + c.text("algorithm") + ".csv");
    return c;
}

Config resolve_config(const Config& user) {
    if (!user.contains("experiment")) throw ConfigError("missing required key 'experiment'");
    const std::string experiment = user.text("experiment");
    const ExperimentInfo& info = experiment_info(experiment);
    Config c = builtin_defaults(experiment);
    for (const auto& [key, value] : user.entries()) {
        if (!c.contains(key) && optional_keys().count(key) == 0) {
            throw ConfigError("unknown key '" + key + "' for experiment " + experiment);
        }
    }
    c.merge(user);
    const std::string algorithm = c.text("algorithm");
    if (std::find(info.algorithms.begin(), info.algorithms.end(), algorithm) == info.algorithms.end()) {
        std::string valid;
        for (const auto& a : info.algorithms) valid += (valid.empty() ? "" : ", ") + a;
        throw ConfigError("algorithm '" + algorithm + "' is not available for " + experiment + " (valid: " + valid + ")");
    }
    if (!c.contains("output")) c.set("output", experiment + "_" + algorithm + ".csv");
    if (c.count("trials") < 1) throw ConfigError("trials must be at least 1");
    c.count("seed");
    return c;
}

ExperimentResult run_experiment(const Config& config) {
    ExperimentResult result;
    result.config = resolve_config(config);
    std::unique_ptr<Protocol> protocol;
    try {
        protocol = make_protocol(result.config);
    } catch (const ContractViolation& e) {
        throw ConfigError(e.what());
    }
    const Index trials = static_cast<Index>(result.config.count("trials"));
    result.series = MetricSeries(protocol->checkpoints(), trials);
    for (Index t = 0; t < trials; ++t) {
        TrialOutput out = protocol->run_trial(t);
        result.series.set_trial(t, out.metric);
        result.audit.merge(out.audit);
    }
    const std::string output = result.config.text("output");
    if (output != "none") {
        write_csv(output, result.series, result.config);
        result.output_path = output;
    }
    return result;
}

}  // namespace ktd
