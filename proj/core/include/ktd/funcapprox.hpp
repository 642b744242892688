#pragma once

#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "ktd/unscented.hpp"

namespace ktd {

/// Environment states are passed to approximators as real vectors; discrete
/// states are encoded as a 1-vector holding the state index.
using State = Vector;
using Action = int;
inline constexpr Action kNoAction = -1;

/// Parameter-to-value evaluator V_theta(s) or Q_theta(s, a).
class Approximator {
public:
    virtual ~Approximator() = default;

    virtual Index parameter_count() const = 0;
    /// Number of discrete actions for Q-functions, 0 for state-value functions.
    virtual Index action_count() const { return 0; }
    /// Linear approximators let the filters take the analytic path.
    virtual bool is_linear() const = 0;
    virtual bool has_gradient() const { return false; }

    virtual double evaluate(const Vector& theta, const State& s, Action a = kNoAction) const = 0;

    /// d evaluate / d theta. Throws Unsupported when has_gradient() is false.
    virtual Vector gradient(const Vector& theta, const State& s, Action a = kNoAction) const;

    /// Q_theta(s, b) for every action b.
    virtual Vector action_values(const Vector& theta, const State& s) const;

protected:
    void check_theta(const Vector& theta) const;
    void check_action(Action a) const;
};

/// V_theta(s) = phi(s, a)^T theta.
class LinearApproximator : public Approximator {
public:
    bool is_linear() const override { return true; }
    bool has_gradient() const override { return true; }

    virtual Vector features(const State& s, Action a = kNoAction) const = 0;

    /// Column b holds phi(s, b). Only meaningful when action_count() > 0.
    virtual Matrix action_features(const State& s) const;

    double evaluate(const Vector& theta, const State& s, Action a = kNoAction) const override;
    Vector gradient(const Vector& theta, const State& s, Action a = kNoAction) const override;
    Vector action_values(const Vector& theta, const State& s) const override;
};

/// Arbitrary user-supplied feature map.
class LinearFeatures final : public LinearApproximator {
public:
    using FeatureMap = std::function<Vector(const State&, Action)>;

    LinearFeatures(Index dimension, FeatureMap map, Index actions = 0);

    Index parameter_count() const override { return dimension_; }
    Index action_count() const override { return actions_; }
    Vector features(const State& s, Action a = kNoAction) const override;

private:
    Index dimension_;
    FeatureMap map_;
    Index actions_;
};

/// Indicator features: one parameter per state (or state-action pair).
class TabularFeatures final : public LinearApproximator {
public:
    explicit TabularFeatures(Index states, Index actions = 0);

    Index parameter_count() const override;
    Index action_count() const override { return actions_; }
    Vector features(const State& s, Action a = kNoAction) const override;

private:
    Index states_;
    Index actions_;
};

/// Gaussian kernels exp(-|s - c|^2 / (2 sigma^2)), optionally preceded by a
/// constant feature. With actions > 0 each action owns a separate block of
/// parameters and only the active block is nonzero.
class RbfBasis final : public LinearApproximator {
public:
    RbfBasis(Matrix centers, double std_dev, bool constant_term = false, Index actions = 0);

    Index parameter_count() const override;
    Index action_count() const override { return actions_; }
    Index block_size() const { return centers_.rows() + (constant_ ? 1 : 0); }

    /// Unblocked kernel activations for one state.
    Vector kernels(const State& s) const;

    Vector features(const State& s, Action a = kNoAction) const override;
    Matrix action_features(const State& s) const override;
    Vector action_values(const Vector& theta, const State& s) const override;

    const Matrix& centers() const { return centers_; }
    double std_dev() const { return std_dev_; }

private:
    Matrix centers_;  ///< one center per row
    double std_dev_;
    bool constant_;
    Index actions_;
};

/// Piecewise-linear features of the 13-state Boyan chain: anchors s12, s8, s4,
/// s0 map to unit vectors and states in between interpolate linearly.
class BoyanFeatures final : public LinearApproximator {
public:
    Index parameter_count() const override { return 4; }
    Vector features(const State& s, Action a = kNoAction) const override;
};

/// The three-state spiral parameterization V_theta = exp((M + eps I) theta) V0
/// with scalar theta, evaluated in closed form.
class TsitsiklisParam final : public Approximator {
public:
    explicit TsitsiklisParam(double epsilon = 0.05);

    Index parameter_count() const override { return 1; }
    bool is_linear() const override { return false; }
    bool has_gradient() const override { return true; }

    /// States are 1, 2 or 3.
    double evaluate(const Vector& theta, const State& s, Action a = kNoAction) const override;
    Vector gradient(const Vector& theta, const State& s, Action a = kNoAction) const override;

    /// The full 3-vector of values.
    Eigen::Vector3d values(double theta) const;
    /// d values / d theta = (M + eps I) exp((M + eps I) theta) V0.
    Eigen::Vector3d derivative(double theta) const;

    static Eigen::Matrix3d spiral_matrix();
    static Eigen::Vector3d initial_values();
    double epsilon() const { return epsilon_; }

private:
    static Index state_index(const State& s);

    static constexpr double kSpiralRate = 0.86602540378443864676;  // sqrt(3) / 2

    double epsilon_;
    double mean_;             ///< component of V0 along the ones vector
    Eigen::Vector3d plane_;   ///< V0 minus its mean
    Eigen::Vector3d turned_;  ///< M plane_ / (sqrt(3) / 2)
};

}  // namespace ktd
