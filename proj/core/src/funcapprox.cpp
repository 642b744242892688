#include "ktd/funcapprox.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ktd/error.hpp"

namespace ktd {

void Approximator::check_theta(const Vector& theta) const {
    if (theta.size() != parameter_count()) {
        throw ContractViolation("parameter vector has length " + std::to_string(theta.size()) +
                                ", approximator expects " + std::to_string(parameter_count()));
    }
}

void Approximator::check_action(Action a) const {
    if (action_count() == 0) {
        if (a != kNoAction) throw ContractViolation("state-value approximator takes no action");
        return;
    }
    if (a < 0 || a >= action_count()) {
        throw ContractViolation("action " + std::to_string(a) + " out of range");
    }
}

Vector Approximator::gradient(const Vector&, const State&, Action) const {
    throw Unsupported("approximator does not provide gradients");
}

Vector Approximator::action_values(const Vector& theta, const State& s) const {
    if (action_count() == 0) throw ContractViolation("action_values needs a Q-function");
    Vector q(action_count());
    for (Index b = 0; b < action_count(); ++b) q(b) = evaluate(theta, s, static_cast<Action>(b));
    return q;
}

// ---------------------------------------------------------------------------

Matrix LinearApproximator::action_features(const State& s) const {
    if (action_count() == 0) throw ContractViolation("action_features needs a Q-function");
    Matrix f(parameter_count(), action_count());
    for (Index b = 0; b < action_count(); ++b) f.col(b) = features(s, static_cast<Action>(b));
    return f;
}

double LinearApproximator::evaluate(const Vector& theta, const State& s, Action a) const {
    check_theta(theta);
    return features(s, a).dot(theta);
}

Vector LinearApproximator::gradient(const Vector& theta, const State& s, Action a) const {
    check_theta(theta);
    return features(s, a);
}

Vector LinearApproximator::action_values(const Vector& theta, const State& s) const {
    check_theta(theta);
    return action_features(s).transpose() * theta;
}

// ---------------------------------------------------------------------------

LinearFeatures::LinearFeatures(Index dimension, FeatureMap map, Index actions)
    : dimension_(dimension), map_(std::move(map)), actions_(actions) {
    if (dimension_ <= 0) throw ContractViolation("feature dimension must be positive");
    if (!map_) throw ContractViolation("feature map is empty");
}

Vector LinearFeatures::features(const State& s, Action a) const {
    check_action(a);
    Vector phi = map_(s, a);
    if (phi.size() != dimension_) throw ContractViolation("feature map returned wrong dimension");
    return phi;
}

// ---------------------------------------------------------------------------

TabularFeatures::TabularFeatures(Index states, Index actions) : states_(states), actions_(actions) {
    if (states_ <= 0 || actions_ < 0) throw ContractViolation("invalid tabular dimensions");
}

Index TabularFeatures::parameter_count() const {
    return states_ * std::max<Index>(actions_, 1);
}

Vector TabularFeatures::features(const State& s, Action a) const {
    check_action(a);
    if (s.size() != 1) throw ContractViolation("tabular features need a scalar state index");
    const auto index = static_cast<Index>(std::lround(s(0)));
    if (index < 0 || index >= states_) throw ContractViolation("state index out of range");
    Vector phi = Vector::Zero(parameter_count());
    phi((actions_ > 0 ? a * states_ : 0) + index) = 1.0;
    return phi;
}

// ---------------------------------------------------------------------------

RbfBasis::RbfBasis(Matrix centers, double std_dev, bool constant_term, Index actions)
    : centers_(std::move(centers)), std_dev_(std_dev), constant_(constant_term), actions_(actions) {
    if (centers_.rows() == 0) throw ContractViolation("RBF basis needs at least one center");
    if (!(std_dev_ > 0.0)) throw ContractViolation("RBF standard deviation must be positive");
    if (actions_ < 0) throw ContractViolation("negative action count");
}

Index RbfBasis::parameter_count() const {
    return block_size() * std::max<Index>(actions_, 1);
}

Vector RbfBasis::kernels(const State& s) const {
    if (s.size() != centers_.cols()) throw ContractViolation("state dimension does not match centers");
    const double denom = 2.0 * std_dev_ * std_dev_;
    Vector block(block_size());
    Index offset = 0;
    if (constant_) block(offset++) = 1.0;
    for (Index k = 0; k < centers_.rows(); ++k) {
        const double d2 = (s.transpose() - centers_.row(k)).squaredNorm();
        block(offset + k) = std::exp(-d2 / denom);
    }
    return block;
}

Vector RbfBasis::features(const State& s, Action a) const {
    check_action(a);
    if (actions_ == 0) return kernels(s);
    Vector phi = Vector::Zero(parameter_count());
    phi.segment(a * block_size(), block_size()) = kernels(s);
    return phi;
}

Matrix RbfBasis::action_features(const State& s) const {
    if (actions_ == 0) throw ContractViolation("action_features needs a Q-function");
    const Vector block = kernels(s);
    Matrix f = Matrix::Zero(parameter_count(), actions_);
    for (Index b = 0; b < actions_; ++b) f.block(b * block_size(), b, block_size(), 1) = block;
    return f;
}

Vector RbfBasis::action_values(const Vector& theta, const State& s) const {
    check_theta(theta);
    if (actions_ == 0) throw ContractViolation("action_values needs a Q-function");
    const Vector block = kernels(s);
    Vector q(actions_);
    for (Index b = 0; b < actions_; ++b) q(b) = theta.segment(b * block_size(), block_size()).dot(block);
    return q;
}

// ---------------------------------------------------------------------------

Vector BoyanFeatures::features(const State& s, Action a) const {
    check_action(a);
    if (s.size() != 1) throw ContractViolation("Boyan features need a scalar state index");
    const auto i = static_cast<int>(std::lround(s(0)));
    if (i < 0 || i > 12) throw ContractViolation("Boyan state out of range");
    // Anchor s^{4k} owns feature 3 - k.
    const int k = std::min(i / 4, 2);
    const double w = static_cast<double>(i - 4 * k) / 4.0;
    Vector phi = Vector::Zero(4);
    phi(3 - k) += 1.0 - w;
    phi(2 - k) += w;
    return phi;
}

// ---------------------------------------------------------------------------

Eigen::Matrix3d TsitsiklisParam::spiral_matrix() {
    Eigen::Matrix3d m;
    m << 1.0, 0.5, 1.5,
         1.5, 1.0, 0.5,
         0.5, 1.5, 1.0;
    return m;
}

Eigen::Vector3d TsitsiklisParam::initial_values() {
    return {10.0, -7.0, -3.0};
}

TsitsiklisParam::TsitsiklisParam(double epsilon) : epsilon_(epsilon) {
    const Eigen::Vector3d v0 = initial_values();
    mean_ = v0.mean();
    plane_ = v0.array() - mean_;
    turned_ = spiral_matrix() * plane_ / kSpiralRate;
}

// M is circulant with eigenvalues 3 (along the ones vector) and +-i sqrt(3)/2
// on the orthogonal plane, where it acts as a scaled quarter turn. Splitting
// V0 accordingly keeps the plane component free of the e^{3 theta} mode.
Eigen::Vector3d TsitsiklisParam::values(double theta) const {
    const double angle = kSpiralRate * theta;
    const Eigen::Vector3d in_plane = std::cos(angle) * plane_ + std::sin(angle) * turned_;
    const double along_ones = mean_ == 0.0 ? 0.0 : mean_ * std::exp(3.0 * theta);
    return std::exp(epsilon_ * theta) * (in_plane + Eigen::Vector3d::Constant(along_ones));
}

Eigen::Vector3d TsitsiklisParam::derivative(double theta) const {
    return (spiral_matrix() + epsilon_ * Eigen::Matrix3d::Identity()) * values(theta);
}

Index TsitsiklisParam::state_index(const State& s) {
    if (s.size() != 1) throw ContractViolation("Tsitsiklis chain state must be a scalar");
    const auto i = static_cast<Index>(std::lround(s(0)));
    if (i < 1 || i > 3) throw ContractViolation("Tsitsiklis chain state must be 1, 2 or 3");
    return i - 1;
}

double TsitsiklisParam::evaluate(const Vector& theta, const State& s, Action a) const {
    check_theta(theta);
    check_action(a);
    return values(theta(0))(state_index(s));
}

Vector TsitsiklisParam::gradient(const Vector& theta, const State& s, Action a) const {
    check_theta(theta);
    check_action(a);
    Vector g(1);
    g(0) = derivative(theta(0))(state_index(s));
    return g;
}

}  // namespace ktd
