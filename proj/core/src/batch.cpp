#include "ktd/batch.hpp"

#include "ktd/error.hpp"

namespace ktd {

Vector regularized_least_squares(const Vector& theta0, const Matrix& p0, const Matrix& rows,
                                 const Vector& targets, double noise_variance) {
    const Index p = theta0.size();
    if (p0.rows() != p || p0.cols() != p) throw ContractViolation("prior covariance shape mismatch");
    if (rows.cols() != p || rows.rows() != targets.size()) {
        throw ContractViolation("observation rows do not match the targets or parameters");
    }
    if (!(noise_variance > 0.0)) throw ContractViolation("noise variance must be positive");

    const Eigen::LLT<Matrix> prior(p0);
    if (prior.info() != Eigen::Success) throw ContractViolation("prior covariance must be positive definite");
    const Matrix prior_information = prior.solve(Matrix::Identity(p, p));
    const Matrix information = prior_information + rows.transpose() * rows / noise_variance;
    const Vector rhs = prior_information * theta0 + rows.transpose() * targets / noise_variance;
    return information.ldlt().solve(rhs);
}

Vector discounted_returns(const std::vector<double>& rewards, double gamma) {
    Vector g(static_cast<Index>(rewards.size()));
    double acc = 0.0;
    for (Index j = g.size() - 1; j >= 0; --j) {
        acc = rewards[static_cast<std::size_t>(j)] + gamma * acc;
        g(j) = acc;
    }
    return g;
}

}  // namespace ktd
