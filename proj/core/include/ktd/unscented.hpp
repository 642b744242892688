#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ktd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// First two moments of a random vector. This is the whole state of every
/// filter in the library.
struct GaussianBelief {
    Vector mean;
    Matrix covariance;

    Index dimension() const { return mean.size(); }

    /// Throws ContractViolation unless shapes agree, the covariance is
    /// symmetric within `symmetry_tol` elementwise and its smallest eigenvalue
    /// is at least `-psd_tol`.
    void validate(double symmetry_tol = 1e-12, double psd_tol = 1e-10) const;
};

/// Deterministic samples of a belief. Points are stored column-wise:
/// column 0 is the mean, columns 1..n are mean + L_j and n+1..2n are mean - L_j,
/// where L is the Cholesky factor of (n + kappa) P.
struct SigmaPointSet {
    Matrix points;
    Vector weights;
    double kappa = 0.0;

    Index dimension() const { return points.rows(); }
    Index size() const { return points.cols(); }
    auto point(Index j) const { return points.col(j); }
};

/// Lower-triangular L with L L^T = matrix for symmetric positive semi-definite
/// input. Zero pivots are accepted when the rest of their column vanishes, so
/// singular covariances (including the zero matrix) factor without jitter.
/// Returns false when the matrix is not PSD to working precision.
bool psd_cholesky(const Matrix& matrix, Matrix& lower);

/// Sigma points of `belief` with spread `kappa`; n + kappa must be positive.
/// On factorization failure, jitter eps*I with eps = 1e-9 * max(1, max diag)
/// is added once before throwing DecompositionError.
SigmaPointSet generate_sigma_points(const GaussianBelief& belief, double kappa = 0.0);

struct UnscentedMoments {
    Vector mean;
    Matrix covariance;
    Matrix cross_covariance;  ///< n_x by n_y
};

struct ScalarMoments {
    double mean = 0.0;
    double variance = 0.0;
    Vector cross_covariance;  ///< length n_x
};

using VectorMapping = std::function<Vector(const Vector&)>;
using ScalarMapping = std::function<double(const Vector&)>;

/// Weighted moments of the images of every sigma point. Exceptions thrown by
/// the mapping are rethrown as EvaluationError naming the point index.
UnscentedMoments propagate(const SigmaPointSet& set, const VectorMapping& mapping);
ScalarMoments propagate_scalar(const SigmaPointSet& set, const ScalarMapping& mapping);

/// Scalar moments from precomputed images y_j of the sigma points.
ScalarMoments moments_from_images(const SigmaPointSet& set, const Vector& images);

}  // namespace ktd
