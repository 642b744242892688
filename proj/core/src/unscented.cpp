#include "ktd/unscented.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <string>

#include "ktd/error.hpp"

namespace ktd {

namespace {

double max_asymmetry(const Matrix& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& m) {
    if (m.size() == 0 || !m.allFinite()) return std::numeric_limits<double>::quiet_NaN();
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

void GaussianBelief::validate(double symmetry_tol, double psd_tol) const {
    if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
        throw ContractViolation("belief covariance shape does not match mean length");
    }
    if (!mean.allFinite() || !covariance.allFinite()) {
        throw ContractViolation("belief contains non-finite entries");
    }
    if (mean.size() == 0) return;
    const double asym = max_asymmetry(covariance);
    if (asym > symmetry_tol) {
        throw ContractViolation("belief covariance is not symmetric (max asymmetry " +
                                std::to_string(asym) + ")");
    }
    const double lambda = min_eigenvalue(covariance);
    if (lambda < -psd_tol) {
        throw ContractViolation("belief covariance is not PSD (min eigenvalue " +
                                std::to_string(lambda) + ")");
    }
}

bool psd_cholesky(const Matrix& a, Matrix& lower) {
    const Index n = a.rows();
    lower.setZero(n, n);
    if (n == 0) return true;
    if (!a.allFinite()) return false;

    const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    const double pivot_tol = 16.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
    const double column_tol = 10.0 * std::sqrt(pivot_tol * scale);

    for (Index j = 0; j < n; ++j) {
        double d = a(j, j);
        for (Index k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (d < -pivot_tol) return false;
        if (d <= pivot_tol) {
            for (Index i = j + 1; i < n; ++i) {
                double v = a(i, j);
                for (Index k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
                if (std::abs(v) > column_tol) return false;
            }
            continue;
        }
        const double pivot = std::sqrt(d);
        lower(j, j) = pivot;
        for (Index i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (Index k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
            lower(i, j) = v / pivot;
        }
    }
    return true;
}

SigmaPointSet generate_sigma_points(const GaussianBelief& belief, double kappa) {
    const Index n = belief.mean.size();
    if (n == 0) throw ContractViolation("cannot sample an empty belief");
    if (belief.covariance.rows() != n || belief.covariance.cols() != n) {
        throw ContractViolation("belief covariance shape does not match mean length");
    }
    const double spread = static_cast<double>(n) + kappa;
    if (!(spread > 0.0)) {
        throw ContractViolation("sigma points need n + kappa > 0");
    }

    const Matrix scaled = spread * belief.covariance;
    Matrix root;
    if (!psd_cholesky(scaled, root)) {
        const double eps = 1e-9 * std::max(1.0, belief.covariance.diagonal().maxCoeff());
        const Matrix jittered = spread * (belief.covariance + eps * Matrix::Identity(n, n));
        if (!psd_cholesky(jittered, root)) {
            std::ostringstream msg;
            msg << "cholesky failed on " << n << "x" << n << " covariance (min eigenvalue "
                << min_eigenvalue(belief.covariance) << ", max asymmetry "
                << max_asymmetry(belief.covariance) << ")";
            throw DecompositionError(msg.str(), static_cast<std::size_t>(n),
                                     min_eigenvalue(belief.covariance),
                                     max_asymmetry(belief.covariance));
        }
    }

    SigmaPointSet set;
    set.kappa = kappa;
    set.points.resize(n, 2 * n + 1);
    set.points.col(0) = belief.mean;
    for (Index j = 0; j < n; ++j) {
        set.points.col(1 + j) = belief.mean + root.col(j);
        set.points.col(1 + n + j) = belief.mean - root.col(j);
    }
    set.weights.resize(2 * n + 1);
    set.weights(0) = kappa / spread;
    set.weights.tail(2 * n).setConstant(1.0 / (2.0 * spread));
    return set;
}

UnscentedMoments propagate(const SigmaPointSet& set, const VectorMapping& mapping) {
    const Index count = set.size();
    Matrix images;
    for (Index j = 0; j < count; ++j) {
        Vector y;
        try {
            y = mapping(set.points.col(j));
        } catch (const std::exception& e) {
            throw EvaluationError("mapping failed on sigma point " + std::to_string(j) + ": " +
                                      e.what(),
                                  static_cast<std::size_t>(j));
        }
        if (j == 0) {
            images.resize(y.size(), count);
        } else if (y.size() != images.rows()) {
            throw EvaluationError("mapping returned inconsistent output size on sigma point " +
                                      std::to_string(j),
                                  static_cast<std::size_t>(j));
        }
        images.col(j) = y;
    }

    UnscentedMoments out;
    out.mean = images * set.weights;
    const Matrix dy = images.colwise() - out.mean;
    const Matrix dx = set.points.colwise() - Vector(set.points.col(0));
    const Matrix weighted_dy = dy * set.weights.asDiagonal();
    out.covariance = weighted_dy * dy.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    out.cross_covariance = dx * weighted_dy.transpose();
    return out;
}

ScalarMoments moments_from_images(const SigmaPointSet& set, const Vector& images) {
    if (images.size() != set.size()) {
        throw ContractViolation("image count does not match sigma point count");
    }
    ScalarMoments out;
    out.mean = set.weights.dot(images);
    const Vector dy = images.array() - out.mean;
    const Vector weighted = set.weights.cwiseProduct(dy);
    out.variance = weighted.dot(dy);
    out.cross_covariance = (set.points.colwise() - Vector(set.points.col(0))) * weighted;
    return out;
}

ScalarMoments propagate_scalar(const SigmaPointSet& set, const ScalarMapping& mapping) {
    Vector images(set.size());
    for (Index j = 0; j < set.size(); ++j) {
        try {
            images(j) = mapping(set.points.col(j));
        } catch (const std::exception& e) {
            throw EvaluationError("mapping failed on sigma point " + std::to_string(j) + ": " +
                                      e.what(),
                                  static_cast<std::size_t>(j));
        }
    }
    return moments_from_images(set, images);
}

}  // namespace ktd
