#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "ktd/error.hpp"
#include "ktd/unscented.hpp"
#include "oracles.hpp"

using namespace ktd;
using ktd::testing::random_matrix;
using ktd::testing::random_spd;
using ktd::testing::random_vector;
using ktd::testing::relative_error;

namespace {

GaussianBelief scalar_belief(double mean, double variance) {
    return {Vector::Constant(1, mean), Matrix::Constant(1, 1, variance)};
}

}  // namespace

TEST(SigmaPoints, ScalarWithKappaTwo) {
    const SigmaPointSet set = generate_sigma_points(scalar_belief(0.0, 1.0), 2.0);
    ASSERT_EQ(set.size(), 3);
    EXPECT_DOUBLE_EQ(set.points(0, 0), 0.0);
    EXPECT_NEAR(set.points(0, 1), std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(set.points(0, 2), -std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(set.weights(0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(set.weights(1), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(set.weights(2), 1.0 / 6.0, 1e-15);
}

TEST(SigmaPoints, ZeroKappaHasNoCentralWeight) {
    GaussianBelief b{Vector::Zero(2), Matrix::Identity(2, 2)};
    const SigmaPointSet set = generate_sigma_points(b);
    EXPECT_EQ(set.weights(0), 0.0);
    for (Index j = 1; j < 5; ++j) EXPECT_DOUBLE_EQ(set.weights(j), 0.25);
}

TEST(SigmaPoints, ZeroCovarianceCollapsesToMean) {
    GaussianBelief b{Vector::LinSpaced(4, 1.0, 4.0), Matrix::Zero(4, 4)};
    const SigmaPointSet set = generate_sigma_points(b);
    for (Index j = 0; j < set.size(); ++j) EXPECT_EQ((set.point(j) - b.mean).norm(), 0.0);
}

TEST(SigmaPoints, ReconstructBeliefForRandomDimensions) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> kappa_dist(-0.5, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Index n = 1 + rep % 10;
        GaussianBelief b{random_vector(n, rng), random_spd(n, rng)};
        const double kappa = kappa_dist(rng);
        const SigmaPointSet set = generate_sigma_points(b, kappa);
        EXPECT_NEAR(set.weights.sum(), 1.0, 1e-12);
        const Vector mean = set.points * set.weights;
        EXPECT_LT((mean - b.mean).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, b.mean.cwiseAbs().maxCoeff()));
        const Matrix centered = set.points.colwise() - b.mean;
        const Matrix cov = centered * set.weights.asDiagonal() * centered.transpose();
        EXPECT_LT(relative_error(cov, b.covariance), 1e-10) << "n=" << n;
    }
}

TEST(SigmaPoints, SingularCovarianceFactorsWithoutJitter) {
    std::mt19937_64 rng(5);
    const Matrix a = random_matrix(5, 2, rng);
    const Matrix p = a * a.transpose();
    Matrix l;
    ASSERT_TRUE(psd_cholesky(p, l));
    EXPECT_LT(relative_error(Matrix(l * l.transpose()), p), 1e-12);
}

TEST(SigmaPoints, IndefiniteCovarianceRaisesWithDiagnostics) {
    Matrix p(2, 2);
    p << 1.0, 0.0, 0.0, -1.0;
    GaussianBelief b{Vector::Zero(2), p};
    try {
        generate_sigma_points(b);
        FAIL() << "expected DecompositionError";
    } catch (const DecompositionError& e) {
        EXPECT_EQ(e.dimension(), 2u);
        EXPECT_NEAR(e.min_eigenvalue(), -1.0, 1e-9);
    }
}

TEST(SigmaPoints, TinyNegativeDriftIsAbsorbedByJitter) {
    Matrix p = Matrix::Identity(3, 3);
    p(2, 2) = -1e-12;
    EXPECT_NO_THROW(generate_sigma_points(GaussianBelief{Vector::Zero(3), p}));
}

TEST(SigmaPoints, RejectsNonPositiveSpread) {
    EXPECT_THROW(generate_sigma_points(scalar_belief(0.0, 1.0), -1.0), ContractViolation);
    EXPECT_THROW(generate_sigma_points(GaussianBelief{Vector(), Matrix()}), ContractViolation);
}

TEST(Propagate, IdentityReturnsBelief) {
    std::mt19937_64 rng(3);
    GaussianBelief b{random_vector(4, rng), random_spd(4, rng)};
    const UnscentedMoments m = propagate(generate_sigma_points(b), [](const Vector& x) { return x; });
    EXPECT_LT(relative_error(m.mean, b.mean), 1e-12);
    EXPECT_LT(relative_error(m.covariance, b.covariance), 1e-12);
    EXPECT_LT(relative_error(m.cross_covariance, b.covariance), 1e-12);
}

TEST(Propagate, LinearScaling) {
    const ScalarMoments m =
        propagate_scalar(generate_sigma_points(scalar_belief(0.0, 1.0), 2.0), [](const Vector& x) { return 2.0 * x(0); });
    EXPECT_NEAR(m.mean, 0.0, 1e-15);
    EXPECT_NEAR(m.variance, 4.0, 1e-14);
    EXPECT_NEAR(m.cross_covariance(0), 2.0, 1e-14);
}

TEST(Propagate, SquareWithKappaTwoMatchesGaussianMoments) {
    const auto square = [](const Vector& x) { return x(0) * x(0); };
    const ScalarMoments m = propagate_scalar(generate_sigma_points(scalar_belief(0.0, 1.0), 2.0), square);
    EXPECT_NEAR(m.mean, 1.0, 1e-14);
    EXPECT_NEAR(m.variance, 2.0, 1e-14);

    std::mt19937_64 rng(2024);
    const auto mc = ktd::testing::monte_carlo(
        Vector::Zero(1), Matrix::Identity(1, 1), [&](const Vector& x) { return Vector::Constant(1, square(x)); },
        1000000, rng);
    EXPECT_NEAR(mc.mean(0), m.mean, 0.01);
    EXPECT_NEAR(mc.covariance(0, 0), m.variance, 0.03);
}

TEST(Propagate, AffineMappingsAreExact) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = 1 + rep % 10;
        const Index m = 1 + (rep * 7) % 6;
        GaussianBelief b{random_vector(n, rng), random_spd(n, rng)};
        const Matrix a = random_matrix(m, n, rng);
        const Vector c = random_vector(m, rng);
        const UnscentedMoments out =
            propagate(generate_sigma_points(b), [&](const Vector& x) -> Vector { return a * x + c; });
        EXPECT_LT(relative_error(out.mean, Vector(a * b.mean + c)), 1e-10);
        EXPECT_LT(relative_error(out.covariance, Matrix(a * b.covariance * a.transpose())), 1e-10);
        EXPECT_LT(relative_error(out.cross_covariance, Matrix(b.covariance * a.transpose())), 1e-10);
        EXPECT_LT((out.covariance - out.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Propagate, MappingFailureNamesThePoint) {
    GaussianBelief b{Vector::Zero(2), Matrix::Identity(2, 2)};
    const SigmaPointSet set = generate_sigma_points(b);
    try {
        propagate_scalar(set, [](const Vector& x) -> double {
            if (x(1) < -0.5) throw std::domain_error("negative");
            return x(0);
        });
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.point_index(), 4u);
    }
}

TEST(Propagate, ScalarVarianceIsNonNegative) {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        const Index n = 1 + rep % 6;
        GaussianBelief b{random_vector(n, rng), random_spd(n, rng)};
        const ScalarMoments m = propagate_scalar(generate_sigma_points(b), [](const Vector& x) {
            return std::sin(x(0)) + x.squaredNorm();
        });
        EXPECT_GE(m.variance, -1e-10);
    }
}
