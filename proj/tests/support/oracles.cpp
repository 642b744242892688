#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace ktd::testing {

Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
}

Mat random_spd(Eigen::Index n, std::mt19937_64& rng, double floor) {
    const Mat a = random_matrix(n, n, rng);
    return a * a.transpose() + floor * Mat::Identity(n, n);
}

Vec random_vector(Eigen::Index n, std::mt19937_64& rng) { return random_matrix(n, 1, rng); }

Mat expm_series(const Mat& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Mat scaled = a / std::pow(2.0, squarings);
    Mat term = Mat::Identity(a.rows(), a.cols());
    Mat sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

Vec stacked_ridge(const Vec& theta0, const Mat& p0, const Mat& rows, const Vec& targets, double noise) {
    const Eigen::Index p = theta0.size();
    const Eigen::Index m = rows.rows();
    const Mat l = Eigen::LLT<Mat>(p0).matrixL();
    const Mat l_inv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(p, p));
    Mat a(p + m, p);
    Vec b(p + m);
    a.topRows(p) = l_inv;
    b.head(p) = l_inv * theta0;
    a.bottomRows(m) = rows / std::sqrt(noise);
    b.tail(m) = targets / std::sqrt(noise);
    return a.colPivHouseholderQr().solve(b);
}

Vec forward_returns(const std::vector<double>& rewards, double gamma) {
    const auto n = static_cast<Eigen::Index>(rewards.size());
    Vec g = Vec::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double discount = 1.0;
        for (Eigen::Index k = j; k < n; ++k) {
            g(j) += discount * rewards[static_cast<std::size_t>(k)];
            discount *= gamma;
        }
    }
    return g;
}

double relative_error(const Vec& a, const Vec& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

double relative_error(const Mat& a, const Mat& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace ktd::testing
