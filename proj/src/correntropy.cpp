#include "bls/correntropy.hpp"

#include <cmath>

namespace bls {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kExponentFloor = -700.0;  // exp underflows to denormals below this

void check_sigma(double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma), "kernel size sigma must be positive and finite");
}

void check_shapes(const Matrix& U, const Matrix& W, const Matrix& Y) {
    require(U.cols() == W.rows(), "state/weight dimension mismatch");
    require(U.rows() == Y.rows() && W.cols() == Y.cols(), "weight/target dimension mismatch");
}

} // namespace

double gaussian_kernel(const Vector& x, const Vector& y, double sigma) {
    check_sigma(sigma);
    require(x.size() == y.size(), "gaussian_kernel: length mismatch");
    const double sq = (x - y).squaredNorm();
    return std::exp(-sq / (2.0 * sigma * sigma)) / (std::sqrt(kTwoPi) * sigma);
}

double correntropy_estimate(const Matrix& xs, const Matrix& ys, double sigma) {
    check_sigma(sigma);
    require(xs.rows() == ys.rows() && xs.cols() == ys.cols(),
            "correntropy_estimate: shape mismatch");
    require(xs.rows() >= 1, "correntropy_estimate: empty input");
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i)
        acc += std::exp(-(xs.row(i) - ys.row(i)).squaredNorm() * inv_two_sigma_sq);
    return acc / (static_cast<double>(xs.rows()) * std::sqrt(kTwoPi) * sigma);
}

Vector error_weights(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma) {
    check_sigma(sigma);
    check_shapes(U, W, Y);
    const Matrix residual = U * W - Y;
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    Vector weights(U.rows());
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double exponent = -residual.row(i).squaredNorm() * inv_two_sigma_sq;
        weights(i) = exponent < kExponentFloor ? 0.0 : std::exp(exponent);
    }
    return weights;
}

double objective(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma, double lambda) {
    check_sigma(sigma);
    check_shapes(U, W, Y);
    const Matrix residual = U * W - Y;
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < U.rows(); ++i)
        acc += std::exp(-residual.row(i).squaredNorm() * inv_two_sigma_sq);
    return acc - 0.5 * lambda * W.squaredNorm();
}

Matrix objective_gradient(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma,
                          double lambda) {
    const Vector weights = error_weights(U, W, Y, sigma);
    const Matrix residual = U * W - Y;
    return (-1.0 / (sigma * sigma)) * (U.transpose() * (weights.asDiagonal() * residual)) -
           lambda * W;
}

double normalized_objective(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma,
                            double lambda) {
    require(U.rows() >= 1, "normalized_objective: empty input");
    return objective(U, W, Y, sigma, lambda) / static_cast<double>(U.rows());
}

} // namespace bls
