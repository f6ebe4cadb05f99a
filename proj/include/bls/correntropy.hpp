#pragma once

#include "bls/core.hpp"

namespace bls {

/// Normalized Gaussian kernel (1/(sqrt(2*pi)*sigma)) * exp(-|x-y|^2 / (2*sigma^2)).
double gaussian_kernel(const Vector& x, const Vector& y, double sigma);

/// Sample correntropy: mean of the Gaussian kernel over paired rows.
double correntropy_estimate(const Matrix& xs, const Matrix& ys, double sigma);

/// Per-sample error weights exp(-|u_i W - y_i|^2 / (2*sigma^2)). Note the
/// exponent is unnormalized, unlike the kernel above; the two must not be
/// conflated. Exponents below -700 clamp the weight to exactly 0.
Vector error_weights(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma);

/// Correntropy objective sum_i exp(-|u_i W - y_i|^2/(2 sigma^2)) - (lambda/2)|W|_F^2.
double objective(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma, double lambda);

/// Gradient of the objective with respect to W:
/// -(1/sigma^2) U' diag(weights) (U W - Y) - lambda W.
Matrix objective_gradient(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma,
                          double lambda);

/// objective / N, the per-sample convergence functional.
double normalized_objective(const Matrix& U, const Matrix& W, const Matrix& Y, double sigma,
                            double lambda);

} // namespace bls
