#pragma once

#include "bls/core.hpp"

namespace bls {

/// Solves A * X = B for symmetric positive (semi-)definite A without forming
/// an explicit inverse. Throws NumericalError when A is numerically singular.
Matrix solve_spd(const Matrix& A, const Matrix& B);

/// Explicit inverse of a symmetric positive definite matrix. Only used where
/// the inverse itself is the quantity carried forward.
Matrix invert_spd(const Matrix& A);

/// Regularized least-squares weights: (U'U + lambda*I)^-1 U'Y.
/// lambda = 0 is allowed as long as U'U has full rank.
Matrix ridge_solve(const Matrix& U, const Matrix& Y, double lambda);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// max(rows, cols) * eps * sigma_max are treated as zero.
Matrix pseudoinverse(const Matrix& U);

} // namespace bls
