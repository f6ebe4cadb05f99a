#include "bls/linalg.hpp"

#include <Eigen/SVD>

#include <limits>

namespace bls {

namespace {

Eigen::LDLT<Matrix> factor_spd(const Matrix& A) {
    Eigen::LDLT<Matrix> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("solve_spd: factorization failed");
    const Vector d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    const double floor =
        dmax * static_cast<double>(A.rows()) * std::numeric_limits<double>::epsilon();
    if (dmax <= 0.0 || d.minCoeff() <= floor)
        throw NumericalError("solve_spd: matrix is singular or severely ill-conditioned");
    return ldlt;
}

} // namespace

Matrix solve_spd(const Matrix& A, const Matrix& B) {
    require(A.rows() == A.cols(), "solve_spd: matrix must be square");
    require(A.rows() == B.rows(), "solve_spd: row counts must match");
    return factor_spd(A).solve(B);
}

Matrix invert_spd(const Matrix& A) {
    require(A.rows() == A.cols(), "invert_spd: matrix must be square");
    return factor_spd(A).solve(Matrix::Identity(A.rows(), A.cols()));
}

Matrix ridge_solve(const Matrix& U, const Matrix& Y, double lambda) {
    require(U.rows() == Y.rows(), "ridge_solve: row counts must match");
    require(lambda >= 0.0, "ridge_solve: lambda must be nonnegative");
    const Eigen::Index width = U.cols();
    Matrix gram = Matrix::Zero(width, width);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(U.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += lambda;
    return solve_spd(gram, U.transpose() * Y);
}

Matrix pseudoinverse(const Matrix& U) {
    if (U.size() == 0) return Matrix(U.cols(), U.rows());
    Eigen::BDCSVD<Matrix> svd(U, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = static_cast<double>(std::max(U.rows(), U.cols())) *
                          std::numeric_limits<double>::epsilon() *
                          (sv.size() > 0 ? sv(0) : 0.0);
    Vector inv_sv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

} // namespace bls
