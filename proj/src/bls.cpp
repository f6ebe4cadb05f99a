#include "bls/bls.hpp"

#include "bls/linalg.hpp"

#include <cmath>
#include <utility>

namespace bls {

namespace {

// Floating-point stand-in for the exact "C = 0" branch test.
bool effectively_zero(const Matrix& C, const Matrix& reference) {
    return C.norm() < 1e-10 * std::max(1.0, reference.norm());
}

void check_pinv_regime(const BlsModel& model, const char* op) {
    if (!model.pinv_regime())
        throw NumericalError(
            std::string(op) +
            ": pseudoinverse-based updates assume the regularization factor tends to zero "
            "(lambda <= 1e-8); use the weighted C-BLS increments for larger lambda");
}

// Shared tail of the node-increment updates: given the freshly extended basis
// and the new state columns for the cached training inputs, updates weights
// and pseudoinverse without retraining.
//
// The update is applied one column at a time. A whole-block version with a
// single branch test is only exact when every new column is in the span of
// the old ones or none is; appending a feature group under the identity
// feature map routinely produces the mixed case (the new feature columns are
// linear in the input and already spanned, the extension columns are not).
// Column-wise application is the same formula with p = 1 and is exact for
// every rank pattern.
BlsModel append_state_columns(const BlsModel& model, RandomBasis new_basis,
                              const Matrix& new_cols) {
    BlsModel out = model;
    out.basis = std::move(new_basis);

    const Eigen::Index N = model.state.rows(), p = new_cols.cols();
    for (Eigen::Index j = 0; j < p; ++j) {
        const Matrix& U = out.state;
        const Matrix& U_pinv = out.state_pinv;
        const Eigen::Index L = U.cols();
        const Vector a = new_cols.col(j);

        const Vector d = U_pinv * a;   // L
        const Vector c = a - U * d;    // N
        RowVector b_t(N);              // 1 x N
        if (effectively_zero(c, a)) {
            b_t = (d.transpose() * U_pinv) / (1.0 + d.squaredNorm());
        } else {
            b_t = c.transpose() / c.squaredNorm();
        }

        const RowVector projected = b_t * out.targets;  // 1 x C

        Matrix weights(L + 1, out.targets.cols());
        weights.topRows(L) = out.output_weights - d * projected;
        weights.bottomRows(1) = projected;
        out.output_weights = std::move(weights);

        Matrix state(N, L + 1);
        state << U, a;
        out.state = std::move(state);

        Matrix pinv(L + 1, N);
        pinv.topRows(L) = U_pinv - d * b_t;
        pinv.bottomRows(1) = b_t;
        out.state_pinv = std::move(pinv);
    }
    return out;
}

} // namespace

BlsModel train_bls(const Matrix& X, const Matrix& Y, const Architecture& arch, double lambda,
                   std::uint64_t seed, Task task) {
    require(X.rows() == Y.rows(), "train_bls: sample counts must match");
    require(X.cols() == arch.input_dim, "train_bls: input dimension mismatch");
    require(Y.cols() == arch.output_dim, "train_bls: output dimension mismatch");
    require(lambda >= 0.0, "train_bls: lambda must be nonnegative");

    BlsModel model;
    model.arch = arch;
    model.basis = init_basis(arch, seed);
    model.lambda = lambda;
    model.task = task;
    model.inputs = X;
    model.targets = Y;
    model.state = state_matrix(X, model.basis).values;

    if (model.pinv_regime()) {
        model.state_pinv = pseudoinverse(model.state);
        model.output_weights = model.state_pinv * Y;
    } else {
        model.output_weights = ridge_solve(model.state, Y, lambda);
    }
    return model;
}

Matrix predict(const BlsModel& model, const Matrix& X) {
    require(X.cols() == model.basis.input_dim(), "predict: input dimension mismatch");
    return state_matrix(X, model.basis).values * model.output_weights;
}

std::vector<int> decode_labels(const Matrix& scores) {
    std::vector<int> labels(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        for (Eigen::Index j = 1; j < scores.cols(); ++j)
            if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

BlsModel bls_add_samples(const BlsModel& model, const Matrix& X_new, const Matrix& Y_new) {
    check_pinv_regime(model, "bls_add_samples");
    require(X_new.rows() >= 1, "bls_add_samples: no samples given");
    require(X_new.rows() == Y_new.rows(), "bls_add_samples: sample counts must match");
    require(Y_new.cols() == model.targets.cols(), "bls_add_samples: target width mismatch");

    const Matrix U_new = state_matrix(X_new, model.basis).values;  // N0 x L

    // Row-by-row for the same reason append_state_columns works column-wise:
    // a batch mixing rows inside and outside the current row space defeats
    // the single block branch test, while the rank-one form is always exact.
    BlsModel out = model;
    const Eigen::Index N0 = X_new.rows(), L = model.state.cols();
    for (Eigen::Index i = 0; i < N0; ++i) {
        const Eigen::Index N = out.state.rows();
        const RowVector u = U_new.row(i);

        const RowVector d = u * out.state_pinv;  // 1 x N
        const RowVector c = u - d * out.state;   // 1 x L
        Vector b(L);
        if (effectively_zero(c, u)) {
            b = out.state_pinv * d.transpose() / (1.0 + d.squaredNorm());
        } else {
            b = c.transpose() / c.squaredNorm();
        }

        out.output_weights += b * (Y_new.row(i) - u * out.output_weights);

        Matrix state(N + 1, L);
        state << out.state, u;
        out.state = std::move(state);

        Matrix pinv(L, N + 1);
        pinv.leftCols(N) = out.state_pinv - b * d;
        pinv.rightCols(1) = b;
        out.state_pinv = std::move(pinv);
    }

    const Eigen::Index N = model.state.rows();
    out.inputs.resize(N + N0, model.inputs.cols());
    out.inputs << model.inputs, X_new;
    out.targets.resize(N + N0, model.targets.cols());
    out.targets << model.targets, Y_new;
    return out;
}

BlsModel bls_add_enhancement(const BlsModel& model, int node_count, std::uint64_t seed) {
    check_pinv_regime(model, "bls_add_enhancement");
    RandomBasis extended = extend_basis_enhancement(model.basis, node_count, seed);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_state_columns(model, std::move(extended), new_cols);
}

BlsModel bls_add_enhancement_with(const BlsModel& model, const EnhancementMap& group) {
    check_pinv_regime(model, "bls_add_enhancement");
    RandomBasis extended = with_enhancement_group(model.basis, group);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_state_columns(model, std::move(extended), new_cols);
}

BlsModel bls_add_features(const BlsModel& model, std::uint64_t seed) {
    check_pinv_regime(model, "bls_add_features");
    RandomBasis extended = extend_basis_feature(model.basis, seed);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_state_columns(model, std::move(extended), new_cols);
}

BlsModel bls_add_features_with(const BlsModel& model, const LinearMap& feature_group,
                               const std::vector<EnhancementMap>& extensions) {
    check_pinv_regime(model, "bls_add_features");
    RandomBasis extended = with_feature_group(model.basis, feature_group, extensions);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_state_columns(model, std::move(extended), new_cols);
}

} // namespace bls
