#include "bls/cbls.hpp"

#include "bls/correntropy.hpp"
#include "bls/linalg.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace bls {

namespace {

Matrix scale_rows(const Vector& scale, const Matrix& M) {
    return scale.asDiagonal() * M;
}

// Rebuilds every derived cache from (state, targets, weights, W).
void rebuild_caches(CblsModel& model, const Vector& weights, Matrix W) {
    model.sample_weights = weights;
    const Vector root = weights.array().sqrt();
    model.weighted_state = scale_rows(root, model.state);
    model.weighted_targets = scale_rows(root, model.targets);

    const Eigen::Index L = model.state.cols();
    Matrix gram = Matrix::Zero(L, L);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(model.weighted_state.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += model.config.gamma;
    model.gram_inverse = invert_spd(gram);
    model.output_weights = std::move(W);
}

// The shared fixed-point loop: iterates from W0 over (U, Y), recording the
// objective at every iterate. On exit `weights_out` holds the diagonal used
// for the final solve, so the returned W is exactly its weighted ridge
// solution.
Matrix run_fixed_point(const Matrix& U, const Matrix& Y, const TrainConfig& config, Matrix W,
                       Vector& weights_out, bool& converged, int& iterations,
                       std::vector<double>& trace) {
    const double lambda = config.objective_lambda();
    trace.clear();
    trace.push_back(objective(U, W, Y, config.sigma, lambda));
    converged = false;
    iterations = 0;
    for (int t = 1; t <= config.max_iter; ++t) {
        weights_out = error_weights(U, W, Y, config.sigma);
        Matrix next = weighted_ridge_solve(U, Y, weights_out, config.gamma);
        trace.push_back(objective(U, next, Y, config.sigma, lambda));
        iterations = t;
        const double step = (next - W).squaredNorm();
        W = std::move(next);
        if (step < config.epsilon) {
            converged = true;
            break;
        }
    }
    return W;
}

// Shared tail of the node increments: the block-inversion update for a batch
// of new state columns, weighted by the frozen sample weights.
CblsModel append_weighted_columns(const CblsModel& model, RandomBasis new_basis,
                                  const Matrix& new_cols, const char* op) {
    const Matrix& U_w = model.weighted_state;
    const Matrix& C_w = model.gram_inverse;

    const Vector root = model.sample_weights.array().sqrt();
    const Matrix cols_w = scale_rows(root, new_cols);  // N x p

    const Matrix cross = U_w.transpose() * cols_w;     // L x p
    const Matrix Z = C_w * cross;                      // L x p
    const Matrix cols_gram = cols_w.transpose() * cols_w;
    Matrix Q_inv = cols_gram - cross.transpose() * Z;  // p x p
    Q_inv.diagonal().array() += model.config.gamma;

    // The subtraction above cancels completely when the new columns lie in
    // the span of the old ones, so judge the pivots against the scale of the
    // terms that went in, not against the (possibly vanishing) result.
    const Eigen::Index p = cols_w.cols();
    const double scale =
        std::max({model.config.gamma, cols_gram.diagonal().maxCoeff(), 1e-300});
    Eigen::LDLT<Matrix> ldlt(Q_inv);
    const double floor = scale * static_cast<double>(p) *
                         std::numeric_limits<double>::epsilon() * 64.0;
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > floor))
        throw NumericalError(std::string(op) +
                             ": new-node system is singular; raise gamma to regularize");
    Matrix Q = ldlt.solve(Matrix::Identity(p, p));
    Q = 0.5 * (Q + Q.transpose()).eval();

    const Matrix innovation = model.weighted_targets - U_w * model.output_weights;  // N x C
    const Matrix gain = Q * (cols_w.transpose() * innovation);                      // p x C

    CblsModel out = model;
    out.basis = std::move(new_basis);

    const Eigen::Index L = U_w.cols();
    out.output_weights.resize(L + p, model.targets.cols());
    out.output_weights.topRows(L) = model.output_weights - Z * gain;
    out.output_weights.bottomRows(p) = gain;

    out.gram_inverse.resize(L + p, L + p);
    out.gram_inverse.topLeftCorner(L, L) = C_w + Z * Q * Z.transpose();
    out.gram_inverse.topRightCorner(L, p) = -Z * Q;
    out.gram_inverse.bottomLeftCorner(p, L) = out.gram_inverse.topRightCorner(L, p).transpose();
    out.gram_inverse.bottomRightCorner(p, p) = Q;

    out.weighted_state.resize(U_w.rows(), L + p);
    out.weighted_state << U_w, cols_w;
    out.state.resize(model.state.rows(), L + p);
    out.state << model.state, new_cols;
    return out;
}

void check_increment_ready(const CblsModel& model, const char* op) {
    if (!model.converged)
        throw std::invalid_argument(std::string(op) +
                                    ": model did not converge; refresh or retrain first");
}

} // namespace

void TrainConfig::validate() const {
    require(gamma >= 0.0, "config: gamma must be nonnegative");
    require(sigma > 0.0 && std::isfinite(sigma), "config: sigma must be positive and finite");
    require(epsilon > 0.0, "config: epsilon must be positive");
    require(max_iter >= 1, "config: max_iter must be >= 1");
}

Matrix weighted_ridge_solve(const Matrix& U, const Matrix& Y, const Vector& weights,
                            double gamma) {
    require(U.rows() == Y.rows() && U.rows() == weights.size(),
            "weighted_ridge_solve: row counts must match");
    const Vector root = weights.array().sqrt();
    const Matrix U_w = scale_rows(root, U);
    const Eigen::Index L = U.cols();
    Matrix gram = Matrix::Zero(L, L);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(U_w.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += gamma;
    return solve_spd(gram, U.transpose() * scale_rows(weights, Y));
}

Matrix fixed_point_step(const Matrix& U, const Matrix& Y, const Matrix& W, double gamma,
                        double sigma) {
    require(gamma >= 0.0, "fixed_point_step: gamma must be nonnegative");
    const Vector weights = error_weights(U, W, Y, sigma);
    return weighted_ridge_solve(U, Y, weights, gamma);
}

CblsModel train_cbls(const Matrix& X, const Matrix& Y, const Architecture& arch,
                     const TrainConfig& config, Task task) {
    config.validate();
    require(X.rows() == Y.rows(), "train_cbls: sample counts must match");
    require(X.cols() == arch.input_dim, "train_cbls: input dimension mismatch");
    require(Y.cols() == arch.output_dim, "train_cbls: output dimension mismatch");

    CblsModel model;
    model.arch = arch;
    model.basis = init_basis(arch, config.seed);
    model.config = config;
    model.task = task;
    model.inputs = X;
    model.targets = Y;
    model.state = state_matrix(X, model.basis).values;

    Matrix W0 = ridge_solve(model.state, Y, config.gamma);
    Vector weights;
    Matrix W = run_fixed_point(model.state, Y, config, std::move(W0), weights, model.converged,
                               model.iterations, model.objective_trace);
    rebuild_caches(model, weights, std::move(W));
    return model;
}

Matrix predict(const CblsModel& model, const Matrix& X) {
    require(X.cols() == model.basis.input_dim(), "predict: input dimension mismatch");
    return state_matrix(X, model.basis).values * model.output_weights;
}

CblsModel cbls_add_samples(const CblsModel& model, const Matrix& X_new, const Matrix& Y_new) {
    check_increment_ready(model, "cbls_add_samples");
    require(X_new.rows() >= 1, "cbls_add_samples: no samples given");
    require(X_new.rows() == Y_new.rows(), "cbls_add_samples: sample counts must match");
    require(Y_new.cols() == model.targets.cols(), "cbls_add_samples: target width mismatch");

    const Matrix U_new = state_matrix(X_new, model.basis).values;  // N0 x L
    const Vector weights_new =
        error_weights(U_new, model.output_weights, Y_new, model.config.sigma);
    const Vector root = weights_new.array().sqrt();
    const Matrix U_w_new = scale_rows(root, U_new);
    const Matrix Y_w_new = scale_rows(root, Y_new);

    const Matrix& C_w = model.gram_inverse;
    const Matrix gain = C_w * U_w_new.transpose();        // L x N0
    Matrix S_inv = U_w_new * gain;                        // N0 x N0
    S_inv.diagonal().array() += 1.0;

    const Matrix innovation = Y_w_new - U_w_new * model.output_weights;

    CblsModel out = model;
    out.output_weights = model.output_weights + gain * solve_spd(S_inv, innovation);
    Matrix update = gain * solve_spd(S_inv, gain.transpose());
    out.gram_inverse = C_w - 0.5 * (update + update.transpose());

    const Eigen::Index N = model.state.rows(), N0 = X_new.rows();
    auto stack = [&](Matrix& dst, const Matrix& top, const Matrix& bottom) {
        dst.resize(N + N0, top.cols());
        dst << top, bottom;
    };
    stack(out.state, model.state, U_new);
    stack(out.inputs, model.inputs, X_new);
    stack(out.targets, model.targets, Y_new);
    stack(out.weighted_state, model.weighted_state, U_w_new);
    stack(out.weighted_targets, model.weighted_targets, Y_w_new);
    out.sample_weights.resize(N + N0);
    out.sample_weights << model.sample_weights, weights_new;
    return out;
}

CblsModel cbls_add_enhancement(const CblsModel& model, int node_count, std::uint64_t seed) {
    check_increment_ready(model, "cbls_add_enhancement");
    RandomBasis extended = extend_basis_enhancement(model.basis, node_count, seed);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_weighted_columns(model, std::move(extended), new_cols, "cbls_add_enhancement");
}

CblsModel cbls_add_enhancement_with(const CblsModel& model, const EnhancementMap& group) {
    check_increment_ready(model, "cbls_add_enhancement");
    RandomBasis extended = with_enhancement_group(model.basis, group);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_weighted_columns(model, std::move(extended), new_cols, "cbls_add_enhancement");
}

CblsModel cbls_add_features(const CblsModel& model, std::uint64_t seed) {
    check_increment_ready(model, "cbls_add_features");
    RandomBasis extended = extend_basis_feature(model.basis, seed);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_weighted_columns(model, std::move(extended), new_cols, "cbls_add_features");
}

CblsModel cbls_add_features_with(const CblsModel& model, const LinearMap& feature_group,
                                 const std::vector<EnhancementMap>& extensions) {
    check_increment_ready(model, "cbls_add_features");
    RandomBasis extended = with_feature_group(model.basis, feature_group, extensions);
    const Matrix new_cols =
        appended_state_columns(model.inputs, extended, model.basis.layout.size());
    return append_weighted_columns(model, std::move(extended), new_cols, "cbls_add_features");
}

CblsModel refresh_weights(const CblsModel& model) {
    CblsModel out = model;
    Vector weights;
    Matrix W = run_fixed_point(out.state, out.targets, out.config, out.output_weights, weights,
                               out.converged, out.iterations, out.objective_trace);
    rebuild_caches(out, weights, std::move(W));
    return out;
}

} // namespace bls
