#pragma once

#include "bls/broadnet.hpp"
#include "bls/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bls {

/// Settings for the correntropy fixed-point trainer. gamma is the user-facing
/// regularizer; the objective's lambda is derived as gamma / sigma^2.
struct TrainConfig {
    double gamma = 9.31322574615478515625e-10;  // 2^-30
    double sigma = 1.0;
    double epsilon = 1e-8;  // on the squared Frobenius step between iterates
    int max_iter = 50;
    std::uint64_t seed = 0;

    void validate() const;
    double objective_lambda() const { return gamma / (sigma * sigma); }
};

/// Robust model trained under the correntropy criterion. Besides the output
/// weights it carries the inverse weighted autocorrelation and the weighted
/// state/target matrices; the closed-form increment operations work entirely
/// from these caches, with the per-sample weights frozen at their values from
/// training time.
struct CblsModel {
    Architecture arch;
    RandomBasis basis;
    Matrix output_weights;   // W, L x C
    Matrix gram_inverse;     // (U_w' U_w + gamma I)^-1, L x L
    Matrix weighted_state;   // sqrt(diag(weights)) * U, N x L
    Matrix weighted_targets; // sqrt(diag(weights)) * Y, N x C
    Vector sample_weights;   // frozen per-sample weights, length N

    Matrix inputs;   // raw X, kept for node increments and refresh
    Matrix targets;  // raw Y
    Matrix state;    // raw U

    std::vector<std::string> class_labels;  // label vocabulary (classification)

    TrainConfig config;
    Task task = Task::regression;
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective_trace;  // objective at each iterate, W(0) first

    int state_width() const { return static_cast<int>(output_weights.rows()); }
};

/// One weighted ridge solve with the given per-sample weights:
/// (U' diag(w) U + gamma I)^-1 U' diag(w) Y.
Matrix weighted_ridge_solve(const Matrix& U, const Matrix& Y, const Vector& weights,
                            double gamma);

/// A single half-quadratic iteration: recompute the error weights at W, then
/// solve the weighted ridge system.
Matrix fixed_point_step(const Matrix& U, const Matrix& Y, const Matrix& W, double gamma,
                        double sigma);

/// Fixed-point training. Starts from the ridge solution, iterates until the
/// squared step norm drops below epsilon or max_iter is hit; the returned
/// model is flagged not-converged in the latter case.
CblsModel train_cbls(const Matrix& X, const Matrix& Y, const Architecture& arch,
                     const TrainConfig& config, Task task = Task::regression);

Matrix predict(const CblsModel& model, const Matrix& X);

/// Folds new samples in through the matrix-inversion lemma. The weights of
/// the new rows come from the current W; existing rows keep their frozen
/// weights.
CblsModel cbls_add_samples(const CblsModel& model, const Matrix& X_new, const Matrix& Y_new);

/// Appends enhancement nodes via the block-inversion lemma, weighting the new
/// columns with the frozen per-sample weights.
CblsModel cbls_add_enhancement(const CblsModel& model, int node_count, std::uint64_t seed);

/// Appends a feature group plus extension enhancement block, same update
/// shape as cbls_add_enhancement.
CblsModel cbls_add_features(const CblsModel& model, std::uint64_t seed);

/// Caller-supplied-tensor variants of the node increments.
CblsModel cbls_add_enhancement_with(const CblsModel& model, const EnhancementMap& group);
CblsModel cbls_add_features_with(const CblsModel& model, const LinearMap& feature_group,
                                 const std::vector<EnhancementMap>& extensions);

/// Recomputes all sample weights at the current W and re-runs the fixed-point
/// iteration to convergence, closing the gap the frozen-weight increments
/// leave open. A no-op (within epsilon) on a freshly trained model.
CblsModel refresh_weights(const CblsModel& model);

} // namespace bls
