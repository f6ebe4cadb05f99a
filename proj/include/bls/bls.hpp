#pragma once

#include "bls/broadnet.hpp"
#include "bls/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bls {

/// Above this regularization the pseudoinverse-based incremental updates no
/// longer approximate the ridge solution and are rejected; the weighted
/// incremental algorithms handle arbitrary regularization instead.
inline constexpr double kPinvLambdaThreshold = 1e-8;

/// Trained flat network. Increment operations return a new model; the cached
/// training data, state matrix and pseudoinverse are what the closed-form
/// updates operate on.
struct BlsModel {
    Architecture arch;  // shape at initial training time
    RandomBasis basis;
    Matrix output_weights;  // L x C
    double lambda = 0.0;
    Task task = Task::regression;

    Matrix inputs;      // training X, N x M
    Matrix targets;     // training Y, N x C
    Matrix state;       // U, N x L
    Matrix state_pinv;  // L x N; empty outside the pseudoinverse regime

    std::vector<std::string> class_labels;  // label vocabulary (classification)

    bool pinv_regime() const { return lambda <= kPinvLambdaThreshold; }
    int state_width() const { return static_cast<int>(output_weights.rows()); }
};

/// Builds the basis and state matrix, then solves for the output weights:
/// pseudoinverse when lambda is effectively zero, ridge otherwise.
BlsModel train_bls(const Matrix& X, const Matrix& Y, const Architecture& arch, double lambda,
                   std::uint64_t seed, Task task = Task::regression);

Matrix predict(const BlsModel& model, const Matrix& X);

/// Argmax per row; ties resolve to the lowest index.
std::vector<int> decode_labels(const Matrix& scores);

/// Folds a batch of new samples into the model via the rank-update of the
/// cached pseudoinverse. Requires the pseudoinverse regime.
BlsModel bls_add_samples(const BlsModel& model, const Matrix& X_new, const Matrix& Y_new);

/// Appends `node_count` random enhancement nodes and updates the weights and
/// pseudoinverse in place of a full retrain.
BlsModel bls_add_enhancement(const BlsModel& model, int node_count, std::uint64_t seed);

/// Appends a random feature group together with its extension enhancement
/// block, updating weights and pseudoinverse incrementally.
BlsModel bls_add_features(const BlsModel& model, std::uint64_t seed);

/// Deterministic variants used when the caller supplies the new group(s)
/// instead of drawing them from a seed.
BlsModel bls_add_enhancement_with(const BlsModel& model, const EnhancementMap& group);
BlsModel bls_add_features_with(const BlsModel& model, const LinearMap& feature_group,
                               const std::vector<EnhancementMap>& extensions);

} // namespace bls
