#pragma once

#include "bls/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bls {

/// Per-column affine range used by the normalizer; enough to invert the
/// transform. Constant columns are mapped to the range midpoint.
struct ColumnRange {
    double min = 0.0;
    double max = 0.0;
    bool degenerate() const { return max <= min; }
};

struct Dataset {
    Matrix X;  // N x M
    Matrix Y;  // N x C (one-hot for classification)
    Task task = Task::regression;
    std::vector<ColumnRange> feature_ranges;  // recorded by normalize
    std::vector<ColumnRange> target_ranges;
    std::vector<std::string> class_labels;  // classification: label text by index
    std::vector<int> labels;                // classification: label index per row

    Eigen::Index sample_count() const { return X.rows(); }
};

/// How to interpret the columns of a CSV file. Exactly one of target_columns
/// (regression) or label_column (classification) selects the targets; all
/// remaining columns are features. Negative indices count from the last
/// column, so -1 means "last".
struct CsvSchema {
    bool has_header = false;
    std::vector<int> target_columns;  // regression targets
    int label_column = -1;            // classification label (used when targets empty)
    bool classification = false;
    /// When set, labels map to these indices instead of first-appearance
    /// order, and an unseen label is an error. Lets a test file reuse the
    /// vocabulary a model was trained with.
    std::vector<std::string> label_order;
};

Dataset load_csv(const std::string& path, const CsvSchema& schema);
void save_csv(const std::string& path, const Dataset& ds);

enum class NormalizeMode { regression_unit, classification_sym };

/// Per-column affine normalization. regression_unit maps features and targets
/// to [0, 1]; classification_sym maps features only, to [-1, 1].
Dataset normalize(const Dataset& ds, NormalizeMode mode);

/// Applies previously recorded ranges to another dataset, e.g. the training
/// transform to a test set.
Dataset apply_normalization(const Dataset& ds, const std::vector<ColumnRange>& feature_ranges,
                            const std::vector<ColumnRange>& target_ranges, NormalizeMode mode);

/// Undoes the recorded target normalization (regression datasets).
Matrix denormalize_targets(const Dataset& ds, const Matrix& Y);

Matrix one_hot(const std::vector<int>& labels, int num_classes);

/// Adds a uniform draw from [lo, hi] to the targets of ceil(fraction * N)
/// distinct rows chosen uniformly. Regression only.
Dataset inject_target_outliers(const Dataset& ds, double fraction, double lo, double hi,
                               std::uint64_t seed);

/// Flips the labels of ceil(fraction * N) distinct rows to the opposite
/// class. Binary classification only.
Dataset flip_labels(const Dataset& ds, double fraction, std::uint64_t seed);

} // namespace bls
