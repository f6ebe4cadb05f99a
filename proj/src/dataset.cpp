#include "bls/dataset.hpp"

#include "bls/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bls {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("csv: non-numeric cell '" + cell + "' at row " +
                                 std::to_string(row + 1) + ", column " + std::to_string(col + 1));
    }
}

int resolve_column(int index, int width) {
    const int resolved = index < 0 ? width + index : index;
    require(resolved >= 0 && resolved < width, "csv: target column out of range");
    return resolved;
}

// Distinct row indices, chosen uniformly without replacement via a partial
// Fisher-Yates shuffle.
std::vector<Eigen::Index> sample_rows(Eigen::Index n, Eigen::Index count, std::uint64_t seed) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng rng(seed, 0x726f7773ULL);  // "rows"
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(count));
    return idx;
}

Eigen::Index contaminated_count(Eigen::Index n, double fraction) {
    require(fraction >= 0.0 && fraction <= 1.0, "contamination fraction must be in [0, 1]");
    return static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(n)));
}

} // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && schema.has_header) {
            first = false;
            continue;
        }
        first = false;
        rows.push_back(split_row(line));
    }
    if (rows.empty()) throw std::runtime_error("csv: no data rows in " + path);

    const int width = static_cast<int>(rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (static_cast<int>(rows[r].size()) != width)
            throw std::runtime_error("csv: ragged row " + std::to_string(r + 1) + " in " + path);

    const bool classification = schema.classification;
    std::vector<int> target_cols;
    if (classification) {
        target_cols.push_back(resolve_column(schema.label_column, width));
    } else if (schema.target_columns.empty()) {
        target_cols.push_back(width - 1);
    } else {
        for (int c : schema.target_columns) target_cols.push_back(resolve_column(c, width));
    }
    require(static_cast<int>(target_cols.size()) < width, "csv: no feature columns left");

    std::vector<bool> is_target(static_cast<std::size_t>(width), false);
    for (int c : target_cols) is_target[static_cast<std::size_t>(c)] = true;

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(width - static_cast<int>(target_cols.size()));

    Dataset ds;
    ds.task = classification ? Task::classification : Task::regression;
    ds.X.resize(n, m);

    if (classification) {
        const bool pinned = !schema.label_order.empty();
        ds.class_labels = schema.label_order;
        ds.labels.resize(static_cast<std::size_t>(n));
        for (Eigen::Index r = 0; r < n; ++r) {
            const std::string& text = rows[static_cast<std::size_t>(r)]
                                          [static_cast<std::size_t>(target_cols.front())];
            auto it = std::find(ds.class_labels.begin(), ds.class_labels.end(), text);
            if (it == ds.class_labels.end()) {
                if (pinned)
                    throw std::runtime_error("csv: label '" + text +
                                             "' is not in the pinned label set");
                ds.class_labels.push_back(text);  // first-appearance order
                it = std::prev(ds.class_labels.end());
            }
            ds.labels[static_cast<std::size_t>(r)] =
                static_cast<int>(std::distance(ds.class_labels.begin(), it));
        }
        ds.Y = one_hot(ds.labels, static_cast<int>(ds.class_labels.size()));
    } else {
        ds.Y.resize(n, static_cast<Eigen::Index>(target_cols.size()));
    }

    for (Eigen::Index r = 0; r < n; ++r) {
        Eigen::Index xc = 0, yc = 0;
        for (int c = 0; c < width; ++c) {
            const std::string& cell = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (is_target[static_cast<std::size_t>(c)]) {
                if (!classification)
                    ds.Y(r, yc++) = parse_number(cell, static_cast<std::size_t>(r),
                                                 static_cast<std::size_t>(c));
            } else {
                ds.X(r, xc++) = parse_number(cell, static_cast<std::size_t>(r),
                                             static_cast<std::size_t>(c));
            }
        }
    }
    return ds;
}

void save_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    out.precision(17);
    for (Eigen::Index r = 0; r < ds.X.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.X.cols(); ++c) out << ds.X(r, c) << ',';
        if (ds.task == Task::classification) {
            out << ds.class_labels[static_cast<std::size_t>(
                ds.labels[static_cast<std::size_t>(r)])];
        } else {
            for (Eigen::Index c = 0; c < ds.Y.cols(); ++c) {
                out << ds.Y(r, c);
                if (c + 1 < ds.Y.cols()) out << ',';
            }
        }
        out << '\n';
    }
}

namespace {

void normalize_columns(Matrix& M, std::vector<ColumnRange>& ranges, double lo, double hi) {
    ranges.resize(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
        ColumnRange r{M.col(c).minCoeff(), M.col(c).maxCoeff()};
        ranges[static_cast<std::size_t>(c)] = r;
        if (r.degenerate()) {
            M.col(c).setConstant(0.5 * (lo + hi));
        } else {
            const double scale = (hi - lo) / (r.max - r.min);
            M.col(c) = ((M.col(c).array() - r.min) * scale + lo).matrix();
        }
    }
}

} // namespace

Dataset normalize(const Dataset& ds, NormalizeMode mode) {
    Dataset out = ds;
    if (mode == NormalizeMode::regression_unit) {
        require(ds.task == Task::regression, "normalize: regression_unit expects regression data");
        normalize_columns(out.X, out.feature_ranges, 0.0, 1.0);
        normalize_columns(out.Y, out.target_ranges, 0.0, 1.0);
    } else {
        normalize_columns(out.X, out.feature_ranges, -1.0, 1.0);
    }
    return out;
}

namespace {

void apply_ranges(Matrix& M, const std::vector<ColumnRange>& ranges, double lo, double hi) {
    require(static_cast<std::size_t>(M.cols()) == ranges.size(),
            "apply_normalization: column count does not match recorded ranges");
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
        const ColumnRange& r = ranges[static_cast<std::size_t>(c)];
        if (r.degenerate()) {
            M.col(c).setConstant(0.5 * (lo + hi));
        } else {
            const double scale = (hi - lo) / (r.max - r.min);
            M.col(c) = ((M.col(c).array() - r.min) * scale + lo).matrix();
        }
    }
}

} // namespace

Dataset apply_normalization(const Dataset& ds, const std::vector<ColumnRange>& feature_ranges,
                            const std::vector<ColumnRange>& target_ranges, NormalizeMode mode) {
    Dataset out = ds;
    if (mode == NormalizeMode::regression_unit) {
        apply_ranges(out.X, feature_ranges, 0.0, 1.0);
        apply_ranges(out.Y, target_ranges, 0.0, 1.0);
    } else {
        apply_ranges(out.X, feature_ranges, -1.0, 1.0);
    }
    out.feature_ranges = feature_ranges;
    out.target_ranges = target_ranges;
    return out;
}

Matrix denormalize_targets(const Dataset& ds, const Matrix& Y) {
    require(static_cast<std::size_t>(Y.cols()) == ds.target_ranges.size(),
            "denormalize_targets: no recorded ranges for this width");
    Matrix out = Y;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        const ColumnRange& r = ds.target_ranges[static_cast<std::size_t>(c)];
        if (r.degenerate())
            out.col(c).setConstant(r.min);
        else
            out.col(c) = (out.col(c).array() * (r.max - r.min) + r.min).matrix();
    }
    return out;
}

Matrix one_hot(const std::vector<int>& labels, int num_classes) {
    require(num_classes >= 1, "one_hot: need at least one class");
    Matrix Y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] >= 0 && labels[i] < num_classes, "one_hot: label out of range");
        Y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return Y;
}

Dataset inject_target_outliers(const Dataset& ds, double fraction, double lo, double hi,
                               std::uint64_t seed) {
    require(ds.task == Task::regression, "inject_target_outliers: regression datasets only");
    Dataset out = ds;
    const Eigen::Index count = contaminated_count(ds.sample_count(), fraction);
    if (count == 0) return out;
    const auto rows = sample_rows(ds.sample_count(), count, seed);
    Rng rng(seed, 0x6f75746cULL);  // "outl"
    for (const Eigen::Index r : rows)
        for (Eigen::Index c = 0; c < out.Y.cols(); ++c) out.Y(r, c) += rng.uniform(lo, hi);
    return out;
}

Dataset flip_labels(const Dataset& ds, double fraction, std::uint64_t seed) {
    require(ds.task == Task::classification, "flip_labels: classification datasets only");
    require(ds.Y.cols() == 2, "flip_labels: binary classification only");
    Dataset out = ds;
    const Eigen::Index count = contaminated_count(ds.sample_count(), fraction);
    if (count == 0) return out;
    for (const Eigen::Index r : sample_rows(ds.sample_count(), count, seed)) {
        const int old_label = out.labels[static_cast<std::size_t>(r)];
        out.labels[static_cast<std::size_t>(r)] = 1 - old_label;
        out.Y(r, old_label) = 0.0;
        out.Y(r, 1 - old_label) = 1.0;
    }
    return out;
}

} // namespace bls
