#pragma once

#include "bls/bls.hpp"
#include "bls/cbls.hpp"
#include "bls/core.hpp"
#include "bls/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bls {

double rmse(const Matrix& pred, const Matrix& target);
double accuracy(const std::vector<int>& pred, const std::vector<int>& target);  // percent

enum class ModelKind { bls, cbls };

const char* to_string(ModelKind kind);

/// One model configuration as the experiment harness sees it: nf feature
/// nodes per group, nw mapping groups, ne enhancement nodes in one group.
struct HarnessConfig {
    ModelKind kind = ModelKind::bls;
    Task task = Task::regression;
    int nf = 10;
    int nw = 1;
    int ne = 100;
    double gamma = 9.31322574615478515625e-10;  // 2^-30
    double sigma = 1.0;                         // cbls only
    double epsilon = 1e-8;
    int max_iter = 50;
    Activation feature_activation = Activation::identity;
    Activation enhancement_activation = Activation::tanh;

    Architecture architecture(int input_dim, int output_dim) const;
    int state_width() const { return nf * nw + ne; }
};

struct SplitData {
    Matrix X_train, Y_train;
    Matrix X_test, Y_test;
    Task task = Task::regression;
};

struct RunMetrics {
    double train_seconds = 0.0;
    double train_metric = 0.0;
    double test_metric = 0.0;
};

/// Mean and sample standard deviation over Monte-Carlo repetitions, plus the
/// raw per-run values. Failed runs are kept as error strings, never dropped.
struct MonteCarloResult {
    std::vector<RunMetrics> runs;
    std::vector<std::uint64_t> run_seeds;
    std::vector<std::string> failures;
    RunMetrics mean, stddev;
};

/// Trains one model with a fresh basis seed and reports train/test metrics
/// (RMSE for regression, accuracy for classification).
RunMetrics evaluate_once(const SplitData& data, const HarnessConfig& config, std::uint64_t seed);

/// Repeats evaluate_once with per-run child seeds derived from `seed`.
MonteCarloResult monte_carlo(const SplitData& data, const HarnessConfig& config, int runs,
                             std::uint64_t seed);

struct GridSpace {
    std::vector<int> nf_values;
    std::vector<int> nw_values;
    std::vector<int> ne_values;
    std::vector<double> sigma_values;  // ignored for plain BLS

    /// The customary search ranges: nf 1..19 step 2, nw 1..20,
    /// ne 1..196 step 5, sigma 2^-5..2^5.
    static GridSpace default_ranges();
    bool empty() const;
};

struct GridCell {
    HarnessConfig config;
    MonteCarloResult result;
    double selection_metric = 0.0;
};

struct GridResult {
    HarnessConfig best;
    MonteCarloResult best_result;  // evaluated on the full split
    std::vector<GridCell> cells;
};

/// Exhaustive search over the space. Selection uses a deterministic held-out
/// validation split carved from the training set unless select_on_test is
/// set. Lower test RMSE wins for regression, higher accuracy for
/// classification; ties prefer the smaller network, then the smaller sigma
/// index.
GridResult grid_search(const GridSpace& space, const SplitData& data, const HarnessConfig& base,
                       int runs, std::uint64_t seed, bool select_on_test = false);

/// One stage of an increment study: new samples and/or new nodes.
struct IncrementStep {
    int add_samples = 0;
    int add_enhancement = 0;
    int add_feature_groups = 0;
};

struct IncrementStageResult {
    double seconds = 0.0;
    double train_metric = 0.0;
    double test_metric = 0.0;
    int state_width = 0;
    Eigen::Index samples = 0;
};

struct IncrementStudyResult {
    std::vector<IncrementStageResult> stages;
    double oracle_max_diff = 0.0;  // final W vs batch recomputation
    bool oracle_ok = false;
};

/// Trains on the first `initial_samples` training rows, applies the schedule
/// step by step, then checks the final weights against the batch oracle
/// (cold pseudoinverse retrain for BLS, frozen-weight solve for C-BLS).
IncrementStudyResult run_increment_study(const SplitData& data, const HarnessConfig& config,
                                         Eigen::Index initial_samples,
                                         const std::vector<IncrementStep>& schedule,
                                         std::uint64_t seed);

/// Robustness sweep: for each contamination level, train BLS and C-BLS on a
/// freshly contaminated copy of the training targets and record test metrics.
struct SweepPoint {
    double contamination = 0.0;
    MonteCarloResult bls;
    MonteCarloResult cbls;
};

std::vector<SweepPoint> contamination_sweep(const SplitData& data, const HarnessConfig& bls_config,
                                            const HarnessConfig& cbls_config,
                                            const std::vector<double>& levels, int runs,
                                            std::uint64_t seed);

/// Synthetic sin(x)/x regression benchmark on [-10, 10] with small Gaussian
/// target noise, normalized to the unit square. Train and test rows are
/// disjoint draws.
SplitData sinc_benchmark(Eigen::Index n_train, Eigen::Index n_test, double noise_stddev,
                         std::uint64_t seed);

/// Report persistence: a JSON document with config, per-run values and
/// summary statistics, and a flat CSV for plotting.
void write_report_json(const std::string& path, const HarnessConfig& config,
                       const MonteCarloResult& result);
void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& sweep);
void write_grid_json(const std::string& path, const GridResult& grid);

} // namespace bls
