#include "bls/harness.hpp"

#include "bls/linalg.hpp"
#include "bls/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>

namespace bls {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double metric_for(const Matrix& pred, const Matrix& target, Task task) {
    if (task == Task::regression) return rmse(pred, target);
    return accuracy(decode_labels(pred), decode_labels(target));
}

// Lower-is-better orientation so the selection logic reads one way.
double selection_score(double metric, Task task) {
    return task == Task::regression ? metric : -metric;
}

RunMetrics mean_of(const std::vector<RunMetrics>& runs) {
    RunMetrics m;
    if (runs.empty()) return m;
    for (const auto& r : runs) {
        m.train_seconds += r.train_seconds;
        m.train_metric += r.train_metric;
        m.test_metric += r.test_metric;
    }
    const auto n = static_cast<double>(runs.size());
    m.train_seconds /= n;
    m.train_metric /= n;
    m.test_metric /= n;
    return m;
}

RunMetrics stddev_of(const std::vector<RunMetrics>& runs, const RunMetrics& mean) {
    RunMetrics s;
    if (runs.size() < 2) return s;
    for (const auto& r : runs) {
        s.train_seconds += (r.train_seconds - mean.train_seconds) * (r.train_seconds - mean.train_seconds);
        s.train_metric += (r.train_metric - mean.train_metric) * (r.train_metric - mean.train_metric);
        s.test_metric += (r.test_metric - mean.test_metric) * (r.test_metric - mean.test_metric);
    }
    const auto n = static_cast<double>(runs.size() - 1);
    s.train_seconds = std::sqrt(s.train_seconds / n);
    s.train_metric = std::sqrt(s.train_metric / n);
    s.test_metric = std::sqrt(s.test_metric / n);
    return s;
}

} // namespace

double rmse(const Matrix& pred, const Matrix& target) {
    require(pred.rows() == target.rows() && pred.cols() == target.cols(),
            "rmse: shape mismatch");
    require(pred.size() > 0, "rmse: empty input");
    return std::sqrt((pred - target).squaredNorm() / static_cast<double>(pred.size()));
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& target) {
    require(pred.size() == target.size(), "accuracy: length mismatch");
    require(!pred.empty(), "accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == target[i]) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

const char* to_string(ModelKind kind) { return kind == ModelKind::bls ? "bls" : "cbls"; }

Architecture HarnessConfig::architecture(int input_dim, int output_dim) const {
    Architecture arch;
    arch.feature_groups = nw;
    arch.feature_nodes = nf;
    arch.enhancement_groups = 1;
    arch.enhancement_nodes = ne;
    arch.input_dim = input_dim;
    arch.output_dim = output_dim;
    arch.feature_activation = feature_activation;
    arch.enhancement_activation = enhancement_activation;
    return arch;
}

RunMetrics evaluate_once(const SplitData& data, const HarnessConfig& config, std::uint64_t seed) {
    const Architecture arch = config.architecture(static_cast<int>(data.X_train.cols()),
                                                  static_cast<int>(data.Y_train.cols()));
    RunMetrics metrics;
    const auto start = Clock::now();
    Matrix train_pred, test_pred;
    if (config.kind == ModelKind::bls) {
        const BlsModel model =
            train_bls(data.X_train, data.Y_train, arch, config.gamma, seed, config.task);
        metrics.train_seconds = seconds_since(start);
        train_pred = model.state * model.output_weights;
        test_pred = predict(model, data.X_test);
    } else {
        TrainConfig tc;
        tc.gamma = config.gamma;
        tc.sigma = config.sigma;
        tc.epsilon = config.epsilon;
        tc.max_iter = config.max_iter;
        tc.seed = seed;
        const CblsModel model = train_cbls(data.X_train, data.Y_train, arch, tc, config.task);
        metrics.train_seconds = seconds_since(start);
        train_pred = model.state * model.output_weights;
        test_pred = predict(model, data.X_test);
    }
    metrics.train_metric = metric_for(train_pred, data.Y_train, config.task);
    metrics.test_metric = metric_for(test_pred, data.Y_test, config.task);
    return metrics;
}

MonteCarloResult monte_carlo(const SplitData& data, const HarnessConfig& config, int runs,
                             std::uint64_t seed) {
    require(runs >= 1, "monte_carlo: runs must be >= 1");
    MonteCarloResult result;
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = child_seed(seed, static_cast<std::uint64_t>(r));
        result.run_seeds.push_back(run_seed);
        try {
            result.runs.push_back(evaluate_once(data, config, run_seed));
        } catch (const std::exception& e) {
            result.failures.push_back("run " + std::to_string(r) + ": " + e.what());
        }
    }
    if (result.runs.empty())
        throw NumericalError("monte_carlo: every run failed; first error: " +
                             result.failures.front());
    result.mean = mean_of(result.runs);
    result.stddev = stddev_of(result.runs, result.mean);
    return result;
}

GridSpace GridSpace::default_ranges() {
    GridSpace space;
    for (int v = 1; v <= 20; v += 2) space.nf_values.push_back(v);
    for (int v = 1; v <= 20; v += 1) space.nw_values.push_back(v);
    for (int v = 1; v <= 200; v += 5) space.ne_values.push_back(v);
    for (int e = -5; e <= 5; ++e) space.sigma_values.push_back(std::ldexp(1.0, e));
    return space;
}

bool GridSpace::empty() const {
    return nf_values.empty() || nw_values.empty() || ne_values.empty();
}

namespace {

// Deterministic 80/20 split of the training rows for grid selection.
SplitData validation_split(const SplitData& data, std::uint64_t seed) {
    const Eigen::Index n = data.X_train.rows();
    const Eigen::Index val = std::max<Eigen::Index>(1, n / 5);
    const Eigen::Index fit = n - val;
    require(fit >= 1, "grid_search: training set too small to split");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(seed, 0x76616cULL);  // "val"
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    SplitData out;
    out.task = data.task;
    out.X_train.resize(fit, data.X_train.cols());
    out.Y_train.resize(fit, data.Y_train.cols());
    out.X_test.resize(val, data.X_train.cols());
    out.Y_test.resize(val, data.Y_train.cols());
    for (Eigen::Index i = 0; i < fit; ++i) {
        out.X_train.row(i) = data.X_train.row(order[static_cast<std::size_t>(i)]);
        out.Y_train.row(i) = data.Y_train.row(order[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index i = 0; i < val; ++i) {
        out.X_test.row(i) = data.X_train.row(order[static_cast<std::size_t>(fit + i)]);
        out.Y_test.row(i) = data.Y_train.row(order[static_cast<std::size_t>(fit + i)]);
    }
    return out;
}

} // namespace

GridResult grid_search(const GridSpace& space, const SplitData& data, const HarnessConfig& base,
                       int runs, std::uint64_t seed, bool select_on_test) {
    require(!space.empty(), "grid_search: empty search space");
    std::vector<double> sigmas = space.sigma_values;
    if (base.kind == ModelKind::bls || sigmas.empty()) sigmas = {base.sigma};

    const SplitData selection_data = select_on_test ? data : validation_split(data, seed);

    GridResult out;
    bool have_best = false;
    double best_score = 0.0;
    int best_width = 0;
    std::size_t best_sigma_index = 0;

    for (int nf : space.nf_values)
        for (int nw : space.nw_values)
            for (int ne : space.ne_values)
                for (std::size_t si = 0; si < sigmas.size(); ++si) {
                    HarnessConfig config = base;
                    config.nf = nf;
                    config.nw = nw;
                    config.ne = ne;
                    config.sigma = sigmas[si];

                    GridCell cell;
                    cell.config = config;
                    cell.result = monte_carlo(selection_data, config, runs, seed);
                    cell.selection_metric = cell.result.mean.test_metric;
                    out.cells.push_back(cell);

                    const double score = selection_score(cell.selection_metric, base.task);
                    const int width = config.state_width();
                    const bool better =
                        !have_best || score < best_score ||
                        (score == best_score &&
                         (width < best_width ||
                          (width == best_width && si < best_sigma_index)));
                    if (better) {
                        have_best = true;
                        best_score = score;
                        best_width = width;
                        best_sigma_index = si;
                        out.best = config;
                    }
                }

    out.best_result = monte_carlo(data, out.best, runs, seed);
    return out;
}

IncrementStudyResult run_increment_study(const SplitData& data, const HarnessConfig& config,
                                         Eigen::Index initial_samples,
                                         const std::vector<IncrementStep>& schedule,
                                         std::uint64_t seed) {
    require(initial_samples >= 1 && initial_samples <= data.X_train.rows(),
            "increment study: bad initial sample count");

    const Architecture arch = config.architecture(static_cast<int>(data.X_train.cols()),
                                                  static_cast<int>(data.Y_train.cols()));
    IncrementStudyResult out;
    Eigen::Index used = initial_samples;

    auto record_stage = [&](double secs, const Matrix& train_pred, const Matrix& Y_used,
                            const Matrix& test_pred, int width) {
        IncrementStageResult stage;
        stage.seconds = secs;
        stage.train_metric = metric_for(train_pred, Y_used, config.task);
        stage.test_metric = metric_for(test_pred, data.Y_test, config.task);
        stage.state_width = width;
        stage.samples = used;
        out.stages.push_back(stage);
    };

    std::uint64_t node_seed = child_seed(seed, 0x6e6f6465ULL);  // "node"
    auto next_seed = [&node_seed] { return node_seed = child_seed(node_seed, 1); };

    if (config.kind == ModelKind::bls) {
        auto start = Clock::now();
        BlsModel model = train_bls(data.X_train.topRows(used), data.Y_train.topRows(used), arch,
                                   config.gamma, seed, config.task);
        record_stage(seconds_since(start), model.state * model.output_weights, model.targets,
                     predict(model, data.X_test), model.state_width());

        for (const auto& step : schedule) {
            start = Clock::now();
            if (step.add_samples > 0) {
                const Eigen::Index take =
                    std::min<Eigen::Index>(step.add_samples, data.X_train.rows() - used);
                require(take > 0, "increment study: schedule exceeds available samples");
                model = bls_add_samples(model, data.X_train.middleRows(used, take),
                                        data.Y_train.middleRows(used, take));
                used += take;
            }
            if (step.add_enhancement > 0)
                model = bls_add_enhancement(model, step.add_enhancement, next_seed());
            for (int g = 0; g < step.add_feature_groups; ++g)
                model = bls_add_features(model, next_seed());
            record_stage(seconds_since(start), model.state * model.output_weights, model.targets,
                         predict(model, data.X_test), model.state_width());
        }

        // Batch oracle: cold pseudoinverse retrain over the final basis/data.
        const Matrix U = state_matrix(model.inputs, model.basis).values;
        const Matrix W_batch = pseudoinverse(U) * model.targets;
        out.oracle_max_diff = (model.output_weights - W_batch).cwiseAbs().maxCoeff();
    } else {
        TrainConfig tc;
        tc.gamma = config.gamma;
        tc.sigma = config.sigma;
        tc.epsilon = config.epsilon;
        tc.max_iter = config.max_iter;
        tc.seed = seed;

        auto start = Clock::now();
        CblsModel model = train_cbls(data.X_train.topRows(used), data.Y_train.topRows(used), arch,
                                     tc, config.task);
        record_stage(seconds_since(start), model.state * model.output_weights, model.targets,
                     predict(model, data.X_test), model.state_width());

        for (const auto& step : schedule) {
            start = Clock::now();
            if (step.add_samples > 0) {
                const Eigen::Index take =
                    std::min<Eigen::Index>(step.add_samples, data.X_train.rows() - used);
                require(take > 0, "increment study: schedule exceeds available samples");
                model = cbls_add_samples(model, data.X_train.middleRows(used, take),
                                         data.Y_train.middleRows(used, take));
                used += take;
            }
            if (step.add_enhancement > 0)
                model = cbls_add_enhancement(model, step.add_enhancement, next_seed());
            for (int g = 0; g < step.add_feature_groups; ++g)
                model = cbls_add_features(model, next_seed());
            record_stage(seconds_since(start), model.state * model.output_weights, model.targets,
                         predict(model, data.X_test), model.state_width());
        }

        // Frozen-weight oracle over the final basis/data.
        const Matrix U = state_matrix(model.inputs, model.basis).values;
        const Matrix W_batch =
            weighted_ridge_solve(U, model.targets, model.sample_weights, model.config.gamma);
        out.oracle_max_diff = (model.output_weights - W_batch).cwiseAbs().maxCoeff();
    }

    out.oracle_ok = out.oracle_max_diff < 1e-8;
    return out;
}

std::vector<SweepPoint> contamination_sweep(const SplitData& data, const HarnessConfig& bls_config,
                                            const HarnessConfig& cbls_config,
                                            const std::vector<double>& levels, int runs,
                                            std::uint64_t seed) {
    require(data.task == Task::regression, "contamination_sweep: regression protocol");
    std::vector<SweepPoint> out;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        SweepPoint point;
        point.contamination = levels[li];

        Dataset train;
        train.X = data.X_train;
        train.Y = data.Y_train;
        train.task = Task::regression;
        const Dataset dirty = inject_target_outliers(train, levels[li], 0.0, 1.0,
                                                     child_seed(seed, 0xd1e7 + li));
        SplitData contaminated = data;
        contaminated.Y_train = dirty.Y;

        point.bls = monte_carlo(contaminated, bls_config, runs, child_seed(seed, 2 * li));
        point.cbls = monte_carlo(contaminated, cbls_config, runs, child_seed(seed, 2 * li + 1));
        out.push_back(std::move(point));
    }
    return out;
}

SplitData sinc_benchmark(Eigen::Index n_train, Eigen::Index n_test, double noise_stddev,
                         std::uint64_t seed) {
    require(n_train >= 2 && n_test >= 1, "sinc_benchmark: too few samples");
    Rng x_rng(seed, 0x73696e63ULL);  // "sinc"
    Rng noise_rng(seed, 0x6e6f6973ULL);  // "nois"
    const auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };

    const Eigen::Index total = n_train + n_test;
    Matrix X(total, 1), Y(total, 1);
    for (Eigen::Index i = 0; i < total; ++i) {
        const double x = x_rng.uniform(-10.0, 10.0);
        X(i, 0) = x;
        Y(i, 0) = sinc(x) + noise_stddev * noise_rng.normal();
    }

    Dataset all;
    all.X = X;
    all.Y = Y;
    all.task = Task::regression;
    const Dataset scaled = normalize(all, NormalizeMode::regression_unit);

    SplitData out;
    out.task = Task::regression;
    out.X_train = scaled.X.topRows(n_train);
    out.Y_train = scaled.Y.topRows(n_train);
    out.X_test = scaled.X.bottomRows(n_test);
    out.Y_test = scaled.Y.bottomRows(n_test);
    return out;
}

namespace {

nlohmann::json config_json(const HarnessConfig& config) {
    return {{"model", to_string(config.kind)},
            {"task", config.task == Task::regression ? "regression" : "classification"},
            {"nf", config.nf},
            {"nw", config.nw},
            {"ne", config.ne},
            {"gamma", config.gamma},
            {"sigma", config.sigma},
            {"eps", config.epsilon},
            {"max_iter", config.max_iter}};
}

nlohmann::json result_json(const MonteCarloResult& result) {
    nlohmann::json per_run = nlohmann::json::array();
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        per_run.push_back({{"seed", result.run_seeds[i]},
                           {"train_metric", result.runs[i].train_metric},
                           {"test_metric", result.runs[i].test_metric},
                           {"wall_ms", 1000.0 * result.runs[i].train_seconds}});
    }
    return {{"per_run", per_run},
            {"failures", result.failures},
            {"mean",
             {{"train_metric", result.mean.train_metric},
              {"test_metric", result.mean.test_metric},
              {"wall_ms", 1000.0 * result.mean.train_seconds}}},
            {"std",
             {{"train_metric", result.stddev.train_metric},
              {"test_metric", result.stddev.test_metric},
              {"wall_ms", 1000.0 * result.stddev.train_seconds}}}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace

void write_report_json(const std::string& path, const HarnessConfig& config,
                       const MonteCarloResult& result) {
    nlohmann::json doc = result_json(result);
    doc["config"] = config_json(config);
    doc["environment"] = {{"compiler", __VERSION__},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
    write_text(path, doc.dump(2) + "\n");
}

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& sweep) {
    std::string text = "p,bls_mean,bls_std,cbls_mean,cbls_std\n";
    for (const auto& point : sweep) {
        text += std::to_string(point.contamination) + ',' +
                std::to_string(point.bls.mean.test_metric) + ',' +
                std::to_string(point.bls.stddev.test_metric) + ',' +
                std::to_string(point.cbls.mean.test_metric) + ',' +
                std::to_string(point.cbls.stddev.test_metric) + '\n';
    }
    write_text(path, text);
}

void write_grid_json(const std::string& path, const GridResult& grid) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : grid.cells) {
        cells.push_back({{"config", config_json(cell.config)},
                         {"selection_metric", cell.selection_metric}});
    }
    nlohmann::json doc = {{"best", config_json(grid.best)},
                          {"best_result", result_json(grid.best_result)},
                          {"cells", cells}};
    write_text(path, doc.dump(2) + "\n");
}

} // namespace bls
