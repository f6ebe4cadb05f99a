// blscli — command line front end: batch and robust training, incremental
// model updates, series/dataset generation, robustness benchmarks and grid
// search. Prints key=value lines and ends with the path of the file written.

#include "bls/dataset.hpp"
#include "bls/harness.hpp"
#include "bls/model_io.hpp"
#include "bls/series.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace bls;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct CommonFlags {
    std::string model = "bls";
    std::string task = "regression";
    std::string train_path;
    std::string test_path;
    int nf = 10;
    int nw = 1;
    int ne = 100;
    double gamma = 9.31322574615478515625e-10;  // 2^-30
    double sigma = 1.0;
    double eps = 1e-8;
    int max_iter = 50;
    std::uint64_t seed = 1;
    std::string out;
    bool header = false;
};

Task parse_task(const std::string& name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw CLI::ValidationError("--task must be regression or classification");
}

ModelKind parse_model(const std::string& name) {
    if (name == "bls") return ModelKind::bls;
    if (name == "cbls") return ModelKind::cbls;
    throw CLI::ValidationError("--model must be bls or cbls");
}

Dataset load_dataset(const std::string& path, Task task, bool header,
                     const std::vector<std::string>& label_order = {}) {
    CsvSchema schema;
    schema.has_header = header;
    schema.classification = task == Task::classification;
    schema.label_order = label_order;
    return load_csv(path, schema);
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_arch = true) {
    cmd->add_option("--model", flags.model, "Model kind: bls or cbls");
    cmd->add_option("--task", flags.task, "Task: regression or classification");
    cmd->add_option("--train", flags.train_path, "Training CSV path");
    cmd->add_option("--test", flags.test_path, "Test CSV path");
    if (with_arch) {
        cmd->add_option("--nf", flags.nf, "Feature nodes per group");
        cmd->add_option("--nw", flags.nw, "Feature mapping groups");
        cmd->add_option("--ne", flags.ne, "Enhancement nodes");
    }
    cmd->add_option("--gamma", flags.gamma, "Regularization factor");
    cmd->add_option("--sigma", flags.sigma, "Kernel size (cbls)");
    cmd->add_option("--eps", flags.eps, "Fixed-point termination tolerance");
    cmd->add_option("--max-iter", flags.max_iter, "Fixed-point iteration cap");
    cmd->add_option("--seed", flags.seed, "Master random seed");
    cmd->add_option("--out", flags.out, "Output path");
    cmd->add_flag("--header", flags.header, "CSV files carry a header row");
}

void print_metric(const char* prefix, Task task, double value) {
    std::cout << prefix << (task == Task::regression ? "_rmse=" : "_acc=") << value << "\n";
}

double dataset_metric(const Matrix& pred, const Dataset& ds) {
    if (ds.task == Task::regression) return rmse(pred, ds.Y);
    return accuracy(decode_labels(pred), ds.labels);
}

int cmd_train(const CommonFlags& flags, bool strict) {
    const Task task = parse_task(flags.task);
    const ModelKind kind = parse_model(flags.model);
    if (flags.train_path.empty()) throw CLI::ValidationError("train: --train is required");
    const std::string out_path = flags.out.empty() ? "model.json" : flags.out;

    const Dataset train = load_dataset(flags.train_path, task, flags.header);
    HarnessConfig config;
    config.kind = kind;
    config.task = task;
    config.nf = flags.nf;
    config.nw = flags.nw;
    config.ne = flags.ne;
    config.gamma = flags.gamma;
    config.sigma = flags.sigma;
    config.epsilon = flags.eps;
    config.max_iter = flags.max_iter;
    const Architecture arch = config.architecture(static_cast<int>(train.X.cols()),
                                                  static_cast<int>(train.Y.cols()));

    std::cout << "model=" << flags.model << "\n";
    std::cout << "task=" << flags.task << "\n";
    std::cout << "n_train=" << train.sample_count() << "\n";
    std::cout << "state_width=" << config.state_width() << "\n";
    std::cout << "seed=" << flags.seed << "\n";

    bool converged = true;
    Matrix train_pred;
    if (kind == ModelKind::bls) {
        BlsModel model = train_bls(train.X, train.Y, arch, flags.gamma, flags.seed, task);
        model.class_labels = train.class_labels;
        train_pred = model.state * model.output_weights;
        save_model(out_path, model);
        if (!flags.test_path.empty()) {
            const Dataset test =
                load_dataset(flags.test_path, task, flags.header, train.class_labels);
            print_metric("test", task, dataset_metric(predict(model, test.X), test));
        }
    } else {
        TrainConfig tc{flags.gamma, flags.sigma, flags.eps, flags.max_iter, flags.seed};
        CblsModel model = train_cbls(train.X, train.Y, arch, tc, task);
        model.class_labels = train.class_labels;
        converged = model.converged;
        train_pred = model.state * model.output_weights;
        save_model(out_path, model);
        std::cout << "iterations=" << model.iterations << "\n";
        std::cout << "converged=" << (model.converged ? 1 : 0) << "\n";
        if (!flags.test_path.empty()) {
            const Dataset test =
                load_dataset(flags.test_path, task, flags.header, train.class_labels);
            print_metric("test", task, dataset_metric(predict(model, test.X), test));
        }
    }
    {
        Dataset train_view = train;
        print_metric("train", task, dataset_metric(train_pred, train_view));
    }
    std::cout << out_path << std::endl;
    if (strict && !converged) {
        std::cerr << "error: fixed-point iteration did not converge within --max-iter\n";
        return kExitNumerical;
    }
    return 0;
}

int cmd_predict(const std::string& model_file, const CommonFlags& flags) {
    if (flags.test_path.empty()) throw CLI::ValidationError("predict: --test is required");
    const std::string out_path = flags.out.empty() ? "predictions.csv" : flags.out;

    const std::string kind = model_kind_in_file(model_file);
    Matrix pred;
    Task task = Task::regression;
    std::vector<std::string> vocabulary;
    if (kind == "bls") {
        const BlsModel model = load_bls_model(model_file);
        task = model.task;
        vocabulary = model.class_labels;
        const Dataset test = load_dataset(flags.test_path, task, flags.header, vocabulary);
        pred = predict(model, test.X);
        print_metric("test", task, dataset_metric(pred, test));
    } else {
        const CblsModel model = load_cbls_model(model_file);
        task = model.task;
        vocabulary = model.class_labels;
        const Dataset test = load_dataset(flags.test_path, task, flags.header, vocabulary);
        pred = predict(model, test.X);
        print_metric("test", task, dataset_metric(pred, test));
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out.precision(17);
    if (task == Task::classification) {
        for (int label : decode_labels(pred))
            out << vocabulary[static_cast<std::size_t>(label)] << "\n";
    } else {
        for (Eigen::Index i = 0; i < pred.rows(); ++i) {
            for (Eigen::Index j = 0; j < pred.cols(); ++j)
                out << pred(i, j) << (j + 1 < pred.cols() ? "," : "");
            out << "\n";
        }
    }
    std::cout << "n=" << pred.rows() << "\n";
    std::cout << out_path << std::endl;
    return 0;
}

int cmd_increment(const std::string& model_file, const std::string& mode, bool refresh,
                  const CommonFlags& flags) {
    const std::string out_path = flags.out.empty() ? model_file : flags.out;
    const std::string kind = model_kind_in_file(model_file);

    if (mode != "samples" && mode != "enhancement" && mode != "features")
        throw CLI::ValidationError("increment: --mode must be samples, enhancement or features");
    if (refresh && kind != "cbls")
        throw CLI::ValidationError("increment: --refresh applies to cbls models only");

    auto load_new_samples = [&](Task task, const std::vector<std::string>& vocabulary) {
        if (flags.train_path.empty())
            throw CLI::ValidationError("increment --mode samples: --train is required");
        const Dataset ds = load_dataset(flags.train_path, task, flags.header, vocabulary);
        if (ds.sample_count() < 1) throw CLI::ValidationError("increment: no samples in file");
        return ds;
    };

    if (kind == "bls") {
        BlsModel model = load_bls_model(model_file);
        if (mode == "samples") {
            const Dataset ds = load_new_samples(model.task, model.class_labels);
            model = bls_add_samples(model, ds.X, ds.Y);
        } else if (mode == "enhancement") {
            if (flags.ne < 1) throw CLI::ValidationError("increment: --ne must be >= 1");
            model = bls_add_enhancement(model, flags.ne, flags.seed);
        } else {
            model = bls_add_features(model, flags.seed);
        }
        save_model(out_path, model);
        std::cout << "n_train=" << model.inputs.rows() << "\n";
        std::cout << "state_width=" << model.state_width() << "\n";
        print_metric("train", model.task,
                     model.task == Task::regression
                         ? rmse(model.state * model.output_weights, model.targets)
                         : accuracy(decode_labels(model.state * model.output_weights),
                                    decode_labels(model.targets)));
    } else {
        CblsModel model = load_cbls_model(model_file);
        if (mode == "samples") {
            const Dataset ds = load_new_samples(model.task, model.class_labels);
            model = cbls_add_samples(model, ds.X, ds.Y);
        } else if (mode == "enhancement") {
            if (flags.ne < 1) throw CLI::ValidationError("increment: --ne must be >= 1");
            model = cbls_add_enhancement(model, flags.ne, flags.seed);
        } else {
            model = cbls_add_features(model, flags.seed);
        }
        if (refresh) model = refresh_weights(model);
        save_model(out_path, model);
        std::cout << "n_train=" << model.inputs.rows() << "\n";
        std::cout << "state_width=" << model.state_width() << "\n";
        std::cout << "refreshed=" << (refresh ? 1 : 0) << "\n";
        print_metric("train", model.task,
                     model.task == Task::regression
                         ? rmse(model.state * model.output_weights, model.targets)
                         : accuracy(decode_labels(model.state * model.output_weights),
                                    decode_labels(model.targets)));
    }
    std::cout << out_path << std::endl;
    return 0;
}

struct GenFlags {
    std::string kind;
    int n = 1200;
    std::uint64_t seed = 1;
    std::string out;
    bool with_index = false;
    // mackey-glass, defaults mirroring SeriesConfig
    SeriesConfig mg;
    double a = mg.a, b = mg.b, tau = mg.tau, dt = mg.dt, warmup = mg.warmup, x0 = mg.x0;
    // noise
    double variance = 0.01;
    double alpha = 1.5;
    double scale = 0.1;
    // optional embedding into a regression CSV
    int embed = 0;
    int delay = 1;
    // optional disturbance on the embedded dataset; the default "targets"
    // matches the robust-regression reading, "inputs" is the other one
    std::string noise = "none";
    std::string noise_on = "targets";
};

int cmd_gen(const GenFlags& g) {
    std::vector<double> series;
    if (g.kind == "mackey-glass") {
        SeriesConfig cfg;
        cfg.a = g.a;
        cfg.b = g.b;
        cfg.tau = g.tau;
        cfg.dt = g.dt;
        cfg.warmup = g.warmup;
        cfg.length = g.n;
        cfg.x0 = g.x0;
        series = mackey_glass(cfg);
    } else if (g.kind == "gaussian-noise") {
        series = gaussian_noise(g.n, g.variance, g.seed);
    } else if (g.kind == "alpha-stable") {
        series = alpha_stable_noise(g.n, g.alpha, g.scale, g.seed);
    } else {
        throw CLI::ValidationError("gen: kind must be mackey-glass, gaussian-noise or alpha-stable");
    }

    const std::string out_path = g.out.empty() ? g.kind + ".txt" : g.out;
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out.precision(17);

    if (g.embed > 0) {
        EmbeddedSeries emb = embed_series(series, g.embed, g.delay);
        if (g.noise != "none") {
            const auto n = static_cast<int>(emb.X.rows());
            const std::vector<double> draw =
                g.noise == "gaussian" ? gaussian_noise(n, g.variance, g.seed)
                : g.noise == "alpha-stable"
                    ? alpha_stable_noise(n, g.alpha, g.scale, g.seed)
                    : throw CLI::ValidationError("gen: --noise must be gaussian or alpha-stable");
            if (g.noise_on == "targets") {
                for (int i = 0; i < n; ++i) emb.y(i, 0) += draw[static_cast<std::size_t>(i)];
            } else if (g.noise_on == "inputs") {
                for (int i = 0; i < n; ++i) emb.X.row(i).array() += draw[static_cast<std::size_t>(i)];
            } else {
                throw CLI::ValidationError("gen: --noise-on must be targets or inputs");
            }
        }
        for (Eigen::Index i = 0; i < emb.X.rows(); ++i) {
            for (Eigen::Index j = 0; j < emb.X.cols(); ++j) out << emb.X(i, j) << ',';
            out << emb.y(i, 0) << "\n";
        }
        std::cout << "rows=" << emb.X.rows() << "\n";
    } else {
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (g.with_index) out << i << ',';
            out << series[i] << "\n";
        }
        std::cout << "rows=" << series.size() << "\n";
    }
    std::cout << out_path << std::endl;
    return 0;
}

int cmd_bench(const CommonFlags& flags, const std::vector<double>& p_list, int runs) {
    const std::string out_path = flags.out.empty() ? "bench.csv" : flags.out;
    SplitData data;
    if (flags.train_path.empty()) {
        data = sinc_benchmark(500, 500, 0.01, flags.seed);
        std::cout << "data=synthetic-sinc\n";
    } else {
        const Dataset train_raw = load_dataset(flags.train_path, Task::regression, flags.header);
        if (flags.test_path.empty()) throw CLI::ValidationError("bench: --test is required");
        const Dataset train = normalize(train_raw, NormalizeMode::regression_unit);
        const Dataset test_raw = load_dataset(flags.test_path, Task::regression, flags.header);
        const Dataset test = apply_normalization(test_raw, train.feature_ranges,
                                                 train.target_ranges,
                                                 NormalizeMode::regression_unit);
        data.X_train = train.X;
        data.Y_train = train.Y;
        data.X_test = test.X;
        data.Y_test = test.Y;
        data.task = Task::regression;
    }

    HarnessConfig bls_config;
    bls_config.kind = ModelKind::bls;
    bls_config.task = Task::regression;
    bls_config.nf = flags.nf;
    bls_config.nw = flags.nw;
    bls_config.ne = flags.ne;
    bls_config.gamma = flags.gamma;
    HarnessConfig cbls_config = bls_config;
    cbls_config.kind = ModelKind::cbls;
    cbls_config.sigma = flags.sigma;
    cbls_config.epsilon = flags.eps;
    cbls_config.max_iter = flags.max_iter;

    const auto sweep = contamination_sweep(data, bls_config, cbls_config, p_list, runs, flags.seed);
    write_sweep_csv(out_path, sweep);
    for (const auto& point : sweep)
        std::cout << "p=" << point.contamination
                  << " bls_test=" << point.bls.mean.test_metric
                  << " cbls_test=" << point.cbls.mean.test_metric << "\n";
    std::cout << out_path << std::endl;
    return 0;
}

int cmd_grid(const CommonFlags& flags, const std::vector<int>& nf_list,
             const std::vector<int>& nw_list, const std::vector<int>& ne_list,
             const std::vector<double>& sigma_list, int runs, bool select_on_test) {
    const Task task = parse_task(flags.task);
    const ModelKind kind = parse_model(flags.model);
    if (flags.train_path.empty() || flags.test_path.empty())
        throw CLI::ValidationError("grid: --train and --test are required");
    const std::string out_path = flags.out.empty() ? "grid.json" : flags.out;

    const Dataset train_raw = load_dataset(flags.train_path, task, flags.header);
    const Dataset test_raw =
        load_dataset(flags.test_path, task, flags.header, train_raw.class_labels);
    SplitData data;
    data.task = task;
    if (task == Task::regression) {
        const Dataset train = normalize(train_raw, NormalizeMode::regression_unit);
        const Dataset test = apply_normalization(test_raw, train.feature_ranges,
                                                 train.target_ranges,
                                                 NormalizeMode::regression_unit);
        data.X_train = train.X;
        data.Y_train = train.Y;
        data.X_test = test.X;
        data.Y_test = test.Y;
    } else {
        const Dataset train = normalize(train_raw, NormalizeMode::classification_sym);
        const Dataset test = apply_normalization(test_raw, train.feature_ranges, {},
                                                 NormalizeMode::classification_sym);
        data.X_train = train.X;
        data.Y_train = train.Y;
        data.X_test = test.X;
        data.Y_test = test.Y;
    }

    GridSpace space = GridSpace::default_ranges();
    if (!nf_list.empty()) space.nf_values = nf_list;
    if (!nw_list.empty()) space.nw_values = nw_list;
    if (!ne_list.empty()) space.ne_values = ne_list;
    if (!sigma_list.empty()) space.sigma_values = sigma_list;

    HarnessConfig base;
    base.kind = kind;
    base.task = task;
    base.gamma = flags.gamma;
    base.sigma = flags.sigma;
    base.epsilon = flags.eps;
    base.max_iter = flags.max_iter;

    const GridResult grid = grid_search(space, data, base, runs, flags.seed, select_on_test);
    write_grid_json(out_path, grid);

    std::cout << "cells=" << grid.cells.size() << "\n";
    std::cout << "best_nf=" << grid.best.nf << "\n";
    std::cout << "best_nw=" << grid.best.nw << "\n";
    std::cout << "best_ne=" << grid.best.ne << "\n";
    if (kind == ModelKind::cbls) std::cout << "best_sigma=" << grid.best.sigma << "\n";
    std::cout << "best_test_metric=" << grid.best_result.mean.test_metric << "\n";
    std::cout << out_path << std::endl;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Broad learning system with correntropy-robust training"};
    app.require_subcommand(1);

    CommonFlags flags;
    bool strict = false;
    std::string model_file;
    std::string mode;
    bool refresh = false;
    std::vector<double> p_list{0.0, 0.1, 0.2, 0.3, 0.4};
    int runs = 20;
    bool select_on_test = false;
    std::vector<int> nf_list, nw_list, ne_list;
    std::vector<double> sigma_list;
    GenFlags gen_flags;

    CLI::App* train = app.add_subcommand("train", "Train a model and write it as JSON");
    add_common_flags(train, flags);
    train->add_flag("--strict", strict, "Exit 2 when the fixed-point iteration fails to converge");

    CLI::App* predict_cmd = app.add_subcommand("predict", "Run a saved model on a CSV");
    predict_cmd->add_option("--model-file", model_file, "Model JSON path")->required();
    add_common_flags(predict_cmd, flags, false);

    CLI::App* increment = app.add_subcommand("increment", "Apply an incremental update");
    increment->add_option("--model-file", model_file, "Model JSON path")->required();
    increment->add_option("--mode", mode, "samples, enhancement or features")->required();
    increment->add_flag("--refresh", refresh, "Re-run the fixed-point polish afterwards (cbls)");
    add_common_flags(increment, flags);

    CLI::App* gen = app.add_subcommand("gen", "Generate a series or dataset file");
    gen->add_option("kind", gen_flags.kind, "mackey-glass, gaussian-noise or alpha-stable")
        ->required();
    gen->add_option("--n", gen_flags.n, "Number of values");
    gen->add_option("--seed", gen_flags.seed, "Random seed");
    gen->add_option("--out", gen_flags.out, "Output path");
    gen->add_flag("--with-index", gen_flags.with_index, "Prefix each line with its index");
    gen->add_option("--a", gen_flags.a, "Mackey-Glass a");
    gen->add_option("--b", gen_flags.b, "Mackey-Glass b");
    gen->add_option("--tau", gen_flags.tau, "Mackey-Glass delay");
    gen->add_option("--dt", gen_flags.dt, "Integration step");
    gen->add_option("--warmup", gen_flags.warmup, "Discarded prefix, time units");
    gen->add_option("--x0", gen_flags.x0, "Initial history value");
    gen->add_option("--variance", gen_flags.variance, "Gaussian noise variance");
    gen->add_option("--alpha", gen_flags.alpha, "Stable characteristic exponent");
    gen->add_option("--scale", gen_flags.scale, "Stable scale (gamma in the CF)");
    gen->add_option("--embed", gen_flags.embed, "Emit an embedded dataset CSV of this dimension");
    gen->add_option("--delay", gen_flags.delay, "Embedding delay");
    gen->add_option("--noise", gen_flags.noise,
                    "Disturb the embedded dataset: none, gaussian or alpha-stable");
    gen->add_option("--noise-on", gen_flags.noise_on, "Where the disturbance lands: targets or inputs");

    CLI::App* bench = app.add_subcommand("bench", "Contamination sweep, BLS vs C-BLS");
    add_common_flags(bench, flags);
    bench->add_option("--p-list", p_list, "Contamination levels")->delimiter(',');
    bench->add_option("--runs", runs, "Monte-Carlo repetitions");

    CLI::App* grid = app.add_subcommand("grid", "Exhaustive parameter search");
    add_common_flags(grid, flags, false);
    grid->add_option("--nf-list", nf_list, "Feature node counts")->delimiter(',');
    grid->add_option("--nw-list", nw_list, "Mapping group counts")->delimiter(',');
    grid->add_option("--ne-list", ne_list, "Enhancement node counts")->delimiter(',');
    grid->add_option("--sigma-list", sigma_list, "Kernel sizes")->delimiter(',');
    grid->add_option("--runs", runs, "Monte-Carlo repetitions per cell");
    grid->add_flag("--select-on-test", select_on_test,
                   "Select on the test metric instead of a validation split");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (train->parsed()) return cmd_train(flags, strict);
        if (predict_cmd->parsed()) return cmd_predict(model_file, flags);
        if (increment->parsed()) return cmd_increment(model_file, mode, refresh, flags);
        if (gen->parsed()) return cmd_gen(gen_flags);
        if (bench->parsed()) return cmd_bench(flags, p_list, runs);
        if (grid->parsed())
            return cmd_grid(flags, nf_list, nw_list, ne_list, sigma_list, runs, select_on_test);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const bls::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
