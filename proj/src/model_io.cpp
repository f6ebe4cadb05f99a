#include "bls/model_io.hpp"

#include <json.hpp>

#include <fstream>

namespace bls {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from(const json& j) {
    Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    const json& rows = j.at("data");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(i, c) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c))
                          .get<double>();
    return m;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

json row_json(const RowVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

RowVector row_from(const json& j) {
    RowVector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

json arch_json(const Architecture& arch) {
    return {{"feature_groups", arch.feature_groups},
            {"feature_nodes", arch.feature_nodes},
            {"enhancement_groups", arch.enhancement_groups},
            {"enhancement_nodes", arch.enhancement_nodes},
            {"input_dim", arch.input_dim},
            {"output_dim", arch.output_dim},
            {"feature_activation", to_string(arch.feature_activation)},
            {"enhancement_activation", to_string(arch.enhancement_activation)}};
}

Architecture arch_from(const json& j) {
    Architecture arch;
    arch.feature_groups = j.at("feature_groups").get<int>();
    arch.feature_nodes = j.at("feature_nodes").get<int>();
    arch.enhancement_groups = j.at("enhancement_groups").get<int>();
    arch.enhancement_nodes = j.at("enhancement_nodes").get<int>();
    arch.input_dim = j.at("input_dim").get<int>();
    arch.output_dim = j.at("output_dim").get<int>();
    arch.feature_activation = activation_from_string(j.at("feature_activation").get<std::string>());
    arch.enhancement_activation =
        activation_from_string(j.at("enhancement_activation").get<std::string>());
    return arch;
}

json basis_json(const RandomBasis& basis) {
    json features = json::array();
    for (const auto& g : basis.feature_groups)
        features.push_back({{"weights", matrix_json(g.weights)}, {"bias", row_json(g.bias)}});
    json enhancements = json::array();
    for (const auto& g : basis.enhancement_groups)
        enhancements.push_back({{"weights", matrix_json(g.weights)},
                                {"bias", row_json(g.bias)},
                                {"src_begin", g.src_begin},
                                {"src_end", g.src_end}});
    json layout = json::array();
    for (const auto& ref : basis.layout)
        layout.push_back({{"kind", ref.kind == BlockKind::feature ? "feature" : "enhancement"},
                          {"index", ref.index}});
    return {{"seed", basis.seed},
            {"arch", arch_json(basis.arch)},
            {"feature_groups", features},
            {"enhancement_groups", enhancements},
            {"layout", layout}};
}

RandomBasis basis_from(const json& j) {
    RandomBasis basis;
    basis.seed = j.at("seed").get<std::uint64_t>();
    basis.arch = arch_from(j.at("arch"));
    for (const auto& g : j.at("feature_groups"))
        basis.feature_groups.push_back({matrix_from(g.at("weights")), row_from(g.at("bias"))});
    for (const auto& g : j.at("enhancement_groups"))
        basis.enhancement_groups.push_back({matrix_from(g.at("weights")), row_from(g.at("bias")),
                                            g.at("src_begin").get<int>(),
                                            g.at("src_end").get<int>()});
    for (const auto& ref : j.at("layout"))
        basis.layout.push_back(
            {ref.at("kind").get<std::string>() == "feature" ? BlockKind::feature
                                                            : BlockKind::enhancement,
             ref.at("index").get<int>()});
    return basis;
}

const char* task_name(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

Task task_from(const std::string& name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw std::runtime_error("model file: unknown task " + name);
}

json load_document(const std::string& path, const char* expected_kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path);
    json doc = json::parse(in);
    if (doc.at("version").get<int>() != kFormatVersion)
        throw std::runtime_error("model file " + path + ": unsupported version");
    if (doc.at("model").get<std::string>() != expected_kind)
        throw std::runtime_error("model file " + path + ": expected a " +
                                 std::string(expected_kind) + " model");
    return doc;
}

void dump(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file " + path);
    out << doc.dump(1) << '\n';
}

} // namespace

void save_model(const std::string& path, const BlsModel& model) {
    json doc = {{"version", kFormatVersion},
                {"model", "bls"},
                {"task", task_name(model.task)},
                {"seed", model.basis.seed},
                {"lambda", model.lambda},
                {"class_labels", model.class_labels},
                {"arch", arch_json(model.arch)},
                {"basis", basis_json(model.basis)},
                {"W", matrix_json(model.output_weights)},
                {"cache",
                 {{"X", matrix_json(model.inputs)},
                  {"Y", matrix_json(model.targets)},
                  {"U", matrix_json(model.state)},
                  {"U_pinv", matrix_json(model.state_pinv)}}}};
    dump(path, doc);
}

void save_model(const std::string& path, const CblsModel& model) {
    json doc = {{"version", kFormatVersion},
                {"model", "cbls"},
                {"task", task_name(model.task)},
                {"seed", model.basis.seed},
                {"class_labels", model.class_labels},
                {"arch", arch_json(model.arch)},
                {"basis", basis_json(model.basis)},
                {"W", matrix_json(model.output_weights)},
                {"config",
                 {{"gamma", model.config.gamma},
                  {"sigma", model.config.sigma},
                  {"eps", model.config.epsilon},
                  {"max_iter", model.config.max_iter},
                  {"seed", model.config.seed}}},
                {"converged", model.converged},
                {"iterations", model.iterations},
                {"objective_trace", model.objective_trace},
                {"C_w", matrix_json(model.gram_inverse)},
                {"U_w", matrix_json(model.weighted_state)},
                {"Y_w", matrix_json(model.weighted_targets)},
                {"lambda_diag", vector_json(model.sample_weights)},
                {"cache",
                 {{"X", matrix_json(model.inputs)},
                  {"Y", matrix_json(model.targets)},
                  {"U", matrix_json(model.state)}}}};
    dump(path, doc);
}

BlsModel load_bls_model(const std::string& path) {
    const json doc = load_document(path, "bls");
    BlsModel model;
    model.task = task_from(doc.at("task").get<std::string>());
    model.lambda = doc.at("lambda").get<double>();
    model.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    model.arch = arch_from(doc.at("arch"));
    model.basis = basis_from(doc.at("basis"));
    model.output_weights = matrix_from(doc.at("W"));
    const json& cache = doc.at("cache");
    model.inputs = matrix_from(cache.at("X"));
    model.targets = matrix_from(cache.at("Y"));
    model.state = matrix_from(cache.at("U"));
    model.state_pinv = matrix_from(cache.at("U_pinv"));
    return model;
}

CblsModel load_cbls_model(const std::string& path) {
    const json doc = load_document(path, "cbls");
    CblsModel model;
    model.task = task_from(doc.at("task").get<std::string>());
    model.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    model.arch = arch_from(doc.at("arch"));
    model.basis = basis_from(doc.at("basis"));
    model.output_weights = matrix_from(doc.at("W"));
    const json& config = doc.at("config");
    model.config.gamma = config.at("gamma").get<double>();
    model.config.sigma = config.at("sigma").get<double>();
    model.config.epsilon = config.at("eps").get<double>();
    model.config.max_iter = config.at("max_iter").get<int>();
    model.config.seed = config.at("seed").get<std::uint64_t>();
    model.converged = doc.at("converged").get<bool>();
    model.iterations = doc.at("iterations").get<int>();
    model.objective_trace = doc.at("objective_trace").get<std::vector<double>>();
    model.gram_inverse = matrix_from(doc.at("C_w"));
    model.weighted_state = matrix_from(doc.at("U_w"));
    model.weighted_targets = matrix_from(doc.at("Y_w"));
    model.sample_weights = vector_from(doc.at("lambda_diag"));
    const json& cache = doc.at("cache");
    model.inputs = matrix_from(cache.at("X"));
    model.targets = matrix_from(cache.at("Y"));
    model.state = matrix_from(cache.at("U"));
    return model;
}

std::string model_kind_in_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path);
    return json::parse(in).at("model").get<std::string>();
}

} // namespace bls
