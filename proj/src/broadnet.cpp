#include "bls/broadnet.hpp"

#include "bls/rng.hpp"

#include <cmath>

namespace bls {

namespace {

// Stream tags so every tensor draws from its own counter-based stream.
constexpr std::uint64_t kFeatureStream = 0x66656174ULL;      // "feat"
constexpr std::uint64_t kEnhancementStream = 0x656e6861ULL;  // "enha"
constexpr std::uint64_t kBiasOffset = 0x8000000000000000ULL;

Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = rng.uniform(lo, hi);
    return out;
}

LinearMap random_linear_map(std::uint64_t seed, std::uint64_t tag,
                            Eigen::Index in, Eigen::Index out) {
    Rng weight_rng(seed, tag);
    Rng bias_rng(seed, tag ^ kBiasOffset);
    LinearMap map;
    map.weights = uniform_matrix(weight_rng, in, out, -1.0, 1.0);
    map.bias = uniform_matrix(bias_rng, 1, out, 0.0, 1.0);
    return map;
}

void apply_activation(Matrix& values, Activation act) {
    switch (act) {
        case Activation::identity:
            return;
        case Activation::tanh:
            values = values.array().tanh();
            return;
        case Activation::sigmoid:
            values = (1.0 / (1.0 + (-values.array()).exp()));
            return;
    }
}

Matrix apply_map(const Matrix& input, const Matrix& weights, const RowVector& bias,
                 Activation act) {
    Matrix out = input * weights;
    out.rowwise() += bias;
    apply_activation(out, act);
    return out;
}

// Column offset of feature group `g` within the feature block.
int feature_offset(const RandomBasis& basis, int g) {
    int off = 0;
    for (int i = 0; i < g; ++i) off += static_cast<int>(basis.feature_groups[i].weights.cols());
    return off;
}

} // namespace

const char* to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("unknown activation: " + name);
}

void Architecture::validate() const {
    require(feature_groups >= 1, "architecture: feature_groups must be >= 1");
    require(feature_nodes >= 1, "architecture: feature_nodes must be >= 1");
    require(enhancement_groups >= 1, "architecture: enhancement_groups must be >= 1");
    require(enhancement_nodes >= 1, "architecture: enhancement_nodes must be >= 1");
    require(input_dim >= 1, "architecture: input_dim must be >= 1");
    require(output_dim >= 1, "architecture: output_dim must be >= 1");
    require(enhancement_activation != Activation::identity,
            "architecture: enhancement activation must be tanh or sigmoid");
}

int RandomBasis::feature_width() const {
    int w = 0;
    for (const auto& g : feature_groups) w += static_cast<int>(g.weights.cols());
    return w;
}

int RandomBasis::enhancement_width() const {
    int w = 0;
    for (const auto& g : enhancement_groups) w += static_cast<int>(g.weights.cols());
    return w;
}

int RandomBasis::enhancement_group_count() const {
    int n = 0;
    for (const auto& g : enhancement_groups)
        if (g.full_prefix()) ++n;
    return n;
}

RandomBasis init_basis(const Architecture& arch, std::uint64_t seed) {
    arch.validate();
    RandomBasis basis;
    basis.arch = arch;
    basis.seed = seed;

    for (int i = 0; i < arch.feature_groups; ++i) {
        basis.feature_groups.push_back(random_linear_map(
            seed, kFeatureStream + static_cast<std::uint64_t>(i) * 2,
            arch.input_dim, arch.feature_nodes));
        basis.layout.push_back({BlockKind::feature, i});
    }

    const int feature_width = arch.feature_groups * arch.feature_nodes;
    for (int j = 0; j < arch.enhancement_groups; ++j) {
        LinearMap lm = random_linear_map(
            seed, kEnhancementStream + static_cast<std::uint64_t>(j) * 2,
            feature_width, arch.enhancement_nodes);
        basis.enhancement_groups.push_back(
            {std::move(lm.weights), std::move(lm.bias), 0, arch.feature_groups});
        basis.layout.push_back({BlockKind::enhancement, j});
    }
    return basis;
}

Matrix feature_nodes(const Matrix& X, const RandomBasis& basis) {
    require(X.cols() == basis.input_dim(), "feature_nodes: input dimension mismatch");
    Matrix Z(X.rows(), basis.feature_width());
    int col = 0;
    for (const auto& g : basis.feature_groups) {
        const int w = static_cast<int>(g.weights.cols());
        Z.middleCols(col, w) = apply_map(X, g.weights, g.bias, basis.arch.feature_activation);
        col += w;
    }
    return Z;
}

Matrix enhancement_nodes(const Matrix& Z, const RandomBasis& basis) {
    require(Z.cols() == basis.feature_width(), "enhancement_nodes: feature width mismatch");
    Matrix H(Z.rows(), basis.enhancement_width());
    int col = 0;
    for (const auto& g : basis.enhancement_groups) {
        const int lo = feature_offset(basis, g.src_begin);
        const int hi = feature_offset(basis, g.src_end);
        require(g.weights.rows() == hi - lo, "enhancement_nodes: stale group wiring");
        const int w = static_cast<int>(g.weights.cols());
        H.middleCols(col, w) = apply_map(Z.middleCols(lo, hi - lo), g.weights, g.bias,
                                         basis.arch.enhancement_activation);
        col += w;
    }
    return H;
}

StateMatrix state_matrix(const Matrix& X, const RandomBasis& basis) {
    const Matrix Z = feature_nodes(X, basis);
    const Matrix H = enhancement_nodes(Z, basis);

    StateMatrix state;
    state.feature_block_width = static_cast<int>(Z.cols());
    state.enhancement_block_width = static_cast<int>(H.cols());
    state.values.resize(X.rows(), Z.cols() + H.cols());

    int col = 0;
    std::vector<int> hoff(basis.enhancement_groups.size() + 1, 0);
    for (std::size_t j = 0; j < basis.enhancement_groups.size(); ++j)
        hoff[j + 1] = hoff[j] + static_cast<int>(basis.enhancement_groups[j].weights.cols());

    for (const auto& ref : basis.layout) {
        if (ref.kind == BlockKind::feature) {
            const int w = static_cast<int>(basis.feature_groups[ref.index].weights.cols());
            state.values.middleCols(col, w) = Z.middleCols(feature_offset(basis, ref.index), w);
            col += w;
        } else {
            const int w = hoff[ref.index + 1] - hoff[ref.index];
            state.values.middleCols(col, w) = H.middleCols(hoff[ref.index], w);
            col += w;
        }
    }

    if (state.values.size() > 0 && !state.values.allFinite())
        throw NumericalError("state_matrix: non-finite entries");
    return state;
}

Matrix feature_group_output(const Matrix& X, const LinearMap& group, const RandomBasis& basis) {
    require(X.cols() == group.weights.rows(), "feature_group_output: input dimension mismatch");
    return apply_map(X, group.weights, group.bias, basis.arch.feature_activation);
}

Matrix enhancement_group_output(const Matrix& Z, const EnhancementMap& group,
                                const RandomBasis& basis) {
    const int lo = feature_offset(basis, group.src_begin);
    const int hi = feature_offset(basis, group.src_end);
    require(group.weights.rows() == hi - lo, "enhancement_group_output: wiring mismatch");
    require(Z.cols() >= hi, "enhancement_group_output: feature block too narrow");
    return apply_map(Z.middleCols(lo, hi - lo), group.weights, group.bias,
                     basis.arch.enhancement_activation);
}

Matrix appended_state_columns(const Matrix& X, const RandomBasis& extended,
                              std::size_t base_block_count) {
    require(base_block_count <= extended.layout.size(),
            "appended_state_columns: base block count exceeds layout");
    const Matrix Z = feature_nodes(X, extended);

    Eigen::Index width = 0;
    for (std::size_t b = base_block_count; b < extended.layout.size(); ++b) {
        const auto& ref = extended.layout[b];
        width += ref.kind == BlockKind::feature
                     ? extended.feature_groups[ref.index].weights.cols()
                     : extended.enhancement_groups[ref.index].weights.cols();
    }

    Matrix cols(X.rows(), width);
    Eigen::Index at = 0;
    for (std::size_t b = base_block_count; b < extended.layout.size(); ++b) {
        const auto& ref = extended.layout[b];
        if (ref.kind == BlockKind::feature) {
            const auto& g = extended.feature_groups[ref.index];
            cols.middleCols(at, g.weights.cols()) =
                Z.middleCols(feature_offset(extended, ref.index), g.weights.cols());
            at += g.weights.cols();
        } else {
            const auto& g = extended.enhancement_groups[ref.index];
            cols.middleCols(at, g.weights.cols()) = enhancement_group_output(Z, g, extended);
            at += g.weights.cols();
        }
    }
    return cols;
}

RandomBasis with_enhancement_group(const RandomBasis& basis, const EnhancementMap& group) {
    require(group.src_begin == 0 &&
                group.src_end == static_cast<int>(basis.feature_groups.size()),
            "with_enhancement_group: group must read the full feature block");
    require(group.weights.rows() == basis.feature_width(),
            "with_enhancement_group: feature width mismatch");
    RandomBasis out = basis;
    out.enhancement_groups.push_back(group);
    out.layout.push_back(
        {BlockKind::enhancement, static_cast<int>(out.enhancement_groups.size()) - 1});
    out.arch.enhancement_groups += 1;
    return out;
}

RandomBasis with_feature_group(const RandomBasis& basis, const LinearMap& feature_group,
                               const std::vector<EnhancementMap>& extensions) {
    require(feature_group.weights.rows() == basis.input_dim(),
            "with_feature_group: input dimension mismatch");
    RandomBasis out = basis;
    const int new_index = static_cast<int>(out.feature_groups.size());
    out.feature_groups.push_back(feature_group);
    out.layout.push_back({BlockKind::feature, new_index});
    for (const auto& ext : extensions) {
        require(ext.weights.rows() == feature_group.weights.cols(),
                "with_feature_group: extension width mismatch with the new feature group");
        EnhancementMap wired = ext;
        wired.src_begin = new_index;
        wired.src_end = new_index + 1;
        out.enhancement_groups.push_back(std::move(wired));
        out.layout.push_back(
            {BlockKind::enhancement, static_cast<int>(out.enhancement_groups.size()) - 1});
    }
    out.arch.feature_groups += 1;
    return out;
}

RandomBasis extend_basis_enhancement(const RandomBasis& basis, int node_count,
                                     std::uint64_t seed) {
    require(node_count >= 1, "extend_basis_enhancement: node_count must be >= 1");
    LinearMap lm = random_linear_map(seed, kEnhancementStream, basis.feature_width(), node_count);
    return with_enhancement_group(
        basis, {std::move(lm.weights), std::move(lm.bias), 0,
                static_cast<int>(basis.feature_groups.size())});
}

RandomBasis extend_basis_feature(const RandomBasis& basis, std::uint64_t seed) {
    const int width = basis.arch.feature_nodes;
    LinearMap feature_group = random_linear_map(seed, kFeatureStream, basis.input_dim(), width);

    // One extension cross-connection per full-prefix enhancement group,
    // matching the width of the group it shadows.
    std::vector<EnhancementMap> extensions;
    std::uint64_t tag = kEnhancementStream + 1;
    for (const auto& g : basis.enhancement_groups) {
        if (!g.full_prefix()) continue;
        LinearMap lm = random_linear_map(seed, tag, width, g.weights.cols());
        tag += 2;
        extensions.push_back({std::move(lm.weights), std::move(lm.bias), 0, 0});
    }
    return with_feature_group(basis, feature_group, extensions);
}

} // namespace bls
