#pragma once

#include "bls/core.hpp"

#include <cstdint>
#include <vector>

namespace bls {

enum class Activation { identity, tanh, sigmoid };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Static shape of the network: k groups of q feature nodes mapped straight
/// from the input, and m groups of r enhancement nodes fed by the feature
/// block. Hidden width is feature_groups*feature_nodes +
/// enhancement_groups*enhancement_nodes.
struct Architecture {
    int feature_groups = 1;      // k
    int feature_nodes = 1;       // q, per group
    int enhancement_groups = 1;  // m
    int enhancement_nodes = 1;   // r, per group
    int input_dim = 1;           // M
    int output_dim = 1;          // C
    Activation feature_activation = Activation::identity;
    Activation enhancement_activation = Activation::tanh;

    void validate() const;
    int state_width() const {
        return feature_groups * feature_nodes + enhancement_groups * enhancement_nodes;
    }
};

/// One random affine map: out = act(in * weights + bias), bias replicated
/// across rows. Biases are per-node so the map is defined for any batch.
struct LinearMap {
    Matrix weights;  // in x out
    RowVector bias;  // 1 x out
};

/// An enhancement group reads the concatenated outputs of feature groups
/// [src_begin, src_end). Groups created at construction read the whole
/// feature block; extension groups added alongside a new feature group read
/// only that group.
struct EnhancementMap {
    Matrix weights;
    RowVector bias;
    int src_begin = 0;
    int src_end = 0;

    /// True for groups wired to the full feature prefix, as opposed to the
    /// extension cross-connections created by a feature-group insertion.
    bool full_prefix() const { return src_begin == 0; }
};

enum class BlockKind { feature, enhancement };

struct BlockRef {
    BlockKind kind;
    int index;
};

/// All frozen random tensors of the network plus the column layout of the
/// state matrix. Immutable once built; the extend_* operations return a new
/// basis and never touch the tensors they were given.
struct RandomBasis {
    std::vector<LinearMap> feature_groups;
    std::vector<EnhancementMap> enhancement_groups;
    std::vector<BlockRef> layout;  // column order of the state matrix
    Architecture arch;             // shape at construction time
    std::uint64_t seed = 0;

    int input_dim() const { return arch.input_dim; }
    int feature_width() const;
    int enhancement_width() const;
    int state_width() const { return feature_width() + enhancement_width(); }
    /// Count of enhancement groups wired to the full feature prefix.
    int enhancement_group_count() const;
};

struct StateMatrix {
    Matrix values;                 // N x L, columns in basis layout order
    int feature_block_width = 0;
    int enhancement_block_width = 0;
};

/// Draws all weights i.i.d. uniform on [-1, 1] and biases uniform on [0, 1].
/// The same (arch, seed) always reproduces the identical basis.
RandomBasis init_basis(const Architecture& arch, std::uint64_t seed);

/// Maps inputs through the feature groups; column block i is
/// act(X * W_i + bias_i), blocks concatenated in group order.
Matrix feature_nodes(const Matrix& X, const RandomBasis& basis);

/// Maps the feature block through the enhancement groups, concatenated in
/// group order. Z must span all feature columns.
Matrix enhancement_nodes(const Matrix& Z, const RandomBasis& basis);

/// Full hidden representation for a batch of inputs.
StateMatrix state_matrix(const Matrix& X, const RandomBasis& basis);

/// Output of one feature group for a batch of inputs.
Matrix feature_group_output(const Matrix& X, const LinearMap& group, const RandomBasis& basis);

/// Output of one enhancement group given the full feature block Z.
Matrix enhancement_group_output(const Matrix& Z, const EnhancementMap& group,
                                const RandomBasis& basis);

/// State columns contributed by every layout block past the first
/// `base_block_count`, in layout order. The node-increment updates need only
/// the new columns rather than the whole state matrix.
Matrix appended_state_columns(const Matrix& X, const RandomBasis& extended,
                              std::size_t base_block_count);

/// Appends one enhancement group of `node_count` nodes wired to the current
/// feature block. Deterministic in `seed`; the input basis is not modified.
RandomBasis extend_basis_enhancement(const RandomBasis& basis, int node_count, std::uint64_t seed);

/// Appends a feature group plus one extension enhancement group per existing
/// full-prefix enhancement group; the extensions read only the new feature
/// group and mirror the width of the group they shadow.
RandomBasis extend_basis_feature(const RandomBasis& basis, std::uint64_t seed);

/// Non-random counterparts taking caller-supplied tensors. The extension
/// groups are rewired to read only the new feature group.
RandomBasis with_enhancement_group(const RandomBasis& basis, const EnhancementMap& group);
RandomBasis with_feature_group(const RandomBasis& basis, const LinearMap& feature_group,
                               const std::vector<EnhancementMap>& extensions);

} // namespace bls
