#pragma once

#include <string>
#include <vector>

#include "tsl/block_vector.hpp"
#include "tsl/enclosure.hpp"
#include "tsl/space_spec.hpp"

namespace tsl {

/// Tree-analysis of a norming functional. Internal nodes carry the weight
/// index n (weight theta_n); leaves carry signed coordinate functionals.
struct NormNode {
    int weight_index = 0;            // >= 1 on internal nodes
    std::vector<NormNode> children;  // empty exactly on leaves
    int leaf_index = 0;              // >= 1 on leaves
    int leaf_sign = 1;               // +1 or -1

    bool is_leaf() const { return children.empty(); }

    static NormNode leaf(int index, int sign = 1) {
        NormNode n;
        n.leaf_index = index;
        n.leaf_sign = sign;
        return n;
    }
    static NormNode internal(int weight_index, std::vector<NormNode> children) {
        NormNode n;
        n.weight_index = weight_index;
        n.children = std::move(children);
        return n;
    }
};

struct NormingTree {
    NormNode root;
};

/// Union of leaf indices below the node.
FiniteSet node_support(const NormNode& n);

/// Max over leaves of the sum of ancestor weight indices.
int tree_height_ord(const NormNode& n);

/// Empty iff every internal node's children form an M_(k_n)-admissible
/// (modified: -allowable) sequence for the node's weight index n.
std::vector<std::string> validate_tree(const NormingTree& f, const SpaceSpec& spec);

/// Sum over leaves of tag * sign * x(index), tag = product of strict
/// ancestor weights. Throws InvalidTree when validation fails (unless
/// `checked` is false).
Enclosure evaluate(const NormingTree& f, const BlockVector& x, const SpaceSpec& spec,
                   int prec_bits = 64, bool checked = true);

}  // namespace tsl
