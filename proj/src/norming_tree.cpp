#include "tsl/norming_tree.hpp"

#include <algorithm>

#include "tsl/schreier.hpp"

namespace tsl {

namespace {

void collect_leaves(const NormNode& n, std::vector<int>& out) {
    if (n.is_leaf()) {
        out.push_back(n.leaf_index);
        return;
    }
    for (const auto& c : n.children) collect_leaves(c, out);
}

void validate_node(const NormNode& n, const SpaceSpec& spec, const std::string& path,
                   std::vector<std::string>& out) {
    if (n.is_leaf()) {
        if (n.leaf_index < 1) out.push_back(path + ": leaf index must be >= 1");
        if (n.leaf_sign != 1 && n.leaf_sign != -1)
            out.push_back(path + ": leaf sign must be +1 or -1");
        return;
    }
    if (n.weight_index < 1) {
        out.push_back(path + ": internal weight index must be >= 1");
        return;
    }
    if (auto mx = spec.thetas.max_index(); mx && n.weight_index > *mx)
        out.push_back(path + ": weight index beyond theta table");
    std::vector<FiniteSet> supports;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        std::vector<int> leaves;
        collect_leaves(n.children[i], leaves);
        if (leaves.empty()) {
            out.push_back(path + "." + std::to_string(i) + ": child has empty support");
            return;
        }
        supports.push_back(FiniteSet::from_unsorted(leaves));
    }
    for (std::size_t i = 0; i < supports.size(); ++i)
        for (std::size_t j = i + 1; j < supports.size(); ++j)
            if (!supports[i].disjoint_from(supports[j]))
                out.push_back(path + ": children " + std::to_string(i) + "," +
                              std::to_string(j) + " overlap");
    if (!spec.modified) {
        for (std::size_t i = 0; i + 1 < supports.size(); ++i)
            if (!supports[i].before(supports[i + 1]))
                out.push_back(path + ": children not successive at " + std::to_string(i));
    }
    std::vector<int> minima;
    for (const auto& s : supports) minima.push_back(s.min());
    FiniteSet minima_set = FiniteSet::from_unsorted(minima);
    if (minima_set.size() != supports.size()) {
        out.push_back(path + ": children share minima");
    } else {
        FamilySpec fam = spec.family_at(n.weight_index);
        if (!member(minima_set, fam))
            out.push_back(path + ": minima " + minima_set.to_string() + " not in " +
                          fam.to_string());
    }
    for (std::size_t i = 0; i < n.children.size(); ++i)
        validate_node(n.children[i], spec, path + "." + std::to_string(i), out);
}

Enclosure evaluate_node(const NormNode& n, const BlockVector& x, const SpaceSpec& spec,
                        const Enclosure& tag, int prec_bits) {
    if (n.is_leaf()) {
        Rational c = x.at(n.leaf_index);
        if (n.leaf_sign < 0) c = -c;
        return tag * Enclosure::exact(c);
    }
    Enclosure child_tag = tag * spec.thetas.theta(n.weight_index, prec_bits);
    Enclosure acc = Enclosure::exact(Rational(0));
    for (const auto& c : n.children) acc = acc + evaluate_node(c, x, spec, child_tag, prec_bits);
    return acc;
}

}  // namespace

FiniteSet node_support(const NormNode& n) {
    std::vector<int> leaves;
    collect_leaves(n, leaves);
    return FiniteSet::from_unsorted(leaves);
}

int tree_height_ord(const NormNode& n) {
    if (n.is_leaf()) return 0;
    int best = 0;
    for (const auto& c : n.children) best = std::max(best, tree_height_ord(c));
    return best + n.weight_index;
}

std::vector<std::string> validate_tree(const NormingTree& f, const SpaceSpec& spec) {
    std::vector<std::string> out;
    validate_node(f.root, spec, "root", out);
    return out;
}

Enclosure evaluate(const NormingTree& f, const BlockVector& x, const SpaceSpec& spec,
                   int prec_bits, bool checked) {
    if (checked) {
        auto violations = validate_tree(f, spec);
        if (!violations.empty()) throw InvalidTree(violations.front());
    }
    return evaluate_node(f.root, x, spec, Enclosure::exact(Rational(1)), prec_bits);
}

}  // namespace tsl
