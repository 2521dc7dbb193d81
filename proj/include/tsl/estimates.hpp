#pragma once

#include <optional>

#include "tsl/averages.hpp"
#include "tsl/json_io.hpp"
#include "tsl/norm_engine.hpp"
#include "tsl/norming_tree.hpp"

namespace tsl {

/// Outcome of one verifier run; pass means the worst slack (bound minus
/// attained value) is certified nonnegative.
struct VerifyReport {
    std::string lemma;
    Json params = Json::object();
    int instances = 0;
    Enclosure worst_slack;
    bool pass = false;
    Json witness = Json::object();
    bool sampled = false;  // true when enumeration fell back to random sampling
    std::uint64_t seed = 0;

    Json to_json() const;
    static VerifyReport from_json(const Json& j);

    void fold(const Enclosure& slack, const Json& w);
};

/// Removes every terminal node of order < M (cascading empty internal nodes
/// away) and reports the evaluation loss on the certified average; the loss
/// is guaranteed <= 2 eps. An empty first component means the whole tree was
/// pruned (zero functional).
std::pair<std::optional<NormingTree>, Enclosure> prune_tree(const NormingTree& f,
                                                            const AverageCert& cert, int M,
                                                            const SpaceSpec& spec);

/// Regroups the children of the node at `path` (child indices from the
/// root): the node's weight index r is replaced by k - ord, its children
/// grouped under fresh nodes of weight index r - (k - ord), groups chosen so
/// both layers stay admissible/allowable. Requires ord <= k <= ord + r and
/// identity exponents.
NormingTree regroup_node(const NormingTree& f, const std::vector<int>& path, int k,
                         const SpaceSpec& spec);

struct Theta1Options {
    int family_cap = 10;     // exhaustive enumeration up to this support size
    int samples = 200;       // random families in sampled mode
    std::uint64_t seed = 1;
};

/// Upper estimate for allowable splittings of an average: for S_j-allowable
/// (E_l), sum of norm(E_l x) <= theta_1^-1 theta^(M-j-1) sum_l sum_i a_i
/// norm(E_l x_i) + 4 eps / theta_M. Exhaustive over families when the
/// support is small, seeded sampling (flagged) otherwise; norms above the
/// engine cap are replaced by their l1 upper certificates.
VerifyReport verify_theta1(const AveragingTree& tree, int j, const SpaceSpec& spec,
                           const Theta1Options& opts = {});

/// Height-capped search factor in T[S_1, theta]: the full norm is at most
/// twice the best value over tree-analyses of height <= M, for supp(z) in
/// S_M and coefficients in [0, 1].
VerifyReport verify_height_fact(const BlockVector& z, int M, const Rational& theta);

/// Norm ratios between a modified space over S_n and its S_n[A_2] variant
/// stay within [1/3, 3].
VerifyReport verify_x2(const SpaceSpec& spec, const std::vector<BlockVector>& samples,
                       const NormOptions& nopts = {});

struct Ave1Instance {
    std::vector<AverageCert> ris;        // RIS of special averages
    std::vector<int> n_k;
    Rational ris_eps;
    std::vector<Rational> outer_coeffs;  // the (M, eps)-average combination
    int M = 1;
    Rational outer_eps;
};

/// Upper bound for averages of a RIS of special averages:
/// norm(x) <= (D^2 theta^-2 + 5) theta_M with the empirical D of the
/// constituents. Hypothesis failures (eps >= theta_M, short n_k) are
/// reported in the witness rather than silently ignored.
VerifyReport verify_ave1(const Ave1Instance& inst, const SpaceSpec& spec,
                         const NormOptions& nopts = {});

}  // namespace tsl
