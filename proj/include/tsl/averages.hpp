#pragma once

#include <memory>
#include <optional>

#include "tsl/block_vector.hpp"
#include "tsl/norm_engine.hpp"
#include "tsl/norming_tree.hpp"
#include "tsl/schreier.hpp"
#include "tsl/space_spec.hpp"

namespace tsl {

/// Certificate data for an (M, eps)-average x = sum a_i x_i: successive
/// blocks, index set G = (minsupp x_i) in S_M, sum a_i = 1, and mass on any
/// S_(M-1) set below eps.
struct AverageCert {
    std::vector<BlockVector> blocks;
    std::vector<Rational> coeffs;
    int M = 0;
    Rational eps;

    BlockVector combined() const;
    FiniteSet index_set() const;  // minsupp of each block
};

struct AverageCheck {
    bool ok = true;
    std::vector<std::string> violations;
    std::optional<int> index_rank;
    Rational worst_lower_mass;  // sup over S_(M-1) sets of the coefficient mass
};

/// Throws MalformedDecomposition on structural defects; the returned flags
/// cover the mathematical conditions.
AverageCheck check_average(const AverageCert& cert);

/// Layered averaging tree: levels[0] are the leaves, levels.back() the root.
struct AveragingTree {
    struct Node {
        BlockVector vec;
        long long weight = 0;  // N_i^j; meaningless on leaves
        Rational eps;          // error; meaningless on leaves
        Rational coeff;        // a_i^j with respect to the root
        int child_begin = -1, child_end = -1;  // interval into the level below
        int leaf_begin = -1, leaf_end = -1;    // descendant leaf positions
    };

    std::vector<std::vector<Node>> levels;
    Rational declared_eps;
    bool power_of_two = false;
    /// Restriction outputs allow the root child count L to differ from the
    /// root weight.
    bool root_child_count_exception = false;

    int height() const { return static_cast<int>(levels.size()) - 1; }
    const Node& root() const { return levels.back().front(); }
    std::size_t leaf_count() const { return levels.front().size(); }

    /// The (j, eps)-average certificate carried by a node: its descendant
    /// leaves with their coefficients rescaled to sum to 1.
    AverageCert node_cert(int level, int index) const;
};

/// Ordered source of normalized block vectors with arbitrarily large
/// minimal supports.
class Supply {
public:
    virtual ~Supply() = default;
    /// Next vector with minsupp >= floor, successive to earlier output.
    virtual BlockVector next(long long floor) = 0;
};

/// Unit basis vectors e_floor, e_(floor+1), ...
class BasisSupply : public Supply {
public:
    explicit BasisSupply(long long start = 1) : next_(start) {}
    BlockVector next(long long floor) override;

private:
    long long next_;
};

/// Fixed pool of vectors, consumed in order; skips ahead to honor the floor.
class VectorSupply : public Supply {
public:
    explicit VectorSupply(std::vector<BlockVector> pool) : pool_(std::move(pool)) {}
    BlockVector next(long long floor) override;

private:
    std::vector<BlockVector> pool_;
    std::size_t at_ = 0;
};

/// Supply of short blocks (1/w)(e_k + ... + e_(k+w-1)) normalized in the
/// given space; used to seed restriction tests with non-basis leaves.
class FlatBlockSupply : public Supply {
public:
    FlatBlockSupply(long long start, int width, const SpaceSpec& spec);
    BlockVector next(long long floor) override;

private:
    long long next_;
    int width_;
    SpaceSpec spec_;
};

struct BuildOptions {
    bool power_of_two = false;
    /// theta_M for the strengthened error schedule of the restriction
    /// construction: eps_1^j <= theta_M eps / 2 and
    /// eps_(i+1)^j <= theta_M eps / (2^i maxsupp x_i^j).
    std::optional<Rational> restriction_theta;
    long long max_leaves = 200000;
};

/// Constructs an (M, eps)-average with a full averaging tree. Weights are
/// chosen minimal (least admissible, power of two when requested) to keep
/// supports desk-sized.
AveragingTree build_averaging_tree(Supply& supply, int M, const Rational& eps,
                                   const BuildOptions& opts = {});

/// Independent checker for every structural condition of an averaging tree:
/// level ordering, child intervals, exact node equations, weight/error
/// bounds, the error chains, coefficient identities, and the per-node
/// average certificates. With restriction_theta set it also demands the
/// strengthened error schedule for the declared eps.
std::vector<std::string> check_averaging_tree(const AveragingTree& t,
                                              const std::optional<Rational>& restriction_theta =
                                                  std::nullopt);

/// The restriction construction: given a power-of-two tree whose errors
/// satisfy the strengthened schedule, selects nodes I (1-based) at `level`
/// and rebuilds y = sum_{i in I} a_i^level x_i^level as a restriction of an
/// (level, eps_I)-average, splitting coefficient sets into consecutive
/// pieces of equal dyadic mass (leftmost splits).
AveragingTree restrict_average(const AveragingTree& tree, int level, const std::vector<int>& I);

/// Verifies the restriction output against its source: exact mass
/// bookkeeping, comparability of nodes across the trees, the weight
/// formula, the error conditions on the output, coefficient identities, and
/// norm(y_k^0) <= 1 (exact below the norm cap, l1-certified above).
std::vector<std::string> check_restriction_properties(const AveragingTree& source, int level,
                                                      const std::vector<int>& I,
                                                      const AveragingTree& restricted,
                                                      const SpaceSpec& spec);

/// Builds the functional sum over F of theta^(M-l) e*_minsupp(y_k^l) for an
/// antichain F of restriction-tree nodes, as a norming tree of T[S_1,theta]
/// (weight-1 chain through the tree shape).
NormingTree antichain_functional(const AveragingTree& t,
                                 const std::vector<std::pair<int, int>>& F);

struct SpecialAverageRow {
    int j = 0;
    Enclosure split_sup;      // sup over S_j-allowable families of sum of norms
    Enclosure lower_bound;    // theta^(M-j) / D
    Enclosure upper_bound;    // theta^(M-j) * D
    bool within = false;
};

struct SpecialAverageReport {
    std::vector<SpecialAverageRow> rows;
    Enclosure empirical_D;  // smallest D making every row two-sided
    bool all_within = false;
};

/// Prop-style two-sided control of allowable splittings of an average, per
/// level j = 0..M, against theta^(M-j)/D .. theta^(M-j)*D.
SpecialAverageReport check_special_average(const AverageCert& cert, const SpaceSpec& spec,
                                           const Rational& D, const NormOptions& nopts = {});

struct TsirelsonAverageResult {
    bool ok = true;
    /// min over samples of LHS/RHS (LHS = mixed norm, RHS = quarter of the
    /// collapsed T[S_1,theta] norm).
    Enclosure worst_ratio;
    std::string witness;
};

/// Lower Tsirelson-type estimate with constant 1/4: for sampled G in S_M and
/// coefficients, norm(sum_{i in G} a_i x_i) >= (1/4) norm(sum a_i
/// |x_i| e_minsupp)_{T[S_1,theta]}.
TsirelsonAverageResult check_tsirelson_average(const std::vector<BlockVector>& blocks,
                                               const SpaceSpec& spec, int M,
                                               const std::vector<FiniteSet>& G_samples,
                                               const std::vector<std::vector<Rational>>&
                                                   coeff_samples,
                                               const NormOptions& nopts = {});

/// Rapidly-increasing-sequence condition: theta_(l_(k+1)) * l1(x_k) <=
/// eps / 2^(k+1) with l_k = floor(n_k / 4).
bool check_ris(const std::vector<AverageCert>& seq, const std::vector<int>& n_k,
               const Rational& eps, const SpaceSpec& spec);

}  // namespace tsl
