#include "tsl/sampling.hpp"

#include <algorithm>

#include "tsl/schreier.hpp"

namespace tsl {

BlockVector random_vector(Rng& rng, int support_size, int max_index, int max_den) {
    if (support_size > max_index) throw Error("support larger than index range");
    std::map<int, Rational> coeffs;
    auto picks = rng.subset(max_index, support_size);
    for (int p : picks) coeffs[p + 1] = rng.nonzero_unit_rational(max_den);
    return BlockVector(std::move(coeffs));
}

FiniteSet random_schreier_set(Rng& rng, int M, int max_size, int max_index) {
    // grow greedily, keeping membership in S_M
    int start = rng.range(2, std::max(2, max_index / 2));
    std::vector<int> cur{start};
    int want = rng.range(1, max_size);
    int next = start;
    while (static_cast<int>(cur.size()) < want) {
        next += rng.range(1, 3);
        if (next > max_index) break;
        cur.push_back(next);
        if (!member(FiniteSet(cur), FamilySpec::S(M))) {
            cur.pop_back();
            break;
        }
    }
    return FiniteSet(cur);
}

namespace {

NormNode random_tree_over(Rng& rng, const std::vector<int>& points,
                          const std::vector<Rational>& coeffs, const SpaceSpec& spec,
                          int depth) {
    int s = static_cast<int>(points.size());
    if (s == 1 || depth == 0 || rng.range(0, 3) == 0) {
        int p = rng.range(0, s - 1);
        return NormNode::leaf(points[p], coeffs[p] < 0 ? -1 : 1);
    }
    // try a few random minima subsets until one has a usable weight index
    for (int attempt = 0; attempt < 8; ++attempt) {
        int k = rng.range(2, std::min(s, 5));
        auto pos = rng.subset(s, k);
        std::vector<int> minima;
        for (int p : pos) minima.push_back(points[p]);
        std::optional<int> r;
        if (spec.family == SpaceSpec::FamilyKind::A)
            r = k;
        else
            r = spec.compose_inner_A2 ? compose_a2_rank(FiniteSet(minima))
                                      : schreier_rank(FiniteSet(minima));
        if (!r) continue;
        auto idx = spec.least_index_for(std::max(1, *r));
        if (!idx) continue;
        std::vector<NormNode> children;
        for (int b = 0; b < k; ++b) {
            int from = pos[b];
            int to = (b + 1 < k) ? pos[b + 1] : s;
            std::vector<int> sub_pts(points.begin() + from, points.begin() + to);
            std::vector<Rational> sub_cs(coeffs.begin() + from, coeffs.begin() + to);
            children.push_back(random_tree_over(rng, sub_pts, sub_cs, spec, depth - 1));
        }
        return NormNode::internal(*idx, std::move(children));
    }
    int p = rng.range(0, s - 1);
    return NormNode::leaf(points[p], coeffs[p] < 0 ? -1 : 1);
}

}  // namespace

NormingTree random_norming_tree(Rng& rng, const BlockVector& x, const SpaceSpec& spec,
                                int max_depth) {
    if (x.zero()) return NormingTree{NormNode::leaf(1, 1)};
    std::vector<int> pts;
    std::vector<Rational> cs;
    for (const auto& [k, v] : x.coeffs()) {
        pts.push_back(k);
        cs.push_back(v);
    }
    return NormingTree{random_tree_over(rng, pts, cs, spec, max_depth)};
}

RestrictionInstance random_restriction_instance(Rng& rng, const SpaceSpec& spec) {
    RestrictionInstance inst;
    Enclosure thetaM_enc;
    BuildOptions bopts;
    bopts.power_of_two = true;
    int shape = rng.range(0, 3);
    long long start = 1 + rng.range(0, 16);
    if (shape == 0) {
        // height 1, wide root: identity restriction only
        BasisSupply supply(start);
        bopts.restriction_theta = spec.thetas.theta(1, 64).lo();
        inst.source = build_averaging_tree(supply, 1, Rational(4), bopts);
        inst.level = 1;
        inst.I = {1};
        return inst;
    }
    // height 2: root weight 4, level-1 chain 4/32/512/16384 when basis-fed.
    // declared eps large enough that the strengthened schedule follows from
    // the plain chain (theta_M eps >= 1).
    Rational thetaM = spec.thetas.theta(2, 64).lo();
    Rational eps = Rational(2) / thetaM + 1;
    bopts.restriction_theta = thetaM;
    std::unique_ptr<Supply> supply;
    if (shape == 1)
        supply = std::make_unique<BasisSupply>(start);
    else
        supply = std::make_unique<FlatBlockSupply>(start, rng.range(1, 2), spec);
    inst.source = build_averaging_tree(*supply, 2, eps, bopts);
    if (shape == 3) {
        inst.level = 2;  // identity at the root
        inst.I = {1};
        return inst;
    }
    inst.level = 1;
    int n1 = static_cast<int>(inst.source.levels[1].size());
    // any nonempty subset works: every level-1 weight is a multiple of 4
    std::vector<int> I;
    for (int i = 1; i <= n1; ++i)
        if (rng.coin()) I.push_back(i);
    if (I.empty()) I.push_back(rng.range(1, n1));
    inst.I = I;
    return inst;
}

}  // namespace tsl
