#include "tsl/estimates.hpp"

#include <algorithm>

#include "tsl/rng.hpp"
#include "tsl/schreier.hpp"

namespace tsl {

Json VerifyReport::to_json() const {
    Json j;
    j["lemma"] = lemma;
    j["params"] = params;
    j["instances"] = instances;
    j["worst_slack"] = enclosure_to_json(worst_slack);
    j["pass"] = pass;
    j["witness"] = witness;
    j["sampled"] = sampled;
    j["seed"] = seed;
    return j;
}

VerifyReport VerifyReport::from_json(const Json& j) {
    VerifyReport r;
    try {
        r.lemma = j.at("lemma").get<std::string>();
        r.params = j.value("params", Json::object());
        r.instances = j.at("instances").get<int>();
        r.worst_slack = enclosure_from_json(j.at("worst_slack"));
        r.pass = j.at("pass").get<bool>();
        r.witness = j.value("witness", Json::object());
        r.sampled = j.value("sampled", false);
        r.seed = j.value("seed", std::uint64_t{0});
    } catch (const Json::exception& e) {
        throw SchemaMismatch(e.what());
    }
    return r;
}

void VerifyReport::fold(const Enclosure& slack, const Json& w) {
    if (instances == 0 || slack.lo() < worst_slack.lo()) {
        worst_slack = slack;
        witness = w;
    }
    ++instances;
    pass = pass && worst_slack.lo() >= 0;
}

namespace {

int node_ord_at(const NormNode& root, const std::vector<int>& path) {
    const NormNode* cur = &root;
    int ord = 0;
    for (int step : path) {
        ord += cur->weight_index;
        if (step < 0 || step >= static_cast<int>(cur->children.size()))
            throw Error("bad tree path");
        cur = &cur->children[step];
    }
    return ord;
}

std::optional<NormNode> prune_node(const NormNode& n, int ord, int M) {
    if (n.is_leaf()) {
        if (ord < M) return std::nullopt;
        return n;
    }
    NormNode out;
    out.weight_index = n.weight_index;
    for (const auto& c : n.children)
        if (auto sub = prune_node(c, ord + n.weight_index, M)) out.children.push_back(*sub);
    if (out.children.empty()) return std::nullopt;
    return out;
}

}  // namespace

std::pair<std::optional<NormingTree>, Enclosure> prune_tree(const NormingTree& f,
                                                            const AverageCert& cert, int M,
                                                            const SpaceSpec& spec) {
    auto violations = validate_tree(f, spec);
    if (!violations.empty()) throw InvalidTree(violations.front());
    AverageCheck chk = check_average(cert);
    if (!chk.ok) throw PreconditionFailed("average certificate fails: " + chk.violations.front());
    BlockVector x = cert.combined();
    Enclosure before = evaluate(f, x, spec, 64, false);
    auto pruned = prune_node(f.root, 0, M);
    Enclosure after = pruned ? evaluate(NormingTree{*pruned}, x, spec, 64, false)
                             : Enclosure::exact(Rational(0));
    std::optional<NormingTree> out;
    if (pruned) out = NormingTree{std::move(*pruned)};
    return {std::move(out), before - after};
}

NormingTree regroup_node(const NormingTree& f, const std::vector<int>& path, int k,
                         const SpaceSpec& spec) {
    if (!spec.exponents.empty())
        throw PreconditionFailed("regrouping assumes identity exponents");
    NormingTree out = f;
    NormNode* cur = &out.root;
    int ord = 0;
    for (int step : path) {
        ord += cur->weight_index;
        if (cur->is_leaf() || step < 0 || step >= static_cast<int>(cur->children.size()))
            throw Error("bad tree path");
        cur = &cur->children[step];
    }
    if (cur->is_leaf()) throw PreconditionFailed("cannot regroup a leaf");
    int r = cur->weight_index;
    if (k < ord || k > ord + r) throw PreconditionFailed("k outside [ord, ord + r]");
    int d = k - ord;
    if (d == 0 || d == r) return out;  // single group / singleton groups: shape unchanged

    std::vector<int> minima;
    for (const auto& c : cur->children) minima.push_back(node_support(c).min());
    std::vector<std::size_t> order(minima.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return minima[a] < minima[b]; });
    std::vector<int> sorted_minima;
    for (auto i : order) sorted_minima.push_back(minima[i]);
    FiniteSet g(sorted_minima);
    auto pieces = schreier_decompose(g, r, d);

    std::vector<NormNode> groups;
    std::size_t at = 0;
    for (const auto& piece : pieces) {
        NormNode mid;
        mid.weight_index = r - d;
        for (std::size_t t = 0; t < piece.size(); ++t) mid.children.push_back(
            cur->children[order[at++]]);
        groups.push_back(std::move(mid));
    }
    cur->weight_index = d;
    cur->children = std::move(groups);
    return out;
}

namespace {

Enclosure norm_or_l1(const BlockVector& v, const SpaceSpec& spec, const NormOptions& nopts,
                     bool* capped) {
    int cap = spec.modified ? nopts.cap_modified : nopts.cap_non_modified;
    if (static_cast<int>(v.coeffs().size()) <= cap) return norm(v, spec, nopts);
    if (capped) *capped = true;
    return Enclosure::interval(v.linf(), v.l1(), 0);  // crude but certified
}

}  // namespace

VerifyReport verify_theta1(const AveragingTree& tree, int j, const SpaceSpec& spec,
                           const Theta1Options& opts) {
    int M = tree.height();
    if (j < 0 || j >= M) throw PreconditionFailed("needs 0 <= j < M");
    VerifyReport rep;
    rep.lemma = "average-allowable-split-upper";
    rep.seed = opts.seed;
    rep.pass = true;
    BlockVector x = tree.root().vec;
    Rational eps = tree.root().eps;
    FiniteSet supp = x.support();
    int s = static_cast<int>(supp.size());
    rep.params = Json{{"M", M}, {"j", j}, {"support", s}, {"eps", to_fraction_string(eps)}};

    Enclosure theta = spec.theta_limit(64);
    Enclosure theta1 = spec.thetas.theta(1, 64);
    Enclosure thetaM = spec.thetas.theta(M, 64);
    Enclosure factor =
        theta.pow_int(static_cast<unsigned>(M - j - 1)) / theta1;  // theta^(M-j-1)/theta_1
    Enclosure err = Enclosure::exact(Rational(4)) * Enclosure::exact(eps) / thetaM;

    NormOptions nopts;
    // leaves with their coefficients
    std::vector<const BlockVector*> leaves;
    std::vector<Rational> a;
    for (const auto& leaf : tree.levels[0]) {
        leaves.push_back(&leaf.vec);
        a.push_back(leaf.coeff);
    }
    const auto& sup = supp.elements();

    std::map<unsigned, Enclosure> xnorm_memo;
    std::map<std::pair<std::size_t, unsigned>, Enclosure> leafnorm_memo;
    bool any_capped = false;
    auto mask_to_set = [&](unsigned m) {
        std::vector<int> pts;
        for (int p = 0; p < s; ++p)
            if (m & (1u << p)) pts.push_back(sup[p]);
        return FiniteSet(std::move(pts));
    };
    auto xnorm = [&](unsigned m) {
        auto it = xnorm_memo.find(m);
        if (it != xnorm_memo.end()) return it->second;
        Enclosure e = norm_or_l1(x.restricted(mask_to_set(m)), spec, nopts, &any_capped);
        xnorm_memo.emplace(m, e);
        return e;
    };
    auto leafnorm = [&](std::size_t i, unsigned m) {
        auto key = std::make_pair(i, m);
        auto it = leafnorm_memo.find(key);
        if (it != leafnorm_memo.end()) return it->second;
        BlockVector piece = leaves[i]->restricted(mask_to_set(m));
        Enclosure e = piece.zero() ? Enclosure::exact(Rational(0))
                                   : norm_or_l1(piece, spec, nopts, &any_capped);
        leafnorm_memo.emplace(key, e);
        return e;
    };

    auto run_family_masks = [&](const std::vector<unsigned>& blocks) {
        Enclosure lhs = Enclosure::exact(Rational(0));
        for (unsigned bm : blocks) lhs = lhs + xnorm(bm);
        Enclosure rhs_sum = Enclosure::exact(Rational(0));
        for (unsigned bm : blocks)
            for (std::size_t i = 0; i < leaves.size(); ++i)
                rhs_sum = rhs_sum + Enclosure::exact(a[i]) * leafnorm(i, bm);
        Enclosure rhs = factor * rhs_sum + err;
        Enclosure slack = rhs - lhs;
        if (rep.instances == 0 || slack.lo() < rep.worst_slack.lo()) {
            Json w;
            w["blocks"] = Json::array();
            for (unsigned bm : blocks) w["blocks"].push_back(finite_set_to_json(mask_to_set(bm)));
            w["lhs"] = enclosure_to_json(lhs);
            w["rhs"] = enclosure_to_json(rhs);
            rep.fold(slack, w);
        } else {
            rep.fold(slack, rep.witness);
        }
    };

    auto run_family = [&](const std::vector<FiniteSet>& family) {
        std::vector<unsigned> masks;
        for (const auto& E : family) {
            unsigned m = 0;
            for (int p = 0; p < s; ++p)
                if (E.contains(sup[p])) m |= 1u << p;
            masks.push_back(m);
        }
        run_family_masks(masks);
    };

    if (s <= opts.family_cap) {
        // Every family of pairwise disjoint blocks with minima in S_j
        // (partitions of every subset; k = 1 included). Blocks are peeled in
        // increasing minima order, pruning as soon as the minima leave S_j.
        std::vector<unsigned> blocks;
        std::vector<int> minima;
        std::function<void(unsigned)> scan = [&](unsigned rem) {
            if (rem == 0) return;
            unsigned low = rem & (~rem + 1u);
            unsigned rest = rem & ~low;
            // the least remaining point either starts the next block (any
            // companion subset) or is dropped; blocks appear in minima order
            minima.push_back(sup[__builtin_ctz(low)]);
            if (member(FiniteSet::from_unsorted(minima), FamilySpec::S(j))) {
                unsigned sub = rest;
                while (true) {
                    blocks.push_back(low | sub);
                    run_family_masks(blocks);
                    scan(rem & ~(low | sub));
                    blocks.pop_back();
                    if (sub == 0) break;
                    sub = (sub - 1) & rest;
                }
            }
            minima.pop_back();
            scan(rem & ~low);  // drop the least remaining point entirely
        };
        scan((1u << s) - 1);
    } else {
        rep.sampled = true;
        Rng rng(opts.seed);
        const auto& sup = supp.elements();
        for (int t = 0; t < opts.samples; ++t) {
            // random disjoint interval blocks with minima forming an S_j set
            int count = rng.range(1, std::max(1, std::min(6, j == 0 ? 1 : 2 * j + 2)));
            std::vector<FiniteSet> family;
            std::vector<int> minima;
            int pos = rng.range(0, s - 1);
            for (int b = 0; b < count && pos < s; ++b) {
                int len = rng.range(1, std::min(8, s - pos));
                std::vector<int> pts(sup.begin() + pos, sup.begin() + pos + len);
                family.emplace_back(pts);
                minima.push_back(pts.front());
                pos += len + rng.range(0, 4);
            }
            if (family.empty()) continue;
            if (!member(FiniteSet::from_unsorted(minima), FamilySpec::S(j))) continue;
            run_family(family);
        }
    }
    return rep;
}

VerifyReport verify_height_fact(const BlockVector& z, int M, const Rational& theta) {
    VerifyReport rep;
    rep.lemma = "height-cap-factor";
    rep.pass = true;
    if (!schreier_rank(z.support()) || *schreier_rank(z.support()) > M)
        throw PreconditionFailed("support not in S_M");
    for (const auto& [k, v] : z.coeffs())
        if (v < 0 || v > 1) throw PreconditionFailed("coefficients must lie in [0,1]");
    Rational full = tsirelson_norm(z, theta);
    Rational capped = tsirelson_norm(z, theta, M);
    rep.params = Json{{"M", M},
                      {"theta", to_fraction_string(theta)},
                      {"support", static_cast<int>(z.coeffs().size())}};
    Json w;
    w["full"] = to_fraction_string(full);
    w["capped"] = to_fraction_string(capped);
    // structural: capped <= full; bound: full <= 2 * capped
    rep.fold(Enclosure::exact(full - capped), w);
    rep.fold(Enclosure::exact(2 * capped - full), w);
    return rep;
}

VerifyReport verify_x2(const SpaceSpec& spec, const std::vector<BlockVector>& samples,
                       const NormOptions& nopts) {
    if (!spec.modified || spec.family != SpaceSpec::FamilyKind::S || spec.compose_inner_A2)
        throw PreconditionFailed("needs a modified space over Schreier families");
    SpaceSpec variant = spec;
    variant.compose_inner_A2 = true;
    VerifyReport rep;
    rep.lemma = "compose-a2-isomorphism";
    rep.pass = true;
    rep.params = Json{{"samples", static_cast<int>(samples.size())}};
    Rational rmin, rmax;
    bool first = true;
    for (const auto& x : samples) {
        if (x.zero()) continue;
        Enclosure base = norm(x, spec, nopts);
        Enclosure comp = norm(x, variant, nopts);
        // slack of both one-sided bounds 1/3 <= comp/base <= 3
        Enclosure s1 = Enclosure::exact(Rational(3)) * base - comp;
        Enclosure s2 = Enclosure::exact(Rational(3)) * comp - base;
        Json w;
        w["vector"] = vector_to_json(x);
        w["base"] = enclosure_to_json(base);
        w["compose"] = enclosure_to_json(comp);
        rep.fold(enc_min(s1, s2), w);
        if (base.is_exact() && comp.is_exact() && base.lo() > 0) {
            Rational ratio = comp.lo() / base.lo();
            if (first || ratio < rmin) rmin = ratio;
            if (first || ratio > rmax) rmax = ratio;
            first = false;
        }
    }
    if (!first) {
        rep.witness["ratio_min"] = to_fraction_string(rmin);
        rep.witness["ratio_max"] = to_fraction_string(rmax);
    }
    return rep;
}

VerifyReport verify_ave1(const Ave1Instance& inst, const SpaceSpec& spec,
                         const NormOptions& nopts) {
    VerifyReport rep;
    rep.lemma = "ris-average-upper";
    rep.pass = true;
    if (inst.ris.empty() || inst.ris.size() != inst.outer_coeffs.size() ||
        inst.ris.size() != inst.n_k.size())
        throw PreconditionFailed("instance arity mismatch");
    bool ris_ok = check_ris(inst.ris, inst.n_k, inst.ris_eps, spec);
    // empirical D over the constituents
    Enclosure D = Enclosure::exact(Rational(1));
    for (const auto& cert : inst.ris) {
        auto sp = check_special_average(cert, spec, Rational(1000000), nopts);
        D = enc_max(D, sp.empirical_D);
    }
    BlockVector x;
    for (std::size_t i = 0; i < inst.ris.size(); ++i)
        x = x.plus(inst.ris[i].combined().scaled(inst.outer_coeffs[i]));
    Enclosure nx = norm(x, spec, nopts);
    Enclosure theta = spec.theta_limit(64);
    Enclosure thetaM = spec.thetas.theta(inst.M, 64);
    Enclosure bound =
        (D * D / (theta * theta) + Enclosure::exact(Rational(5))) * thetaM;
    Json w;
    w["norm"] = enclosure_to_json(nx);
    w["bound"] = enclosure_to_json(bound);
    w["empirical_D"] = enclosure_to_json(D);
    w["ratio_to_thetaM"] = enclosure_to_json(nx / thetaM);
    w["hypothesis_ris"] = ris_ok;
    bool eps_ok = Enclosure::exact(inst.outer_eps).definitely_lt(thetaM);
    bool nk_ok = true;
    for (int n : inst.n_k)
        if (n < inst.M + 3) nk_ok = false;
    w["hypothesis_eps_below_thetaM"] = eps_ok;
    w["hypothesis_nk_large"] = nk_ok;
    rep.params = Json{{"M", inst.M}, {"ris_length", static_cast<int>(inst.ris.size())}};
    rep.fold(bound - nx, w);
    return rep;
}

}  // namespace tsl
