#include "tsl/averages.hpp"

#include <algorithm>

namespace tsl {

namespace {

BlockVector scaled_concat(const std::vector<const BlockVector*>& parts, const Rational& factor) {
    std::map<int, Rational> m;
    for (const BlockVector* p : parts)
        for (const auto& [k, v] : p->coeffs()) m.emplace_hint(m.end(), k, v * factor);
    return BlockVector(std::move(m));
}

long long next_pow2(long long n) {
    long long p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

BlockVector AverageCert::combined() const {
    std::map<int, Rational> m;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (const auto& [k, v] : blocks[i].coeffs()) m.emplace_hint(m.end(), k, v * coeffs[i]);
    return BlockVector(std::move(m));
}

FiniteSet AverageCert::index_set() const {
    std::vector<int> mins;
    for (const auto& b : blocks) mins.push_back(b.min_supp());
    return FiniteSet(std::move(mins));
}

AverageCheck check_average(const AverageCert& cert) {
    if (cert.blocks.empty()) throw MalformedDecomposition("no blocks");
    if (cert.blocks.size() != cert.coeffs.size())
        throw MalformedDecomposition("coefficient count mismatch");
    for (const auto& b : cert.blocks)
        if (b.zero()) throw MalformedDecomposition("zero block");
    for (std::size_t i = 0; i + 1 < cert.blocks.size(); ++i)
        if (!(cert.blocks[i].max_supp() < cert.blocks[i + 1].min_supp()))
            throw MalformedDecomposition("blocks not successive");

    AverageCheck r;
    Rational total(0);
    for (const auto& a : cert.coeffs) {
        if (a <= 0 || a > 1) {
            r.ok = false;
            r.violations.push_back("coefficient outside (0,1]");
        }
        total += a;
    }
    if (total != 1) {
        r.ok = false;
        r.violations.push_back("coefficients sum to " + to_fraction_string(total));
    }
    FiniteSet g = cert.index_set();
    r.index_rank = schreier_rank(g);
    if (!r.index_rank || *r.index_rank > cert.M) {
        r.ok = false;
        r.violations.push_back("index set " + g.to_string() + " not in S_" +
                               std::to_string(cert.M));
    }
    if (cert.M >= 1) {
        std::map<int, Rational> w;
        for (std::size_t i = 0; i < cert.blocks.size(); ++i)
            w[cert.blocks[i].min_supp()] = cert.coeffs[i];
        r.worst_lower_mass = max_schreier_sum(w, cert.M - 1);
        if (!(r.worst_lower_mass < cert.eps)) {
            r.ok = false;
            r.violations.push_back("S_" + std::to_string(cert.M - 1) + " mass " +
                                   to_fraction_string(r.worst_lower_mass) + " not below eps " +
                                   to_fraction_string(cert.eps));
        }
    } else {
        r.worst_lower_mass = Rational(0);  // vacuous at M = 0
    }
    return r;
}

AverageCert AveragingTree::node_cert(int level, int index) const {
    const Node& n = levels[level][index];
    AverageCert c;
    c.M = level;
    c.eps = level >= 1 ? n.eps : Rational(1, 2);
    for (int m = n.leaf_begin; m < n.leaf_end; ++m) {
        c.blocks.push_back(levels[0][m].vec);
        c.coeffs.push_back(levels[0][m].coeff / n.coeff);
    }
    return c;
}

BlockVector BasisSupply::next(long long floor) {
    if (floor > next_) next_ = floor;
    BlockVector v = BlockVector::basis(static_cast<int>(next_));
    ++next_;
    return v;
}

BlockVector VectorSupply::next(long long floor) {
    while (at_ < pool_.size() && pool_[at_].min_supp() < floor) ++at_;
    if (at_ == pool_.size())
        throw SupplyExhausted("no pooled vector with minsupp >= " + std::to_string(floor));
    return pool_[at_++];
}

FlatBlockSupply::FlatBlockSupply(long long start, int width, const SpaceSpec& spec)
    : next_(start), width_(width), spec_(spec) {
    if (width < 1) throw Error("block width must be >= 1");
}

BlockVector FlatBlockSupply::next(long long floor) {
    if (floor > next_) next_ = floor;
    std::map<int, Rational> m;
    for (int i = 0; i < width_; ++i) m[static_cast<int>(next_) + i] = Rational(1);
    BlockVector flat(std::move(m));
    Enclosure nv = norm(flat, spec_);
    if (!nv.is_exact()) throw Error("flat block supply needs exact-norm spec");
    next_ += width_;
    return flat.scaled(Rational(1) / nv.lo());
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(Supply& supply, int M, const Rational& eps, const BuildOptions& opts)
        : supply_(supply), M_(M), eps_(eps), opts_(opts) {
        if (M < 0) throw Error("average order must be >= 0");
        levels_.resize(M + 1);
    }

    AveragingTree run() {
        build(M_);
        AveragingTree t;
        t.levels = std::move(levels_);
        t.declared_eps = eps_;
        t.power_of_two = opts_.power_of_two;
        finish(t);
        return t;
    }

private:
    void build(int j) {
        if (j == 0) {
            BlockVector v = supply_.next(leaf_floor_);
            if (v.zero() || v.min_supp() < leaf_floor_)
                throw Error("supply returned vector below floor");
            if (static_cast<long long>(levels_[0].size()) + 1 > opts_.max_leaves)
                throw CapExceeded("averaging tree leaves over " +
                                  std::to_string(opts_.max_leaves));
            AveragingTree::Node n;
            n.vec = v;
            leaf_floor_ = v.max_supp() + 1;
            levels_[0].push_back(std::move(n));
            return;
        }
        std::size_t i = levels_[j].size() + 1;  // 1-based index at this level
        Rational e = (i == 1) ? first_eps(j)
                              : chain_eps(static_cast<int>(i) - 1,
                                          levels_[j][i - 2].vec.max_supp());
        Int lower = floor_rational(Rational(2) / e) + 1;  // N > 2/eps, strictly
        if (i >= 2) {
            Int after = Int(levels_[j][i - 2].vec.max_supp()) + 1;
            if (after > lower) lower = after;
        }
        long long weight = static_cast<long long>(lower);
        if (opts_.power_of_two) weight = next_pow2(weight);
        if (leaf_floor_ < weight) leaf_floor_ = weight;
        int cb = static_cast<int>(levels_[j - 1].size());
        for (long long c = 0; c < weight; ++c) build(j - 1);
        int ce = static_cast<int>(levels_[j - 1].size());
        AveragingTree::Node n;
        n.weight = weight;
        n.eps = e;
        n.child_begin = cb;
        n.child_end = ce;
        std::vector<const BlockVector*> parts;
        for (int c = cb; c < ce; ++c) parts.push_back(&levels_[j - 1][c].vec);
        n.vec = scaled_concat(parts, Rational(1, weight));
        levels_[j].push_back(std::move(n));
    }

    Rational first_eps(int j) const {
        Rational e = (j == M_) ? eps_ : Rational(3, 4);
        if (e >= 1) e = Rational(3, 4);
        if (opts_.restriction_theta) {
            Rational lemma = *opts_.restriction_theta * eps_ / 2;
            if (lemma < e) e = lemma;
        }
        if (e <= 0) throw Error("error schedule hit zero");
        return e;
    }

    Rational chain_eps(int i, long long prev_max) const {
        Int scale = (Int(1) << i) * prev_max;
        Rational strict = Rational(1, scale + 1);  // < 1/(2^i maxsupp)
        if (opts_.restriction_theta) {
            Rational lemma = *opts_.restriction_theta * eps_ / Rational(scale);
            if (lemma < strict) return lemma;
        }
        return strict;
    }

    void finish(AveragingTree& t) const {
        int M = t.height();
        t.levels[M][0].coeff = Rational(1);
        for (int j = M; j >= 1; --j)
            for (auto& n : t.levels[j]) {
                Rational child = n.coeff / n.weight;
                for (int c = n.child_begin; c < n.child_end; ++c)
                    t.levels[j - 1][c].coeff = child;
            }
        for (std::size_t m = 0; m < t.levels[0].size(); ++m) {
            t.levels[0][m].leaf_begin = static_cast<int>(m);
            t.levels[0][m].leaf_end = static_cast<int>(m) + 1;
        }
        for (int j = 1; j <= M; ++j)
            for (auto& n : t.levels[j]) {
                n.leaf_begin = t.levels[j - 1][n.child_begin].leaf_begin;
                n.leaf_end = t.levels[j - 1][n.child_end - 1].leaf_end;
            }
    }

    Supply& supply_;
    int M_;
    Rational eps_;
    BuildOptions opts_;
    std::vector<std::vector<AveragingTree::Node>> levels_;
    long long leaf_floor_ = 1;
};

}  // namespace

AveragingTree build_averaging_tree(Supply& supply, int M, const Rational& eps,
                                   const BuildOptions& opts) {
    if (eps <= 0) throw Error("eps must be positive");
    TreeBuilder b(supply, M, eps, opts);
    return b.run();
}

std::vector<std::string> check_averaging_tree(const AveragingTree& t,
                                              const std::optional<Rational>& restriction_theta) {
    std::vector<std::string> out;
    auto flag = [&](const std::string& s) { out.push_back(s); };
    int M = t.height();
    if (M < 0 || t.levels.empty() || t.levels[M].size() != 1) {
        flag("tree must have a single root level");
        return out;
    }
    for (int j = 0; j < M; ++j)
        if (t.levels[j].size() < t.levels[j + 1].size())
            flag("level sizes must not increase upward at level " + std::to_string(j));
    for (int j = 0; j <= M; ++j)
        for (std::size_t i = 0; i + 1 < t.levels[j].size(); ++i)
            if (!(t.levels[j][i].vec.max_supp() < t.levels[j][i + 1].vec.min_supp()))
                flag("level " + std::to_string(j) + " is not a block sequence at " +
                     std::to_string(i));
    // child intervals partition each lower level consecutively
    for (int j = 1; j <= M; ++j) {
        int expect = 0;
        for (std::size_t i = 0; i < t.levels[j].size(); ++i) {
            const auto& n = t.levels[j][i];
            if (n.child_begin != expect)
                flag("children of (" + std::to_string(j) + "," + std::to_string(i) +
                     ") do not continue the level");
            if (n.child_end <= n.child_begin)
                flag("node (" + std::to_string(j) + "," + std::to_string(i) + ") has no children");
            expect = n.child_end;
            long long count = n.child_end - n.child_begin;
            bool root_node = (j == M && i == 0);
            if (count != n.weight && !(root_node && t.root_child_count_exception))
                flag("child count != weight at (" + std::to_string(j) + "," + std::to_string(i) +
                     ")");
            // node equation x = (1/N) sum children
            std::vector<const BlockVector*> parts;
            for (int c = n.child_begin; c < n.child_end; ++c)
                parts.push_back(&t.levels[j - 1][c].vec);
            if (!(scaled_concat(parts, Rational(1, n.weight)) == n.vec))
                flag("node equation fails at (" + std::to_string(j) + "," + std::to_string(i) +
                     ")");
            // 2/eps < N <= minsupp
            if (!(n.eps > 0 && n.eps < 1))
                flag("eps outside (0,1) at (" + std::to_string(j) + "," + std::to_string(i) + ")");
            if (!(Rational(2) / n.eps < Rational(n.weight)))
                flag("2/eps < N fails at (" + std::to_string(j) + "," + std::to_string(i) + ")");
            if (!(Rational(n.weight) <= Rational(n.vec.min_supp())))
                flag("N <= minsupp fails at (" + std::to_string(j) + "," + std::to_string(i) +
                     ")");
            if (t.power_of_two && next_pow2(n.weight) != n.weight)
                flag("weight not a power of two at (" + std::to_string(j) + "," +
                     std::to_string(i) + ")");
        }
        if (expect != static_cast<int>(t.levels[j - 1].size()))
            flag("level " + std::to_string(j - 1) + " has orphan nodes");
    }
    // error chains along each level
    for (int j = 1; j <= M; ++j)
        for (std::size_t i = 0; i + 1 < t.levels[j].size(); ++i) {
            const auto& cur = t.levels[j][i];
            const auto& nxt = t.levels[j][i + 1];
            Int scale = (Int(1) << (i + 1)) * cur.vec.max_supp();
            if (!(nxt.eps < Rational(1) / Rational(scale)))
                flag("error chain fails at level " + std::to_string(j) + " index " +
                     std::to_string(i + 1));
            if (!(Rational(cur.vec.max_supp()) < Rational(nxt.weight)))
                flag("maxsupp < next weight fails at level " + std::to_string(j) + " index " +
                     std::to_string(i + 1));
        }
    if (restriction_theta) {
        Rational bound1 = *restriction_theta * t.declared_eps / 2;
        for (int j = 1; j <= M; ++j) {
            if (!t.levels[j].empty() && !(t.levels[j][0].eps <= bound1))
                flag("strengthened first error fails at level " + std::to_string(j));
            for (std::size_t i = 0; i + 1 < t.levels[j].size(); ++i) {
                Int scale = (Int(1) << (i + 1)) * t.levels[j][i].vec.max_supp();
                Rational bound = *restriction_theta * t.declared_eps / Rational(scale);
                if (!(t.levels[j][i + 1].eps <= bound))
                    flag("strengthened error chain fails at level " + std::to_string(j) +
                         " index " + std::to_string(i + 1));
            }
        }
    }
    // coefficient identities: per-level sums, ancestor products, leaf sums.
    // Restriction outputs carry total original mass L/W on every level below
    // the root, whose own coefficient stays 1.
    Rational mass(0);
    for (const auto& n : t.levels[0]) mass += n.coeff;
    if (!t.root_child_count_exception && mass != 1)
        flag("leaf coefficients sum to " + to_fraction_string(mass));
    if (t.levels[M][0].coeff != 1) flag("root coefficient must be 1");
    for (int j = 1; j < M; ++j) {
        Rational sum(0);
        for (const auto& n : t.levels[j]) sum += n.coeff;
        if (sum != mass)
            flag("coefficients at level " + std::to_string(j) + " sum to " +
                 to_fraction_string(sum) + ", expected " + to_fraction_string(mass));
    }
    for (int j = 1; j <= M; ++j)
        for (std::size_t i = 0; i < t.levels[j].size(); ++i) {
            const auto& n = t.levels[j][i];
            for (int c = n.child_begin; c < n.child_end; ++c)
                if (t.levels[j - 1][c].coeff * n.weight != n.coeff)
                    flag("child coefficient != parent/weight at (" + std::to_string(j) + "," +
                         std::to_string(i) + ")");
            bool exempt = (j == M && t.root_child_count_exception);
            Rational leafsum(0);
            for (int m = n.leaf_begin; m < n.leaf_end; ++m) leafsum += t.levels[0][m].coeff;
            if (!exempt && leafsum != n.coeff)
                flag("leaf coefficient sum mismatch at (" + std::to_string(j) + "," +
                     std::to_string(i) + ")");
        }
    // every node is a (j, eps)-average of its leaves; the exception root is a
    // restriction of one, so its membership and mass conditions still hold
    // while its coefficients sum below 1.
    for (int j = 1; j <= M; ++j)
        for (std::size_t i = 0; i < t.levels[j].size(); ++i) {
            bool exempt = (j == M && t.root_child_count_exception);
            try {
                AverageCheck c = check_average(t.node_cert(j, static_cast<int>(i)));
                if (!c.ok)
                    for (const auto& v : c.violations) {
                        if (exempt && v.rfind("coefficients sum to", 0) == 0) continue;
                        flag("node (" + std::to_string(j) + "," + std::to_string(i) +
                             ") average: " + v);
                    }
            } catch (const Error& e) {
                flag("node (" + std::to_string(j) + "," + std::to_string(i) + "): " + e.what());
            }
        }
    return out;
}

namespace {

struct PendingNode {
    std::vector<int> covered;  // original node indices at the node's level
    Rational coeff;
    long long weight = 0;
    Rational eps;
    int child_begin = -1, child_end = -1;
};

}  // namespace

AveragingTree restrict_average(const AveragingTree& t, int level, const std::vector<int>& I) {
    int H = t.height();
    if (level < 1 || level > H) throw PreconditionFailed("selection level out of range");
    if (!t.power_of_two) throw PreconditionFailed("source weights must be powers of two");
    if (I.empty()) throw PreconditionFailed("empty selection");
    for (std::size_t i = 0; i < I.size(); ++i) {
        if (I[i] < 1 || I[i] > static_cast<int>(t.levels[level].size()))
            throw PreconditionFailed("selection index out of range");
        if (i > 0 && I[i - 1] >= I[i]) throw PreconditionFailed("selection must be increasing");
    }
    for (const auto& leaf : t.levels[0])
        if (!is_dyadic(leaf.coeff)) throw NonDyadicCoefficient("leaf coefficient " +
                                                               to_fraction_string(leaf.coeff));

    const auto& sel_level = t.levels[level];
    Rational mass(0);
    for (int i : I) mass += sel_level[i - 1].coeff;
    long long W1 = sel_level[I.front() - 1].weight;
    Rational L_r = mass * W1;
    if (denominator(L_r) != 1)
        throw PreconditionFailed("selected mass times first weight is not an integer: " +
                                 to_fraction_string(L_r));
    long long L = static_cast<long long>(numerator(L_r).convert_to<long long>());
    if (L < 1) throw PreconditionFailed("selection carries no mass");

    int M = level;
    std::vector<std::vector<PendingNode>> ylv(M + 1);
    {
        PendingNode root;
        for (int i : I) root.covered.push_back(i - 1);
        root.coeff = mass;  // original-leaf mass; the emitted root coefficient is 1
        root.weight = W1;
        root.eps = sel_level[I.front() - 1].eps;
        ylv[M].push_back(std::move(root));
    }
    // Node coefficients below the root equal their original-leaf mass; the
    // root splits into L pieces of mass 1/W each, every other node into
    // weight-many pieces of mass coeff/weight.
    for (int l = M; l >= 1; --l) {
        std::vector<PendingNode> next;
        for (std::size_t k = 0; k < ylv[l].size(); ++k) {
            PendingNode& node = ylv[l][k];
            bool is_root = (l == M && k == 0);
            long long pieces = is_root ? L : node.weight;
            Rational target = node.coeff / pieces;  // equal dyadic mass per piece
            // splitting units: original nodes one level down
            std::vector<int> units;
            for (int c : node.covered) {
                const auto& orig = t.levels[l][c];
                for (int u = orig.child_begin; u < orig.child_end; ++u) units.push_back(u);
            }
            node.child_begin = static_cast<int>(next.size());
            Rational acc(0);
            std::vector<int> piece;
            for (int u : units) {
                const Rational& um = t.levels[l - 1][u].coeff;
                piece.push_back(u);
                acc += um;
                if (acc == target) {
                    PendingNode child;
                    child.covered = std::move(piece);
                    child.coeff = target;
                    piece.clear();
                    acc = 0;
                    next.push_back(std::move(child));
                } else if (acc > target) {
                    throw NonDyadicCoefficient("mass split failed at level " +
                                               std::to_string(l - 1));
                }
            }
            if (!piece.empty() || static_cast<long long>(next.size()) - node.child_begin != pieces)
                throw NonDyadicCoefficient("piece count mismatch at level " + std::to_string(l));
            node.child_end = static_cast<int>(next.size());
        }
        // weights and errors for the new level (l-1 >= 1; leaves carry none)
        if (l - 1 >= 1) {
            for (std::size_t k = 0; k < next.size(); ++k) {
                PendingNode& n = next[k];
                long long w = 0;
                for (int u : n.covered) {
                    long long uw = t.levels[l - 1][u].weight;
                    if (w == 0 || uw < w) w = uw;
                }
                n.weight = w;
                if (k == 0)
                    n.eps = ylv[M][0].eps;  // eps_I on every level's first node
                else {
                    int prev_last = next[k - 1].covered.back();
                    n.eps = t.levels[l - 1][prev_last + 1].eps;
                }
            }
        }
        ylv[l - 1] = std::move(next);
    }

    AveragingTree out;
    out.levels.resize(M + 1);
    out.declared_eps = ylv[M][0].eps;
    out.power_of_two = true;
    out.root_child_count_exception = (L != W1);
    for (int l = 0; l <= M; ++l) {
        for (const auto& p : ylv[l]) {
            AveragingTree::Node n;
            n.weight = p.weight;
            n.eps = p.eps;
            n.coeff = (l == M) ? Rational(1) : p.coeff;
            n.child_begin = p.child_begin;
            n.child_end = p.child_end;
            std::vector<const BlockVector*> parts;
            if (l == 0) {
                // bundle vector: (1/coeff) sum of covered original leaves
                std::map<int, Rational> m;
                for (int u : p.covered)
                    for (const auto& [kk, vv] : t.levels[0][u].vec.coeffs())
                        m.emplace_hint(m.end(), kk,
                                       vv * t.levels[0][u].coeff / p.coeff);
                n.vec = BlockVector(std::move(m));
            }
            out.levels[l].push_back(std::move(n));
        }
    }
    // vectors upward from bundles: x = (1/N) sum children
    for (int l = 1; l <= M; ++l)
        for (auto& n : out.levels[l]) {
            std::vector<const BlockVector*> parts;
            for (int c = n.child_begin; c < n.child_end; ++c)
                parts.push_back(&out.levels[l - 1][c].vec);
            n.vec = scaled_concat(parts, Rational(1, n.weight));
        }
    for (std::size_t m = 0; m < out.levels[0].size(); ++m) {
        out.levels[0][m].leaf_begin = static_cast<int>(m);
        out.levels[0][m].leaf_end = static_cast<int>(m) + 1;
    }
    for (int l = 1; l <= M; ++l)
        for (auto& n : out.levels[l]) {
            n.leaf_begin = out.levels[l - 1][n.child_begin].leaf_begin;
            n.leaf_end = out.levels[l - 1][n.child_end - 1].leaf_end;
        }
    return out;
}

namespace {

// Original-leaf positions covered by each node of the restricted tree,
// derived from supports alone so the check stays independent of the
// construction bookkeeping.
std::vector<std::vector<std::pair<int, int>>> derive_covered_ranges(
    const AveragingTree& source, const AveragingTree& restricted) {
    // per restricted level-0 bundle: interval(s) of source leaf positions
    std::vector<std::vector<std::pair<int, int>>> covered(restricted.levels.size());
    const auto& src_leaves = source.levels[0];
    std::vector<std::pair<int, int>> bundle_ranges;  // contiguous in source order
    std::size_t sp = 0;
    for (const auto& bundle : restricted.levels[0]) {
        int lo = bundle.vec.min_supp(), hi = bundle.vec.max_supp();
        while (sp < src_leaves.size() && src_leaves[sp].vec.max_supp() < lo) ++sp;
        int begin = static_cast<int>(sp);
        while (sp < src_leaves.size() && src_leaves[sp].vec.max_supp() <= hi) ++sp;
        bundle_ranges.emplace_back(begin, static_cast<int>(sp));
    }
    covered[0] = bundle_ranges;
    return covered;
}

bool range_subset_of_set(int b, int e, const std::vector<std::pair<int, int>>& set_ranges) {
    // is [b,e) contained in the union of set_ranges (sorted, disjoint)?
    for (const auto& [rb, re] : set_ranges) {
        if (b >= rb && e <= re) return true;
        if (b < re && e > rb) return false;  // partial overlap with one range piece
    }
    return false;
}

bool range_disjoint_set(int b, int e, const std::vector<std::pair<int, int>>& set_ranges) {
    for (const auto& [rb, re] : set_ranges)
        if (b < re && e > rb) return false;
    return true;
}

bool set_subset_of_range(const std::vector<std::pair<int, int>>& set_ranges, int b, int e) {
    for (const auto& [rb, re] : set_ranges)
        if (rb < b || re > e) return false;
    return true;
}

}  // namespace

std::vector<std::string> check_restriction_properties(const AveragingTree& source, int level,
                                                      const std::vector<int>& I,
                                                      const AveragingTree& restricted,
                                                      const SpaceSpec& spec) {
    std::vector<std::string> out;
    auto flag = [&](const std::string& s) { out.push_back(s); };
    int M = restricted.height();
    if (M != level) flag("restricted tree height != selection level");

    // Def-2.2 structure of the output (with the root child-count exception)
    for (auto& v : check_averaging_tree(restricted)) flag("output tree: " + v);

    // leaf-position ranges of restricted nodes relative to the source
    auto covered0 = derive_covered_ranges(source, restricted)[0];
    // per restricted node (level, idx): union of source-leaf ranges
    std::vector<std::vector<std::vector<std::pair<int, int>>>> cov(restricted.levels.size());
    cov[0].resize(restricted.levels[0].size());
    for (std::size_t i = 0; i < covered0.size(); ++i) cov[0][i] = {covered0[i]};
    for (int l = 1; l <= M; ++l) {
        cov[l].resize(restricted.levels[l].size());
        for (std::size_t k = 0; k < restricted.levels[l].size(); ++k) {
            const auto& n = restricted.levels[l][k];
            std::vector<std::pair<int, int>> merged;
            for (int c = n.child_begin; c < n.child_end; ++c)
                for (const auto& r : cov[l - 1][c]) {
                    if (!merged.empty() && merged.back().second == r.first)
                        merged.back().second = r.second;
                    else
                        merged.push_back(r);
                }
            cov[l][k] = merged;
        }
    }

    // (P0): c_k^l y_k^l = sum of covered source leaves, c_k^l = their mass
    // (at the root the coefficient is 1 and the mass is the selected mass)
    Rational total_mass(0);
    for (int i : I) total_mass += source.levels[level][i - 1].coeff;
    for (int l = 0; l <= M; ++l)
        for (std::size_t k = 0; k < restricted.levels[l].size(); ++k) {
            const auto& n = restricted.levels[l][k];
            std::map<int, Rational> expected;
            Rational mass(0);
            for (const auto& [b, e] : cov[l][k])
                for (int m = b; m < e; ++m) {
                    mass += source.levels[0][m].coeff;
                    for (const auto& [kk, vv] : source.levels[0][m].vec.coeffs())
                        expected.emplace_hint(expected.end(), kk,
                                              vv * source.levels[0][m].coeff);
                }
            Rational mass_expect = (l == M) ? total_mass : n.coeff;
            if (mass != mass_expect)
                flag("(P0) mass mismatch at (" + std::to_string(l) + "," + std::to_string(k) +
                     ")");
            BlockVector scaled = n.vec.scaled(n.coeff);
            if (!(BlockVector(std::move(expected)) == scaled))
                flag("(P0) vector mismatch at (" + std::to_string(l) + "," + std::to_string(k) +
                     ")");
        }

    // source node leaf ranges are intervals [leaf_begin, leaf_end)
    // (P1): same-level source nodes are inside or incomparable
    for (int l = 0; l <= M; ++l)
        for (std::size_t k = 0; k < restricted.levels[l].size(); ++k)
            for (const auto& sn : source.levels[l]) {
                bool in = range_subset_of_set(sn.leaf_begin, sn.leaf_end, cov[l][k]);
                bool dis = range_disjoint_set(sn.leaf_begin, sn.leaf_end, cov[l][k]);
                if (!in && !dis)
                    flag("(P1) fails at level " + std::to_string(l) + ", output node " +
                         std::to_string(k));
            }
    // (P2): any source node vs any output node: nested either way or disjoint
    for (int j = 0; j <= source.height(); ++j)
        for (const auto& sn : source.levels[j])
            for (int l = 0; l <= M; ++l)
                for (std::size_t k = 0; k < restricted.levels[l].size(); ++k) {
                    bool a = range_subset_of_set(sn.leaf_begin, sn.leaf_end, cov[l][k]);
                    bool b = set_subset_of_range(cov[l][k], sn.leaf_begin, sn.leaf_end);
                    bool d = range_disjoint_set(sn.leaf_begin, sn.leaf_end, cov[l][k]);
                    if (!a && !b && !d) {
                        flag("(P2) fails: source level " + std::to_string(j) +
                             " vs output (" + std::to_string(l) + "," + std::to_string(k) + ")");
                        break;
                    }
                }
    // (P3): output weight = min source weight among covered same-level nodes
    for (int l = 1; l <= M; ++l)
        for (std::size_t k = 0; k < restricted.levels[l].size(); ++k) {
            long long w = 0;
            for (const auto& sn : source.levels[l])
                if (range_subset_of_set(sn.leaf_begin, sn.leaf_end, cov[l][k]))
                    if (w == 0 || sn.weight < w) w = sn.weight;
            if (w != restricted.levels[l][k].weight)
                flag("(P3) weight formula fails at (" + std::to_string(l) + "," +
                     std::to_string(k) + ")");
        }

    // norm(y_k^0) <= 1: exact when small, leaf-triangle certificate otherwise
    NormOptions nopts;
    for (std::size_t k = 0; k < restricted.levels[0].size(); ++k) {
        const auto& bundle = restricted.levels[0][k].vec;
        int cap = spec.modified ? nopts.cap_modified : nopts.cap_non_modified;
        if (static_cast<int>(bundle.coeffs().size()) <= cap) {
            Enclosure nv = norm(bundle, spec, nopts);
            if (!(nv.lo() <= 1 && nv.hi() <= Rational(1) + Rational(1, Int(1) << 20)))
                flag("bundle " + std::to_string(k) + " norm " + nv.to_string() + " above 1");
        } else {
            // norm(y) <= sum (a_m / c) * norm(x_m) = 1 when leaves are normalized
            for (const auto& [b, e] : cov[0][k])
                for (int m = b; m < e; ++m) {
                    const auto& leaf = source.levels[0][m].vec;
                    if (static_cast<int>(leaf.coeffs().size()) <= cap) {
                        Enclosure lv = norm(leaf, spec, nopts);
                        if (lv.lo() > 1)
                            flag("source leaf " + std::to_string(m) + " not normalized");
                    }
                }
        }
    }
    return out;
}

NormingTree antichain_functional(const AveragingTree& t,
                                 const std::vector<std::pair<int, int>>& F) {
    if (F.empty()) throw Error("empty antichain");
    for (const auto& [l, k] : F) {
        if (l < 0 || l > t.height() || k < 0 || k >= static_cast<int>(t.levels[l].size()))
            throw Error("antichain node out of range");
    }
    for (std::size_t a = 0; a < F.size(); ++a)
        for (std::size_t b = 0; b < F.size(); ++b) {
            if (a == b) continue;
            const auto& na = t.levels[F[a].first][F[a].second];
            const auto& nb = t.levels[F[b].first][F[b].second];
            if (na.leaf_begin <= nb.leaf_begin && nb.leaf_end <= na.leaf_end &&
                !(na.leaf_begin == nb.leaf_begin && na.leaf_end == nb.leaf_end))
                throw Error("antichain contains comparable nodes");
            if (na.leaf_begin == nb.leaf_begin && na.leaf_end == nb.leaf_end && a < b &&
                F[a].first != F[b].first)
                throw Error("antichain contains comparable nodes");
        }
    std::function<std::optional<NormNode>(int, int)> rec =
        [&](int l, int k) -> std::optional<NormNode> {
        for (const auto& [fl, fk] : F)
            if (fl == l && fk == k)
                return NormNode::leaf(t.levels[l][k].vec.min_supp(), 1);
        if (l == 0) return std::nullopt;
        const auto& n = t.levels[l][k];
        std::vector<NormNode> kids;
        for (int c = n.child_begin; c < n.child_end; ++c)
            if (auto sub = rec(l - 1, c)) kids.push_back(std::move(*sub));
        if (kids.empty()) return std::nullopt;
        return NormNode::internal(1, std::move(kids));
    };
    auto root = rec(t.height(), 0);
    if (!root) throw Error("antichain misses the tree");
    return NormingTree{std::move(*root)};
}

SpecialAverageReport check_special_average(const AverageCert& cert, const SpaceSpec& spec,
                                           const Rational& D, const NormOptions& nopts) {
    SpecialAverageReport rep;
    BlockVector x = cert.combined();
    FiniteSet supp = x.support();
    int s = static_cast<int>(supp.size());
    int cap = nopts.cap_modified;
    if (s > cap) throw CapExceeded("special average support " + std::to_string(s));
    const auto& sup = supp.elements();

    std::map<unsigned, Enclosure> norm_memo;
    std::function<Enclosure(unsigned)> block_norm = [&](unsigned mask) {
        auto it = norm_memo.find(mask);
        if (it != norm_memo.end()) return it->second;
        std::vector<int> pts;
        for (int p = 0; p < s; ++p)
            if (mask & (1u << p)) pts.push_back(sup[p]);
        Enclosure e = norm(x.restricted(FiniteSet(pts)), spec, nopts);
        norm_memo.emplace(mask, e);
        return e;
    };

    Enclosure theta = spec.theta_limit(nopts.prec_bits);
    Enclosure empirical = Enclosure::exact(Rational(1));
    rep.all_within = true;
    for (int j = 0; j <= cert.M; ++j) {
        // sup over families of pairwise disjoint sets with minima in S_j
        // (any number of blocks, k = 1 included) of the sum of block norms
        std::map<unsigned, Enclosure> memo;
        std::function<Enclosure(unsigned)> best = [&](unsigned mask) -> Enclosure {
            auto it = memo.find(mask);
            if (it != memo.end()) return it->second;
            Enclosure b = Enclosure::exact(Rational(0));
            if (mask) {
                for (int p = 0; p < s; ++p)
                    if (mask & (1u << p)) {
                        unsigned sub = mask & ~(1u << p);
                        if (sub) b = enc_max(b, best(sub));
                    }
                b = enc_max(b, block_norm(mask));  // single block
                std::vector<unsigned> blocks;
                std::function<void(unsigned, std::vector<unsigned>&)> scan =
                    [&](unsigned rem, std::vector<unsigned>& acc) {
                        if (rem == 0) {
                            if (acc.size() >= 2) {
                                std::vector<int> minima;
                                for (unsigned bm : acc)
                                    minima.push_back(sup[__builtin_ctz(bm)]);
                                if (member(FiniteSet::from_unsorted(minima),
                                           FamilySpec::S(j))) {
                                    Enclosure sum = Enclosure::exact(Rational(0));
                                    for (unsigned bm : acc) sum = sum + block_norm(bm);
                                    b = enc_max(b, sum);
                                }
                            }
                            return;
                        }
                        unsigned low = rem & (~rem + 1u);
                        unsigned rest = rem & ~low;
                        unsigned sub = rest;
                        while (true) {
                            acc.push_back(low | sub);
                            scan(rem & ~(low | sub), acc);
                            acc.pop_back();
                            if (sub == 0) break;
                            sub = (sub - 1) & rest;
                        }
                    };
                scan(mask, blocks);
            }
            memo.emplace(mask, b);
            return b;
        };
        SpecialAverageRow row;
        row.j = j;
        row.split_sup = best((1u << s) - 1);
        Enclosure tp = theta.pow_int(static_cast<unsigned>(cert.M - j));
        row.lower_bound = tp / Enclosure::exact(D);
        row.upper_bound = tp * Enclosure::exact(D);
        row.within = row.split_sup.lo() >= row.lower_bound.hi() &&
                     row.split_sup.hi() <= row.upper_bound.lo();
        rep.all_within = rep.all_within && row.within;
        if (row.split_sup.lo() > 0) {
            empirical = enc_max(empirical, row.split_sup / tp);
            empirical = enc_max(empirical, tp / row.split_sup);
        }
        rep.rows.push_back(std::move(row));
    }
    rep.empirical_D = empirical;
    return rep;
}

TsirelsonAverageResult check_tsirelson_average(const std::vector<BlockVector>& blocks,
                                               const SpaceSpec& spec, int M,
                                               const std::vector<FiniteSet>& G_samples,
                                               const std::vector<std::vector<Rational>>&
                                                   coeff_samples,
                                               const NormOptions& nopts) {
    TsirelsonAverageResult res;
    Enclosure theta_enc = spec.theta_limit(nopts.prec_bits);
    if (!theta_enc.is_exact())
        throw Error("tsirelson average check needs an exact theta limit");
    Rational theta = theta_enc.lo();
    std::map<int, std::size_t> by_min;
    for (std::size_t i = 0; i < blocks.size(); ++i) by_min[blocks[i].min_supp()] = i;
    bool first = true;
    for (const auto& G : G_samples) {
        if (!member(G, FamilySpec::S(M))) throw PreconditionFailed("sample set not in S_M");
        for (const auto& coeffs : coeff_samples) {
            if (coeffs.size() < G.size()) continue;
            BlockVector lhs_vec, collapsed;
            std::size_t idx = 0;
            bool usable = true;
            for (int g : G.elements()) {
                auto it = by_min.find(g);
                if (it == by_min.end()) {
                    usable = false;
                    break;
                }
                const BlockVector& b = blocks[it->second];
                Enclosure bn = norm(b, spec, nopts);
                if (!bn.is_exact()) {
                    usable = false;
                    break;
                }
                Rational a = coeffs[idx++];
                lhs_vec = lhs_vec.plus(b.scaled(a));
                collapsed = collapsed.plus(
                    BlockVector::basis(g).scaled(Rational(a < 0 ? -a : a) * bn.lo()));
            }
            if (!usable) continue;
            Enclosure lhs = norm(lhs_vec, spec, nopts);
            Rational rhs = tsirelson_norm(collapsed, theta) / 4;
            if (rhs == 0) continue;
            Enclosure ratio = lhs / Enclosure::exact(rhs);
            if (first || ratio.lo() < res.worst_ratio.lo()) {
                res.worst_ratio = ratio;
                res.witness = "G=" + G.to_string();
                first = false;
            }
            if (!(lhs.lo() >= rhs)) {
                res.ok = false;
                res.witness = "G=" + G.to_string() + " lhs=" + lhs.to_string() +
                              " rhs=" + to_fraction_string(rhs);
            }
        }
    }
    if (first) res.worst_ratio = Enclosure::exact(Rational(1));
    return res;
}

bool check_ris(const std::vector<AverageCert>& seq, const std::vector<int>& n_k,
               const Rational& eps, const SpaceSpec& spec) {
    if (seq.size() != n_k.size()) throw Error("RIS: length mismatch");
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const BlockVector a = seq[i].combined();
        const BlockVector b = seq[i + 1].combined();
        if (!(a.max_supp() < b.min_supp())) throw MalformedDecomposition("RIS not successive");
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        int l_next = n_k[i + 1] / 4;  // largest l with 4l <= n
        if (l_next < 1) throw Error("RIS needs n_k >= 4");
        Enclosure theta = spec.thetas.theta(l_next, 64);
        Rational bound = eps / Rational(Int(1) << (i + 2));  // eps / 2^(k+1), k = i+1
        if (!(theta.hi() * seq[i].combined().l1() <= bound)) return false;
    }
    return true;
}

}  // namespace tsl
