#include "tsl/norm_engine.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "tsl/schreier.hpp"

namespace tsl {

namespace {

Rational round_down(const Rational& r, int prec_bits) {
    return Rational(floor_rational(r * pow2(prec_bits))) / pow2(prec_bits);
}
Rational round_up(const Rational& r, int prec_bits) {
    return Rational(ceil_rational(r * pow2(prec_bits))) / pow2(prec_bits);
}

struct Candidate {
    Enclosure value;
    bool is_leaf = false;
    int leaf_pos = 0;          // position in support order
    int block_count = 0;
    std::vector<int> minima;   // support values
    NormNode node;             // populated during extraction
};

// Strict preference order: larger value, then coordinate functionals, then
// fewer blocks, then lexicographically smaller minima.
bool better(const Candidate& a, const Candidate& b) {
    if (a.value.hi() != b.value.hi()) return a.value.hi() > b.value.hi();
    if (a.value.lo() != b.value.lo()) return a.value.lo() > b.value.lo();
    if (a.is_leaf != b.is_leaf) return a.is_leaf;
    if (a.is_leaf) return a.leaf_pos < b.leaf_pos;
    if (a.block_count != b.block_count) return a.block_count < b.block_count;
    return a.minima < b.minima;
}

class Engine {
public:
    Engine(const BlockVector& x, const SpaceSpec& spec, const NormOptions& opts, int prec_bits)
        : spec_(spec), opts_(opts), prec_(prec_bits) {
        for (const auto& [k, v] : x.coeffs()) {
            sup_.push_back(k);
            coeff_.push_back(v);
            ac_.push_back(v < 0 ? Rational(-v) : v);
        }
        n_ = static_cast<int>(sup_.size());
        int cap = spec_.modified ? opts_.cap_modified : opts_.cap_non_modified;
        if (n_ > cap)
            throw CapExceeded("support " + std::to_string(n_) + " over norm cap " +
                              std::to_string(cap));
        int n_max = n_ + 4;
        if (auto mx = spec_.thetas.max_index()) n_max = std::min(n_max, *mx);
        theta_ = theta_table(spec_, n_max, prec_, opts_.force_interval);
    }

    Enclosure value() {
        if (n_ == 0) return Enclosure::exact(Rational(0));
        return spec_.modified ? mask_value((1u << n_) - 1) : seg_value(0, n_);
    }

    Candidate extract() {
        if (spec_.modified) return mask_extract((1u << n_) - 1);
        return seg_extract(0, n_);
    }

    bool ambiguous() const { return ambiguous_; }

private:
    std::optional<Enclosure> theta_for_rank(std::optional<int> rank) {
        if (!rank) return std::nullopt;
        auto idx = spec_.least_index_for(*rank);
        if (!idx || *idx > static_cast<int>(theta_.size())) return std::nullopt;
        return theta_[*idx - 1];
    }

    std::optional<int> weight_index_for_rank(std::optional<int> rank) {
        if (!rank) return std::nullopt;
        auto idx = spec_.least_index_for(*rank);
        if (!idx || *idx > static_cast<int>(theta_.size())) return std::nullopt;
        return idx;
    }

    // Least family rank accepting the given minima set / block count.
    std::optional<int> rank_of(const std::vector<int>& minima) {
        if (spec_.family == SpaceSpec::FamilyKind::A)
            return static_cast<int>(minima.size());
        auto it = rank_memo_.find(minima);
        if (it != rank_memo_.end()) return it->second;
        FiniteSet m(minima);
        std::optional<int> r =
            spec_.compose_inner_A2 ? compose_a2_rank(m) : schreier_rank(m);
        if (r && *r == 0) r = 1;  // weight indices start at 1
        rank_memo_.emplace(minima, r);
        return r;
    }

    // ---- non-modified: segments of the support ----

    Enclosure seg_value(int i, int j) {
        std::uint64_t key = (static_cast<std::uint64_t>(i) << 8) | static_cast<std::uint64_t>(j);
        auto it = seg_memo_.find(key);
        if (it != seg_memo_.end()) return it->second;
        Enclosure best = Enclosure::exact(Rational(0));
        for (int p = i; p < j; ++p) best = enc_max(best, Enclosure::exact(ac_[p]));
        int w = j - i;
        for (unsigned mask = 0; mask < (1u << w); ++mask) {
            if (__builtin_popcount(mask) < 2) continue;
            auto th = split_theta(i, mask, w);
            if (!th) continue;
            Enclosure sum = Enclosure::exact(Rational(0));
            int prev = -1;
            for (int b = 0; b < w; ++b) {
                if (!(mask & (1u << b))) continue;
                if (prev >= 0) sum = sum + seg_value(i + prev, i + b);
                prev = b;
            }
            sum = sum + seg_value(i + prev, j);
            best = enc_max(best, *th * sum);
        }
        seg_memo_.emplace(key, best);
        return best;
    }

    std::optional<Enclosure> split_theta(int i, unsigned mask, int w) {
        std::vector<int> minima;
        for (int b = 0; b < w; ++b)
            if (mask & (1u << b)) minima.push_back(sup_[i + b]);
        return theta_for_rank(rank_of(minima));
    }

    Candidate seg_extract(int i, int j) {
        std::uint64_t key = (static_cast<std::uint64_t>(i) << 8) | static_cast<std::uint64_t>(j);
        auto it = seg_extract_memo_.find(key);
        if (it != seg_extract_memo_.end()) return it->second;
        std::vector<Candidate> cands;
        for (int p = i; p < j; ++p) {
            Candidate c;
            c.value = Enclosure::exact(ac_[p]);
            c.is_leaf = true;
            c.leaf_pos = p;
            c.node = NormNode::leaf(sup_[p], coeff_[p] < 0 ? -1 : 1);
            cands.push_back(std::move(c));
        }
        int w = j - i;
        for (unsigned mask = 0; mask < (1u << w); ++mask) {
            if (__builtin_popcount(mask) < 2) continue;
            std::vector<int> minima;
            for (int b = 0; b < w; ++b)
                if (mask & (1u << b)) minima.push_back(sup_[i + b]);
            auto widx = weight_index_for_rank(rank_of(minima));
            if (!widx) continue;
            Enclosure th = theta_[*widx - 1];
            Candidate c;
            c.block_count = static_cast<int>(minima.size());
            c.minima = minima;
            Enclosure sum = Enclosure::exact(Rational(0));
            std::vector<NormNode> children;
            int prev = -1;
            auto flush = [&](int from, int to) {
                Candidate sub = seg_extract(from, to);
                sum = sum + sub.value;
                children.push_back(sub.node);
            };
            for (int b = 0; b < w; ++b) {
                if (!(mask & (1u << b))) continue;
                if (prev >= 0) flush(i + prev, i + b);
                prev = b;
            }
            flush(i + prev, j);
            c.value = th * sum;
            c.node = NormNode::internal(*widx, std::move(children));
            cands.push_back(std::move(c));
        }
        Candidate best = pick(cands);
        seg_extract_memo_.emplace(key, best);
        return best;
    }

    // ---- modified: arbitrary subsets ----

    Enclosure mask_value(unsigned mask) {
        auto it = mask_memo_.find(mask);
        if (it != mask_memo_.end()) return it->second;
        Enclosure best = Enclosure::exact(Rational(0));
        for (int p = 0; p < n_; ++p)
            if (mask & (1u << p)) best = enc_max(best, Enclosure::exact(ac_[p]));
        // values of proper subsets (functionals need not touch every point)
        for (int p = 0; p < n_; ++p)
            if (mask & (1u << p)) {
                unsigned sub = mask & ~(1u << p);
                if (sub) best = enc_max(best, mask_value(sub));
            }
        // full partitions of this subset
        std::vector<unsigned> blocks;
        partition_scan(mask, blocks, [&](const std::vector<unsigned>& bl) {
            std::vector<int> minima;
            for (unsigned b : bl) minima.push_back(sup_[__builtin_ctz(b)]);
            auto th = theta_for_rank(rank_of(minima));
            if (!th) return;
            Enclosure sum = Enclosure::exact(Rational(0));
            for (unsigned b : bl) sum = sum + mask_value(b);
            best = enc_max(best, *th * sum);
        });
        mask_memo_.emplace(mask, best);
        return best;
    }

    Candidate mask_extract(unsigned mask) {
        auto it = mask_extract_memo_.find(mask);
        if (it != mask_extract_memo_.end()) return it->second;
        std::vector<Candidate> cands;
        for (int p = 0; p < n_; ++p) {
            if (!(mask & (1u << p))) continue;
            Candidate c;
            c.value = Enclosure::exact(ac_[p]);
            c.is_leaf = true;
            c.leaf_pos = p;
            c.node = NormNode::leaf(sup_[p], coeff_[p] < 0 ? -1 : 1);
            cands.push_back(std::move(c));
        }
        for (int p = 0; p < n_; ++p)
            if (mask & (1u << p)) {
                unsigned sub = mask & ~(1u << p);
                if (sub) cands.push_back(mask_extract(sub));
            }
        std::vector<unsigned> blocks;
        partition_scan(mask, blocks, [&](const std::vector<unsigned>& bl) {
            std::vector<int> minima;
            for (unsigned b : bl) minima.push_back(sup_[__builtin_ctz(b)]);
            auto widx = weight_index_for_rank(rank_of(minima));
            if (!widx) return;
            Candidate c;
            c.block_count = static_cast<int>(bl.size());
            c.minima = minima;
            Enclosure sum = Enclosure::exact(Rational(0));
            std::vector<NormNode> children;
            for (unsigned b : bl) {
                Candidate sub = mask_extract(b);
                sum = sum + sub.value;
                children.push_back(sub.node);
            }
            c.value = theta_[*widx - 1] * sum;
            c.node = NormNode::internal(*widx, std::move(children));
            cands.push_back(std::move(c));
        });
        Candidate best = pick(cands);
        mask_extract_memo_.emplace(mask, best);
        return best;
    }

    // Enumerates set partitions of mask into >= 2 blocks, blocks ordered by
    // their least elements.
    void partition_scan(unsigned mask, std::vector<unsigned>& acc,
                        const std::function<void(const std::vector<unsigned>&)>& f) {
        if (mask == 0) {
            if (acc.size() >= 2) f(acc);
            return;
        }
        unsigned low = mask & (~mask + 1u);
        unsigned rest = mask & ~low;
        unsigned sub = rest;
        while (true) {
            unsigned block = low | sub;
            acc.push_back(block);
            partition_scan(mask & ~block, acc, f);
            acc.pop_back();
            if (sub == 0) break;
            sub = (sub - 1) & rest;
        }
    }

    Candidate pick(std::vector<Candidate>& cands) {
        if (cands.empty()) throw Error("no candidates");
        std::size_t best = 0;
        for (std::size_t i = 1; i < cands.size(); ++i)
            if (better(cands[i], cands[best])) best = i;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (i == best) continue;
            if (!cands[best].value.is_exact() &&
                cands[i].value.overlaps(cands[best].value) &&
                !(cands[i].value.lo() == cands[best].value.lo() &&
                  cands[i].value.hi() == cands[best].value.hi()))
                ambiguous_ = true;
        }
        return cands[best];
    }

    const SpaceSpec& spec_;
    const NormOptions& opts_;
    int prec_;
    std::vector<int> sup_;
    std::vector<Rational> coeff_, ac_;
    int n_ = 0;
    std::vector<Enclosure> theta_;
    std::map<std::vector<int>, std::optional<int>> rank_memo_;
    std::unordered_map<std::uint64_t, Enclosure> seg_memo_;
    std::unordered_map<unsigned, Enclosure> mask_memo_;
    std::unordered_map<std::uint64_t, Candidate> seg_extract_memo_;
    std::unordered_map<unsigned, Candidate> mask_extract_memo_;
    bool ambiguous_ = false;
};

}  // namespace

std::vector<Enclosure> theta_table(const SpaceSpec& spec, int n_max, int prec_bits,
                                   bool force_interval) {
    std::vector<Enclosure> t;
    t.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        Enclosure e = spec.thetas.theta(n, prec_bits);
        if (force_interval && e.is_exact())
            e = Enclosure::interval(round_down(e.lo(), prec_bits), round_up(e.hi(), prec_bits),
                                    prec_bits);
        t.push_back(e);
    }
    // Clamp endpoints to a nonincreasing staircase when the true sequence is
    // nonincreasing; this keeps every non-minimal weight index dominated
    // endpoint-by-endpoint.
    bool monotone = true;
    for (int n = 1; n < n_max; ++n)
        if (t[n].lo() > t[n - 1].hi()) monotone = false;
    if (monotone) {
        for (int n = 1; n < n_max; ++n)
            if (t[n].hi() > t[n - 1].hi())
                t[n] = Enclosure::interval(t[n].lo(), t[n - 1].hi(),
                                           std::max(t[n].prec(), t[n - 1].prec()));
        for (int n = n_max - 2; n >= 0; --n)
            if (t[n].lo() < t[n + 1].lo())
                t[n] = Enclosure::interval(t[n + 1].lo(), t[n].hi(),
                                           std::max(t[n].prec(), t[n + 1].prec()));
    }
    return t;
}

Enclosure norm(const BlockVector& x, const SpaceSpec& spec, const NormOptions& opts) {
    if (x.zero()) return Enclosure::exact(Rational(0));
    if (spec.thetas.exact() && !opts.force_interval) {
        Engine e(x, spec, opts, opts.prec_bits);
        return e.value();
    }
    int prec = opts.prec_bits;
    while (true) {
        Engine e(x, spec, opts, prec);
        Enclosure v = e.value();
        if (v.width() <= opts.tolerance || prec >= opts.max_prec_bits) return v;
        prec *= 2;
    }
}

FunctionalResult norming_functional(const BlockVector& x, const SpaceSpec& spec,
                                    const NormOptions& opts) {
    FunctionalResult r;
    if (x.zero()) {
        r.tree.root = NormNode::leaf(1, 1);
        r.value = Enclosure::exact(Rational(0));
        return r;
    }
    bool interval_mode = !spec.thetas.exact() || opts.force_interval;
    int prec = opts.prec_bits;
    while (true) {
        Engine e(x, spec, opts, prec);
        Candidate c = e.extract();
        bool need_refine =
            interval_mode && (e.ambiguous() || c.value.width() > opts.tolerance);
        if (!need_refine || prec >= opts.max_prec_bits) {
            r.tree.root = c.node;
            r.value = c.value;
            r.ambiguous = e.ambiguous();
            return r;
        }
        prec *= 2;
    }
}

Rational tsirelson_norm(const BlockVector& x, const Rational& theta, int height_cap,
                        int cap_support) {
    if (theta <= 0 || theta > 1) throw Error("tsirelson_norm: theta must be in (0,1]");
    if (x.zero()) return Rational(0);
    if (theta == 1) return x.l1();
    std::vector<int> sup;
    std::vector<Rational> ac;
    for (const auto& [k, v] : x.coeffs()) {
        sup.push_back(k);
        ac.push_back(v < 0 ? Rational(-v) : v);
    }
    int n = static_cast<int>(sup.size());
    if (n > cap_support) throw CapExceeded("tsirelson_norm support " + std::to_string(n));
    // depth index: 0 = coordinates only; -1 (stored as n+1) = unbounded
    int unbounded = n + 1;
    int d0 = height_cap < 0 ? unbounded : std::min(height_cap, unbounded);
    std::map<std::tuple<int, int, int>, Rational> memo;
    std::function<Rational(int, int, int)> val = [&](int i, int j, int d) -> Rational {
        auto key = std::make_tuple(i, j, d);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Rational best(0);
        for (int p = i; p < j; ++p) best = std::max(best, ac[p]);
        if (d > 0) {
            int w = j - i;
            int dn = (d == unbounded) ? unbounded : d - 1;
            for (unsigned mask = 0; mask < (1u << w); ++mask) {
                int k = __builtin_popcount(mask);
                if (k < 2) continue;
                int first = __builtin_ctz(mask);
                if (k > sup[i + first]) continue;  // S_1: #blocks <= first minimum
                Rational sum(0);
                int prev = -1;
                for (int b = 0; b < w; ++b) {
                    if (!(mask & (1u << b))) continue;
                    if (prev >= 0) sum += val(i + prev, i + b, dn);
                    prev = b;
                }
                sum += val(i + prev, j, dn);
                best = std::max(best, Rational(theta * sum));
            }
        }
        memo.emplace(key, best);
        return best;
    };
    return val(0, n, d0);
}

}  // namespace tsl
