#include "tsl/schreier.hpp"

#include <algorithm>
#include <unordered_map>

namespace tsl {

std::size_t greedy_initial_segment(const std::vector<int>& elems, std::size_t start, int n) {
    if (start >= elems.size()) return 0;
    if (n == 0) return 1;
    // An S_n set starting at value m is built from at most m maximal S_(n-1)
    // pieces taken left to right; greedy packing is optimal for these families.
    int budget = elems[start];
    std::size_t pos = start;
    for (int i = 0; i < budget && pos < elems.size(); ++i)
        pos += greedy_initial_segment(elems, pos, n - 1);
    return pos - start;
}

namespace {

bool member_schreier(const FiniteSet& f, int n) {
    if (f.empty()) return true;
    if (n == 0) return f.size() <= 1;
    return greedy_initial_segment(f.elements(), 0, n) == f.size();
}

// Search over chunkings of f into successive chunks of size 1 or 2 whose
// minima form an S_n set.
bool chunking_search(const std::vector<int>& elems, std::size_t pos, std::vector<int>& minima,
                     int n) {
    if (pos == elems.size()) return member_schreier(FiniteSet(minima), n);
    for (std::size_t len = 1; len <= 2 && pos + len <= elems.size(); ++len) {
        minima.push_back(elems[pos]);
        if (chunking_search(elems, pos + len, minima, n)) {
            minima.pop_back();
            return true;
        }
        minima.pop_back();
    }
    return false;
}

int rank_search_bound(std::size_t size) {
    int b = 1;
    while ((std::size_t{1} << b) < size) ++b;
    return b + 1;
}

}  // namespace

bool member(const FiniteSet& f, const FamilySpec& fam) {
    switch (fam.kind()) {
        case FamilySpec::Kind::A:
            return static_cast<int>(f.size()) <= fam.param();
        case FamilySpec::Kind::S:
            return member_schreier(f, fam.param());
        case FamilySpec::Kind::SComposeA2: {
            if (f.empty()) return true;
            std::vector<int> minima;
            return chunking_search(f.elements(), 0, minima, fam.param());
        }
    }
    return false;
}

std::optional<int> schreier_rank(const FiniteSet& f) {
    if (f.empty() || f.size() == 1) return 0;
    if (f.min() == 1) return std::nullopt;  // {1} with company is in no S_n
    int bound = rank_search_bound(f.size());
    for (int n = 1; n <= bound; ++n)
        if (member_schreier(f, n)) return n;
    throw Error("schreier_rank: bound exhausted for " + f.to_string());
}

std::optional<int> compose_a2_rank(const FiniteSet& f) {
    if (f.empty() || f.size() <= 2) {
        // A single chunk of <= 2 elements has a singleton minima set.
        return 0;
    }
    if (f.min() == 1) return std::nullopt;  // >= 2 chunks, minima contain 1
    int bound = rank_search_bound(f.size());
    for (int n = 0; n <= bound; ++n)
        if (member(f, FamilySpec::s_compose_a2(n))) return n;
    throw Error("compose_a2_rank: bound exhausted for " + f.to_string());
}

bool check_partition(const Partition& p, const FamilySpec& fam) {
    for (const auto& b : p.blocks)
        if (b.empty()) throw MalformedPartition("empty block");
    for (std::size_t i = 0; i < p.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < p.blocks.size(); ++j)
            if (!p.blocks[i].disjoint_from(p.blocks[j]))
                throw MalformedPartition("blocks overlap");
    if (!p.modified) {
        for (std::size_t i = 0; i + 1 < p.blocks.size(); ++i)
            if (!p.blocks[i].before(p.blocks[i + 1]))
                throw MalformedPartition("blocks not successive");
    }
    return member(p.minima(), fam);
}

namespace {

void yield_partition(std::vector<FiniteSet> blocks, bool modified,
                     const std::function<void(const PartitionInfo&)>& yield) {
    PartitionInfo info;
    info.block_count = static_cast<int>(blocks.size());
    info.partition = Partition{std::move(blocks), modified};
    info.minima_schreier_rank = schreier_rank(info.partition.minima());
    yield(info);
}

// Set partitions of the values selected by `mask` over elems, emitted with
// blocks ordered by their minima (the recursion peels the least remaining
// element, so the order is canonical).
void set_partitions(const std::vector<int>& elems, unsigned mask, std::vector<FiniteSet>& acc,
                    const std::function<void(const PartitionInfo&)>& yield) {
    if (mask == 0) {
        if (acc.size() >= 2) yield_partition(acc, true, yield);
        return;
    }
    unsigned low = mask & (~mask + 1u);
    unsigned rest = mask & ~low;
    // The block containing the least element = low | (any subset of rest).
    unsigned sub = rest;
    while (true) {
        unsigned block_mask = low | sub;
        std::vector<int> block;
        for (unsigned b = block_mask; b;) {
            unsigned bit = b & (~b + 1u);
            block.push_back(elems[static_cast<unsigned>(__builtin_ctz(bit))]);
            b &= ~bit;
        }
        acc.emplace_back(block);
        set_partitions(elems, mask & ~block_mask, acc, yield);
        acc.pop_back();
        if (sub == 0) break;
        sub = (sub - 1) & rest;
    }
}

}  // namespace

void enumerate_partitions(const FiniteSet& support, bool modified,
                          const std::function<void(const PartitionInfo&)>& yield,
                          const EnumerationCaps& caps) {
    int cap = modified ? caps.modified : caps.non_modified;
    if (static_cast<int>(support.size()) > cap)
        throw CapExceeded("support size " + std::to_string(support.size()) +
                          " over partition cap " + std::to_string(cap));
    const auto& elems = support.elements();
    std::size_t s = elems.size();
    if (s < 2) return;
    if (!modified) {
        for (unsigned mask = 0; mask < (1u << s); ++mask) {
            if (__builtin_popcount(mask) < 2) continue;
            std::vector<std::size_t> minima_pos;
            for (std::size_t i = 0; i < s; ++i)
                if (mask & (1u << i)) minima_pos.push_back(i);
            std::vector<FiniteSet> blocks;
            for (std::size_t t = 0; t < minima_pos.size(); ++t) {
                std::size_t from = minima_pos[t];
                std::size_t to = (t + 1 < minima_pos.size()) ? minima_pos[t + 1] : s;
                blocks.emplace_back(
                    std::vector<int>(elems.begin() + from, elems.begin() + to));
            }
            yield_partition(std::move(blocks), false, yield);
        }
    } else {
        for (unsigned mask = 0; mask < (1u << s); ++mask) {
            if (__builtin_popcount(mask) < 2) continue;
            std::vector<FiniteSet> acc;
            set_partitions(elems, mask, acc, yield);
        }
    }
}

namespace {

// Fenwick over weights sorted descending; supports "sum of the k largest
// inserted weights".
class TopKSums {
public:
    explicit TopKSums(const std::vector<Rational>& sorted_desc)
        : cnt_(sorted_desc.size() + 1, 0), sum_(sorted_desc.size() + 1, Rational(0)) {}

    void insert(std::size_t rank) {  // rank is 0-based position in the descending order
        for (std::size_t i = rank + 1; i < cnt_.size(); i += i & (~i + 1)) ++cnt_[i];
    }
    void add_value(std::size_t rank, const Rational& v) {
        for (std::size_t i = rank + 1; i < sum_.size(); i += i & (~i + 1)) sum_[i] += v;
    }

    Rational top_k(long k) const {
        if (k <= 0) return Rational(0);
        Rational acc(0);
        long remaining = k;
        std::size_t pos = 0;
        std::size_t logn = 1;
        while ((std::size_t{1} << logn) < cnt_.size()) ++logn;
        for (std::size_t step = std::size_t{1} << logn; step > 0; step >>= 1) {
            std::size_t nxt = pos + step;
            if (nxt < cnt_.size() && cnt_[nxt] <= remaining) {
                remaining -= cnt_[nxt];
                acc += sum_[nxt];
                pos = nxt;
            }
        }
        return acc;
    }

private:
    std::vector<long> cnt_;
    std::vector<Rational> sum_;
};

struct BudgetKey {
    // pos (16 bits) | started (1) | budgets, 8 bits each
    std::uint64_t packed;
    bool operator==(const BudgetKey& o) const { return packed == o.packed; }
};

struct BudgetKeyHash {
    std::size_t operator()(const BudgetKey& k) const {
        return std::hash<std::uint64_t>{}(k.packed);
    }
};

constexpr int kMaxSumSupport = 28;
constexpr int kMaxSumLevel = 4;

class SchreierSumDP {
public:
    SchreierSumDP(const std::vector<int>& keys, const std::vector<Rational>& w, int M)
        : keys_(keys), w_(w), M_(M), n_(static_cast<int>(keys.size())) {}

    Rational run() {
        std::vector<int> budgets(M_, 0);
        return go(0, budgets, false);
    }

private:
    Rational go(int pos, std::vector<int>& budgets, bool started) {
        if (pos == n_) return Rational(0);
        BudgetKey key{pack(pos, budgets, started)};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        Rational best = go(pos + 1, budgets, started);  // skip keys_[pos]
        int e = keys_[pos];
        if (!started) {
            std::vector<int> nb(M_, clamp(e - 1, pos));
            best = std::max(best, w_[pos] + go(pos + 1, nb, true));
        } else {
            // depth 1: absorb into the open S_1 piece
            if (budgets[0] >= 1) {
                std::vector<int> nb = budgets;
                nb[0] = clamp(nb[0] - 1, pos);
                best = std::max(best, w_[pos] + go(pos + 1, nb, true));
            }
            // depth d: open fresh pieces at levels < d
            for (int d = 2; d <= M_; ++d) {
                if (budgets[d - 1] >= 1) {
                    std::vector<int> nb = budgets;
                    nb[d - 1] = clamp(nb[d - 1] - 1, pos);
                    for (int j = 0; j < d - 1; ++j) nb[j] = clamp(e - 1, pos);
                    best = std::max(best, w_[pos] + go(pos + 1, nb, true));
                }
            }
        }
        memo_.emplace(key, best);
        return best;
    }

    int clamp(int b, int pos) const { return std::min(b, n_ - pos); }

    std::uint64_t pack(int pos, const std::vector<int>& budgets, bool started) const {
        std::uint64_t v = (static_cast<std::uint64_t>(pos) << 1) | (started ? 1u : 0u);
        for (int b : budgets) v = (v << 8) | static_cast<std::uint64_t>(b & 0xff);
        return v;
    }

    const std::vector<int>& keys_;
    const std::vector<Rational>& w_;
    int M_, n_;
    std::unordered_map<BudgetKey, Rational, BudgetKeyHash> memo_;
};

}  // namespace

Rational max_schreier_sum(const std::map<int, Rational>& weights, int M) {
    std::vector<int> keys;
    std::vector<Rational> w;
    for (const auto& [k, v] : weights) {
        if (v < 0) throw Error("max_schreier_sum: negative weight");
        keys.push_back(k);
        w.push_back(v);
    }
    int n = static_cast<int>(keys.size());
    Rational best(0);
    if (n == 0) return best;
    if (M == 0) {
        for (const auto& v : w) best = std::max(best, v);
        return best;
    }
    if (M == 1) {
        // best = max over start t of w_t + (k_t - 1 largest weights after t)
        std::vector<std::size_t> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        std::vector<std::size_t> rank_of(n);
        std::vector<Rational> sorted_desc(n);
        for (int r = 0; r < n; ++r) {
            rank_of[order[r]] = r;
            sorted_desc[r] = w[order[r]];
        }
        TopKSums fen(sorted_desc);
        for (int t = n - 1; t >= 0; --t) {
            long want = std::min<long>(keys[t] - 1, n - 1 - t);
            best = std::max(best, w[t] + fen.top_k(want));
            fen.insert(rank_of[t]);
            fen.add_value(rank_of[t], w[t]);
        }
        return best;
    }
    if (n > kMaxSumSupport)
        throw CapExceeded("max_schreier_sum support " + std::to_string(n));
    if (M > kMaxSumLevel) throw CapExceeded("max_schreier_sum level " + std::to_string(M));
    SchreierSumDP dp(keys, w, M);
    return dp.run();
}

FiniteSet maximal_schreier_interval(int start, int n, std::size_t cap) {
    if (start < 1) throw Error("start must be >= 1");
    long long len = 0;
    std::function<long long(long long, int)> grow = [&](long long at, int lvl) -> long long {
        if (lvl == 0) return 1;
        long long pos = at;
        for (long long i = 0; i < at; ++i) {
            if (static_cast<std::size_t>(pos - start) > cap)
                throw CapExceeded("maximal Schreier interval beyond " + std::to_string(cap));
            pos += grow(pos, lvl - 1);
        }
        return pos - at;
    };
    len = grow(start, n);
    if (static_cast<std::size_t>(len) > cap)
        throw CapExceeded("maximal Schreier interval beyond " + std::to_string(cap));
    std::vector<int> elems;
    for (long long v = start; v < start + len; ++v) elems.push_back(static_cast<int>(v));
    return FiniteSet(std::move(elems));
}

std::vector<FiniteSet> schreier_decompose(const FiniteSet& f, int r, int d) {
    if (d < 0 || d > r) throw PreconditionFailed("schreier_decompose: d out of [0, r]");
    if (!member(f, FamilySpec::S(r)))
        throw PreconditionFailed("schreier_decompose: set not in S_" + std::to_string(r));
    std::vector<FiniteSet> out;
    if (f.empty()) return out;
    if (d == 0) {
        out.push_back(f);
        return out;
    }
    const auto& elems = f.elements();
    std::size_t pos = 0;
    while (pos < elems.size()) {
        std::size_t len = greedy_initial_segment(elems, pos, r - 1);
        FiniteSet piece(std::vector<int>(elems.begin() + pos, elems.begin() + pos + len));
        auto sub = schreier_decompose(piece, r - 1, d - 1);
        out.insert(out.end(), sub.begin(), sub.end());
        pos += len;
    }
    return out;
}

}  // namespace tsl
