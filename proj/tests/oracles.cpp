#include "oracles.hpp"

#include <functional>
#include <unordered_map>

namespace tsl::oracle {

bool member_schreier(const FiniteSet& f, int n) {
    if (f.empty()) return true;
    if (n == 0) return f.size() == 1;
    const auto& e = f.elements();
    int budget = f.min();
    // try every split into k <= min F successive nonempty pieces, each in S_(n-1)
    std::function<bool(std::size_t, int)> split = [&](std::size_t pos, int pieces) -> bool {
        if (pos == e.size()) return true;
        if (pieces == 0) return false;
        for (std::size_t end = pos + 1; end <= e.size(); ++end) {
            FiniteSet piece(std::vector<int>(e.begin() + pos, e.begin() + end));
            if (member_schreier(piece, n - 1) && split(end, pieces - 1)) return true;
        }
        return false;
    };
    return split(0, budget);
}

Enclosure norm(const BlockVector& x, const SpaceSpec& spec, int prec_bits, bool force_interval) {
    if (x.zero()) return Enclosure::exact(Rational(0));
    std::vector<int> sup;
    std::vector<Rational> ac;
    for (const auto& [k, v] : x.coeffs()) {
        sup.push_back(k);
        ac.push_back(v < 0 ? Rational(-v) : v);
    }
    int s = static_cast<int>(sup.size());
    if (s > 16) throw CapExceeded("oracle support");
    int n_max = s + 3;
    if (auto mx = spec.thetas.max_index()) n_max = std::min(n_max, *mx);
    std::vector<Enclosure> theta = theta_table(spec, n_max, prec_bits, force_interval);

    std::unordered_map<unsigned, Enclosure> memo;
    std::function<Enclosure(unsigned)> val = [&](unsigned mask) -> Enclosure {
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        Enclosure best = Enclosure::exact(Rational(0));
        for (int p = 0; p < s; ++p)
            if (mask & (1u << p)) best = enc_max(best, Enclosure::exact(ac[p]));

        auto consider = [&](const std::vector<unsigned>& blocks) {
            std::vector<int> minima;
            for (unsigned b : blocks) minima.push_back(sup[__builtin_ctz(b)]);
            FiniteSet minima_set = FiniteSet::from_unsorted(minima);
            if (minima_set.size() != blocks.size()) return;
            std::vector<int> admissible;
            for (int n = 1; n <= n_max; ++n)
                if (member(minima_set, spec.family_at(n))) admissible.push_back(n);
            if (admissible.empty()) return;
            Enclosure sum = Enclosure::exact(Rational(0));
            for (unsigned b : blocks) sum = sum + val(b);
            for (int n : admissible) best = enc_max(best, theta[n - 1] * sum);
        };

        if (spec.modified) {
            // every collection of pairwise disjoint nonempty blocks =
            // set partition of each nonempty submask; skip the identity
            // single-block application of the full mask
            for (unsigned t = mask;; t = (t - 1) & mask) {
                if (t) {
                    std::vector<unsigned> blocks;
                    std::function<void(unsigned)> parts = [&](unsigned rem) {
                        if (rem == 0) {
                            if (!(blocks.size() == 1 && blocks[0] == mask)) consider(blocks);
                            return;
                        }
                        unsigned low = rem & (~rem + 1u);
                        unsigned rest = rem & ~low;
                        unsigned sub = rest;
                        while (true) {
                            blocks.push_back(low | sub);
                            parts(rem & ~(low | sub));
                            blocks.pop_back();
                            if (sub == 0) break;
                            sub = (sub - 1) & rest;
                        }
                    };
                    parts(t);
                }
                if (t == 0) break;
            }
        } else {
            // successive sequences of arbitrary nonempty blocks; points
            // before, between and after blocks may be skipped
            std::vector<unsigned> blocks;
            std::function<void(int)> grow = [&](int from) {
                if (!blocks.empty() && !(blocks.size() == 1 && blocks[0] == mask))
                    consider(blocks);
                for (int p = from; p < s; ++p) {
                    if (!(mask & (1u << p))) continue;
                    unsigned avail = 0;
                    for (int q = p + 1; q < s; ++q)
                        if (mask & (1u << q)) avail |= 1u << q;
                    unsigned sub = avail;
                    while (true) {
                        unsigned block = (1u << p) | sub;
                        int top = 31 - __builtin_clz(block);
                        blocks.push_back(block);
                        grow(top + 1);
                        blocks.pop_back();
                        if (sub == 0) break;
                        sub = (sub - 1) & avail;
                    }
                }
            };
            grow(0);
        }
        memo.emplace(mask, best);
        return best;
    };
    return val((1u << s) - 1);
}

Rational max_schreier_sum(const std::map<int, Rational>& weights, int M) {
    std::vector<int> keys;
    std::vector<Rational> w;
    for (const auto& [k, v] : weights) {
        keys.push_back(k);
        w.push_back(v);
    }
    int s = static_cast<int>(keys.size());
    if (s > 16) throw CapExceeded("oracle support");
    Rational best(0);
    for (unsigned mask = 0; mask < (1u << s); ++mask) {
        std::vector<int> f;
        Rational sum(0);
        for (int p = 0; p < s; ++p)
            if (mask & (1u << p)) {
                f.push_back(keys[p]);
                sum += w[p];
            }
        if (member_schreier(FiniteSet(f), M)) best = std::max(best, sum);
    }
    return best;
}

std::vector<Int> bell_numbers(int n) {
    std::vector<std::vector<Int>> tri(n + 1);
    tri[0] = {Int(1)};
    for (int i = 1; i <= n; ++i) {
        tri[i].resize(i + 1);
        tri[i][0] = tri[i - 1][i - 1];
        for (int j = 1; j <= i; ++j) tri[i][j] = tri[i][j - 1] + tri[i - 1][j - 1];
    }
    std::vector<Int> bell(n + 1);
    for (int i = 0; i <= n; ++i) bell[i] = tri[i][0];
    return bell;
}

}  // namespace tsl::oracle
