#include "tsl/spreading.hpp"

#include <algorithm>

#include "tsl/schreier.hpp"

namespace tsl {

PSpaceParams p_space_params(const ThetaGen& thetas, int horizon, int prec_bits) {
    if (horizon < 8) throw Error("horizon too small");
    if (auto mx = thetas.max_index(); mx && *mx < horizon)
        throw Error("theta table shorter than horizon");
    PSpaceParams out;
    out.horizon = horizon;

    // q_n from theta_n = 1/n^(1/q_n): q_n = log n / log(1/theta_n)
    std::vector<Enclosure> theta(horizon + 1, Enclosure::exact(Rational(1)));
    for (int n = 1; n <= horizon; ++n) theta[n] = thetas.theta(n, prec_bits);
    for (int n = 2; n <= horizon; ++n) {
        Enclosure logn = log2_enclosure(Rational(n), prec_bits);
        Enclosure logt;
        if (auto e = thetas.theta_exact(n)) {
            if (*e >= 1) {
                out.diagnostics.push_back("theta_" + std::to_string(n) + " >= 1");
                out.q_n.push_back(Enclosure::exact(Rational(0)));
                continue;
            }
            logt = log2_enclosure(Rational(1) / *e, prec_bits);
        } else {
            // 1/theta via the enclosure
            Enclosure inv = Enclosure::exact(Rational(1)) / theta[n];
            Enclosure lo = log2_enclosure(inv.lo(), prec_bits);
            Enclosure hi = log2_enclosure(inv.hi(), prec_bits);
            logt = Enclosure::interval(lo.lo(), hi.hi(), prec_bits);
        }
        out.q_n.push_back(logn / logt);
    }

    // Local slope between n and 2n: q_loc = log 2 / log(theta_n / theta_2n).
    // A settling slope estimates q; growth across octaves flags divergence
    // (p = 1); a slope collapsing below 1 is not a p-space at all.
    std::vector<Enclosure> slopes;
    for (int n = 4; 2 * n <= horizon; n *= 2) {
        Enclosure ratio = theta[n] / theta[2 * n];
        Enclosure lr_lo = log2_enclosure(ratio.lo(), prec_bits);
        Enclosure lr_hi = log2_enclosure(ratio.hi(), prec_bits);
        Enclosure logr = Enclosure::interval(lr_lo.lo(), lr_hi.hi(), prec_bits);
        slopes.push_back(Enclosure::exact(Rational(1)) / logr);
    }
    if (slopes.size() >= 2) {
        const Enclosure& first = slopes.front();
        const Enclosure& last = slopes.back();
        if (last.lo() > first.hi() * Rational(3, 2)) {
            out.q_diverges = true;
            out.diagnostics.push_back("q_n grows across octaves: diverging (p = 1 case)");
        }
        if (last.hi() < 1) {
            out.sub_one_slope = true;
            out.diagnostics.push_back("local slope below 1: not a p-space");
        }
    }

    if (thetas.kind() == ThetaGen::Kind::PowerLaw) {
        // the generator fixes q exactly, and c_n = theta_n n^(1/q) = c
        Rational q = thetas.power_law_q();
        out.q = Enclosure::exact(q);
        out.q_diverges = false;
        if (q > 1)
            out.p = Enclosure::exact(q / (q - 1));
        else {
            out.sub_one_slope = true;  // q = 1: the c_0 boundary, not a p-space
            out.p = Enclosure::interval(Rational(1), Rational(Int(1) << 62), prec_bits);
            out.diagnostics.push_back("q = 1: outside the p-space range");
        }
        for (int n = 1; n <= horizon; ++n)
            out.c_n.push_back(Enclosure::exact(thetas.power_law_c()));
        return out;
    }

    if (!out.q_diverges) {
        Enclosure q = Enclosure::exact(Rational(1));
        for (const auto& e : out.q_n) q = enc_max(q, e);
        out.q = q;
        if (q.lo() > 1) {
            // 1/p = 1 - 1/q
            Enclosure inv_p = Enclosure::exact(Rational(1)) - Enclosure::exact(Rational(1)) / q;
            out.p = Enclosure::exact(Rational(1)) / inv_p;
        } else {
            out.sub_one_slope = true;
            out.p = Enclosure::interval(Rational(1), Rational(Int(1) << 62), prec_bits);
        }
        for (int n = 1; n <= horizon; ++n) {
            // c_n = theta_n n^(1/q); the q upper end gives the measured scale
            Rational q_est = Rational(ceil_rational(q.hi() * 64), 64);
            Enclosure root = rational_pow_enclosure(Rational(n), Rational(1) / q_est, prec_bits);
            out.c_n.push_back(theta[n] * root);
        }
        if (out.q_n.size() >= 4) {
            Enclosure tail = out.q_n.back();
            Enclosure midv = out.q_n[out.q_n.size() / 2];
            if (tail.lo() > midv.hi() * Rational(5, 4))
                out.diagnostics.push_back("q_n not settling within horizon");
        }
    } else {
        out.q = Enclosure::interval(Rational(1), Rational(Int(1) << 62), prec_bits);
        out.p = Enclosure::exact(Rational(1));
        for (int n = 1; n <= horizon; ++n) out.c_n.push_back(theta[n]);  // p = 1: c_n = theta_n
    }
    return out;
}

std::string to_string(SpaceClass c) {
    switch (c) {
        case SpaceClass::Class1:
            return "Class1";
        case SpaceClass::Class2:
            return "Class2";
        case SpaceClass::Unknown:
            return "Unknown";
    }
    return "Unknown";
}

SpaceClass classify(const PSpaceParams& params, const ClassifyOptions& opts) {
    if (params.sub_one_slope) return SpaceClass::Unknown;
    // p = 1 case: c_n = theta_n, which tends to zero by definition
    if (params.q_diverges) return SpaceClass::Class2;
    if (params.c_n.empty()) return SpaceClass::Unknown;
    int h = static_cast<int>(params.c_n.size());
    if (h < 8) return SpaceClass::Unknown;
    // trend windows over the tail half (insensitive to finitely many
    // prepended weights): mid quarter vs last quarter
    auto window_mean = [&](int from, int to) {
        Rational s(0);
        for (int i = from; i < to; ++i) s += params.c_n[i].mid();
        return s / (to - from);
    };
    Rational mid = window_mean(h / 2, 3 * h / 4);
    Rational last = window_mean(3 * h / 4, h);
    Rational inf_tail = params.c_n[h / 2].mid();
    for (int i = h / 2; i < h; ++i) inf_tail = std::min(inf_tail, Rational(params.c_n[i].mid()));
    bool vanishing = last < mid * opts.vanish_factor;
    if (vanishing && last < opts.inf_threshold) return SpaceClass::Class2;
    if (inf_tail >= opts.inf_threshold && !vanishing) return SpaceClass::Class1;
    return SpaceClass::Unknown;
}

bool lr_average_check(const std::vector<BlockVector>& blocks, const Rational& r,
                      const Rational& C, const SpaceSpec& spec,
                      const std::vector<std::vector<Rational>>& coeff_samples,
                      const NormOptions& nopts) {
    if (blocks.empty()) throw Error("no blocks");
    if (C < 1) throw Error("equivalence constant must be >= 1");
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
        if (!(blocks[i].max_supp() < blocks[i + 1].min_supp()))
            throw MalformedDecomposition("blocks not successive");
    std::size_t m = blocks.size();
    int prec = nopts.prec_bits;

    std::vector<std::vector<Rational>> patterns;
    patterns.emplace_back(m, Rational(1));
    if (m <= 10) {
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            std::vector<Rational> p(m, Rational(1));
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1u << i)) p[i] = Rational(-1);
            patterns.push_back(std::move(p));
        }
    }
    for (const auto& cs : coeff_samples)
        if (cs.size() == m) patterns.push_back(cs);

    Int rp = numerator(r), rq = denominator(r);
    if (rp <= 0) throw Error("r must be positive");
    auto lr_norm = [&](const std::vector<Rational>& a) {
        // (sum |a_i|^r)^(1/r) with rational r = rp/rq
        Enclosure sum = Enclosure::exact(Rational(0));
        for (const auto& ai : a) {
            Rational mag = ai < 0 ? Rational(-ai) : ai;
            if (mag == 0) continue;
            sum = sum + rational_pow_enclosure(mag, r, prec);
        }
        if (sum.lo() == 0 && sum.hi() == 0) return Enclosure::exact(Rational(0));
        Enclosure lo = rational_pow_enclosure(sum.lo(), Rational(rq, rp), prec);
        Enclosure hi = rational_pow_enclosure(sum.hi(), Rational(rq, rp), prec);
        return Enclosure::interval(lo.lo(), hi.hi(), prec);
    };

    for (const auto& a : patterns) {
        BlockVector combo;
        for (std::size_t i = 0; i < m; ++i) combo = combo.plus(blocks[i].scaled(a[i]));
        Enclosure lhs = norm(combo, spec, nopts);
        Enclosure rhs = lr_norm(a);
        if (rhs.lo() == 0 && rhs.hi() == 0) {
            if (!(lhs.hi() == 0)) return false;
            continue;
        }
        // need rhs / C <= lhs <= C rhs, conservatively
        if (!(lhs.hi() <= (Enclosure::exact(C) * rhs).hi())) return false;
        if (!(lhs.lo() >= (rhs / Enclosure::exact(C)).lo())) return false;
    }
    return true;
}

namespace {

// All F in S_n with min >= tailN, 1 <= |F| <= capF, over positions
// {1..limit}; hereditary pruning on the partial set.
void admissible_sets(int n, int tailN, int capF, int limit, std::vector<int>& cur,
                     const std::function<void(const FiniteSet&)>& yield) {
    if (!cur.empty()) yield(FiniteSet(cur));
    if (static_cast<int>(cur.size()) == capF) return;
    int from = cur.empty() ? tailN : cur.back() + 1;
    for (int v = from; v <= limit; ++v) {
        cur.push_back(v);
        if (member(FiniteSet(cur), FamilySpec::S(n)))
            admissible_sets(n, tailN, capF, limit, cur, yield);
        cur.pop_back();
    }
}

}  // namespace

DeltaEstimate delta_estimate(const std::vector<BlockVector>& vectors, int n, int tailN, int capF,
                             const SpaceSpec& spec, const DeltaOptions& opts) {
    if (vectors.empty()) throw Error("no vectors");
    for (std::size_t i = 0; i + 1 < vectors.size(); ++i)
        if (!(vectors[i].max_supp() < vectors[i + 1].min_supp()))
            throw MalformedDecomposition("vectors not successive");
    if (capF > 8) throw CapExceeded("capF " + std::to_string(capF));
    DeltaEstimate out;
    out.n = n;
    out.tailN = tailN;
    out.capF = capF;
    Enclosure thn = spec.thetas.theta(n, opts.norm.prec_bits);
    out.lower_certificate = thn.lo();
    out.method = Json{{"grid_bits", opts.grid_bits},
                      {"coarse_bits", opts.coarse_bits},
                      {"universe", static_cast<int>(vectors.size())}};

    // simplex minimization of norm(sum a_i v_i) for the chosen F
    auto simplex_min = [&](const std::vector<const BlockVector*>& vs) {
        int m = static_cast<int>(vs.size());
        auto eval = [&](const std::vector<Rational>& a) {
            BlockVector combo;
            for (int i = 0; i < m; ++i) combo = combo.plus(vs[i]->scaled(a[i]));
            return norm(combo, spec, opts.norm);
        };
        if (m == 1) return eval({Rational(1)});
        // coarse sweep over compositions of 2^coarse_bits
        long grid = 1L << opts.coarse_bits;
        std::vector<Rational> best_a;
        Enclosure best;
        bool first = true;
        std::vector<long> comp(m, 0);
        std::function<void(int, long)> sweep = [&](int i, long left) {
            if (i == m - 1) {
                comp[i] = left;
                std::vector<Rational> a(m);
                bool pos = true;
                for (int t = 0; t < m; ++t) {
                    a[t] = Rational(comp[t], grid);
                    if (comp[t] == 0) pos = false;
                }
                if (!pos) return;  // zero entries are covered by smaller F
                Enclosure v = eval(a);
                if (first || v.hi() < best.hi()) {
                    best = v;
                    best_a = a;
                    first = false;
                }
                return;
            }
            for (long c = 0; c <= left; ++c) {
                comp[i] = c;
                sweep(i + 1, left - c);
            }
        };
        sweep(0, grid);
        // local refinement: halve the mesh, walk one-unit mass moves until
        // no improvement at that mesh
        for (int bits = opts.coarse_bits + 1; bits <= opts.grid_bits; ++bits) {
            long g = 1L << bits;
            for (int round = 0; round < 64; ++round) {
                bool improved = false;
                std::vector<long> base(m);
                for (int i = 0; i < m; ++i) {
                    Rational scaled = best_a[i] * g;
                    base[i] = numerator(scaled).convert_to<long>();
                }
                for (int from = 0; from < m; ++from)
                    for (int to = 0; to < m; ++to) {
                        if (from == to || base[from] <= 1) continue;
                        std::vector<Rational> a(m);
                        for (int i = 0; i < m; ++i) a[i] = Rational(base[i], g);
                        a[from] -= Rational(1, g);
                        a[to] += Rational(1, g);
                        Enclosure v = eval(a);
                        if (v.hi() < best.hi()) {
                            best = v;
                            best_a = a;
                            improved = true;
                        }
                    }
                if (!improved) break;
            }
        }
        return best;
    };

    bool first = true;
    Enclosure best;
    FiniteSet best_f;
    int limit = static_cast<int>(vectors.size());
    std::vector<int> cur;
    admissible_sets(n, tailN, capF, limit, cur, [&](const FiniteSet& F) {
        std::vector<const BlockVector*> vs;
        for (int pos : F.elements()) vs.push_back(&vectors[pos - 1]);
        Enclosure v = simplex_min(vs);
        if (first || v.hi() < best.hi()) {
            best = v;
            best_f = F;
            first = false;
        }
    });
    if (first) throw Error("no admissible index set; raise capF or lower tailN");
    out.value = best;
    out.method["witness_set"] = finite_set_to_json(best_f);
    return out;
}

bool strong_domination_check(const CoefficientNorm& u_norm, const CoefficientNorm& v_norm,
                             const std::vector<Rational>& deltas,
                             const std::vector<std::vector<Rational>>& samples) {
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
        if (deltas[i] < deltas[i + 1]) throw Error("deltas must be nonincreasing");
    for (const auto& a : samples) {
        int s = static_cast<int>(a.size());
        if (s > 10) throw CapExceeded("sample support " + std::to_string(s));
        Enclosure lhs = v_norm(a);
        // best u-norm over subsets of each cardinality, then prefix maxima
        std::vector<Enclosure> by_card(s + 1, Enclosure::exact(Rational(0)));
        for (unsigned mask = 1; mask < (1u << s); ++mask) {
            std::vector<Rational> rest(s, Rational(0));
            for (int i = 0; i < s; ++i)
                if (mask & (1u << i)) rest[i] = a[i];
            int c = __builtin_popcount(mask);
            by_card[c] = enc_max(by_card[c], u_norm(rest));
        }
        for (int c = 1; c <= s; ++c) by_card[c] = enc_max(by_card[c], by_card[c - 1]);
        Enclosure rhs = Enclosure::exact(Rational(0));
        int nmax = static_cast<int>(std::min<std::size_t>(deltas.size(), s));
        for (int n = 1; n <= nmax; ++n)
            rhs = enc_max(rhs, Enclosure::exact(deltas[n - 1]) * by_card[n]);
        if (!(lhs.hi() <= rhs.lo())) return false;
    }
    return true;
}

VerifyReport eq3_check(const std::vector<BlockVector>& x_vectors,
                       const std::vector<int>& alpha_seq, const std::vector<Rational>& delta_seq,
                       const std::vector<std::vector<Rational>>& coeff_samples,
                       const SpaceSpec& spec, const NormOptions& nopts) {
    if (alpha_seq.size() != delta_seq.size() || alpha_seq.empty())
        throw Error("alpha/delta arity mismatch");
    for (std::size_t i = 0; i + 1 < alpha_seq.size(); ++i)
        if (alpha_seq[i] >= alpha_seq[i + 1]) throw Error("alpha must increase");
    for (const auto& d : delta_seq)
        if (d <= 0) throw Error("deltas must be positive");
    VerifyReport rep;
    rep.lemma = "spreading-index-domination";
    rep.pass = true;
    rep.params = Json{{"levels", static_cast<int>(alpha_seq.size())},
                      {"samples", static_cast<int>(coeff_samples.size())}};
    for (const auto& a : coeff_samples) {
        std::size_t s = std::min(a.size(), x_vectors.size());
        if (s == 0) continue;
        BlockVector combo;
        for (std::size_t i = 0; i < s; ++i) combo = combo.plus(x_vectors[i].scaled(a[i]));
        Enclosure lhs = norm(combo, spec, nopts);
        // RHS = 4 sum_k delta_(alpha_(k-1)) sup_{F in S_(alpha_k), F >= k} sum_F |a_i|
        Enclosure rhs = Enclosure::exact(Rational(0));
        for (std::size_t k = 1; k < alpha_seq.size(); ++k) {
            std::map<int, Rational> w;
            for (std::size_t i = k - 1; i < s; ++i) {
                // 1-based positions >= k
                Rational mag = a[i] < 0 ? Rational(-a[i]) : a[i];
                w[static_cast<int>(i) + 1] = mag;
            }
            if (w.empty()) continue;
            Rational sup = max_schreier_sum(w, alpha_seq[k]);
            rhs = rhs + Enclosure::exact(delta_seq[k - 1] * sup);
        }
        rhs = Enclosure::exact(Rational(4)) * rhs;
        Json w;
        w["lhs"] = enclosure_to_json(lhs);
        w["rhs"] = enclosure_to_json(rhs);
        rep.fold(rhs - lhs, w);
    }
    return rep;
}

}  // namespace tsl
