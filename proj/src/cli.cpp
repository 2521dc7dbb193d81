#include "tsl/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tsl/report.hpp"
#include "tsl/sampling.hpp"
#include "tsl/schreier.hpp"
#include "tsl/spreading.hpp"

namespace tsl {

namespace {

constexpr std::uint64_t kDefaultSeed = 1729;

int cap_override(int requested) {
    if (const char* env = std::getenv("TSL_CAP_OVERRIDE")) {
        int v = std::atoi(env);
        if (v > requested) return v;
    }
    return requested;
}

FiniteSet parse_set_flag(const std::string& s) {
    std::vector<int> elems;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        elems.push_back(std::stoi(item));
    }
    return FiniteSet::from_unsorted(std::move(elems));
}

std::vector<int> parse_index_list(const std::string& s) {
    std::vector<int> idx;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        idx.push_back(std::stoi(item));
    }
    return idx;
}

void emit(const Json& j, std::ostream& out, const std::string& out_file) {
    std::string dump = j.dump(2);
    out << dump << "\n";
    if (!out_file.empty()) {
        std::ofstream f(out_file);
        if (!f) throw Error("cannot write " + out_file);
        f << dump << "\n";
    }
}

// ---- verify suites ----

VerifyReport suite_height_fact(int samples, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "height-cap-factor";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"samples", samples}, {"theta", "1/2"}, {"max_M", 3}};
    Rng rng(seed);
    Rational theta(1, 2);
    for (int t = 0; t < samples; ++t) {
        int M = 1 + static_cast<int>(rng.below(3));
        FiniteSet supp = random_schreier_set(rng, M, 8, 40);
        std::map<int, Rational> coeffs;
        for (int v : supp.elements()) {
            int den = rng.range(1, 8);
            coeffs[v] = Rational(rng.range(1, den), den);  // in (0, 1]
        }
        BlockVector z(coeffs);
        VerifyReport one = verify_height_fact(z, M, theta);
        rep.fold(one.worst_slack, one.witness);
    }
    return rep;
}

VerifyReport suite_split_upper(int samples, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "average-allowable-split-upper";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"samples", samples}, {"M", 1}, {"j", 0}};
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    int done = 0;
    while (done < samples) {
        long long start = 4 + rng.below(7);  // root weight = support size in [4, 10]
        BasisSupply supply(start);
        AveragingTree tree = build_averaging_tree(supply, 1, Rational(2, start - 1));
        VerifyReport one = verify_theta1(tree, 0, spec);
        rep.fold(one.worst_slack, one.witness);
        rep.instances += one.instances - 1;
        ++done;
    }
    return rep;
}

VerifyReport suite_compose_iso(int samples, std::uint64_t seed) {
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    std::vector<BlockVector> xs;
    for (int t = 0; t < samples; ++t) xs.push_back(random_vector(rng, rng.range(1, 8), 20));
    VerifyReport rep = verify_x2(spec, xs);
    rep.seed = seed;
    return rep;
}

VerifyReport suite_restriction(int samples, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "restriction-construction";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"samples", samples}};
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    // a few cached sources; instances vary the selection
    std::vector<AveragingTree> sources;
    {
        BuildOptions b;
        b.power_of_two = true;
        Rational thetaM = spec.thetas.theta(2, 64).lo();
        Rational eps = Rational(2) / thetaM + 1;
        b.restriction_theta = thetaM;
        BasisSupply s1(1);
        sources.push_back(build_averaging_tree(s1, 2, eps, b));
        BasisSupply s2(6);
        sources.push_back(build_averaging_tree(s2, 2, eps, b));
        FlatBlockSupply s3(2, 2, spec);
        sources.push_back(build_averaging_tree(s3, 2, eps, b));
        BuildOptions b1;
        b1.power_of_two = true;
        b1.restriction_theta = spec.thetas.theta(1, 64).lo();
        BasisSupply s4(5);
        sources.push_back(build_averaging_tree(s4, 1, Rational(5), b1));
    }
    for (int t = 0; t < samples; ++t) {
        std::size_t which = rng.below(sources.size());
        const AveragingTree& src = sources[which];
        int level;
        std::vector<int> I;
        if (src.height() == 1) {
            level = 1;
            I = {1};
        } else if (rng.below(8) == 0) {
            level = 2;
            I = {1};
        } else {
            level = 1;
            int n1 = static_cast<int>(src.levels[1].size());
            for (int i = 1; i <= n1; ++i)
                if (rng.coin()) I.push_back(i);
            if (I.empty()) I.push_back(1 + static_cast<int>(rng.below(n1)));
        }
        AveragingTree y = restrict_average(src, level, I);
        auto violations = check_restriction_properties(src, level, I, y, spec);
        Json w;
        w["source"] = static_cast<int>(which);
        w["level"] = level;
        w["I"] = I;
        if (!violations.empty()) w["violations"] = violations;
        rep.fold(Enclosure::exact(Rational(-static_cast<long long>(violations.size()))), w);
    }
    return rep;
}

VerifyReport suite_prune(int samples, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "prune-loss";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"samples", samples}};
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    for (int t = 0; t < samples; ++t) {
        long long start = 8 + rng.below(9);
        BasisSupply supply(start);
        int M = 1 + static_cast<int>(rng.below(2));
        Rational eps = (M == 1) ? Rational(2, start - 1) : Rational(3, 4);
        BuildOptions b;
        if (M == 2) {
            b.max_leaves = 20000;
            eps = Rational(3, 4);
        }
        AveragingTree tree = build_averaging_tree(supply, M, eps, b);
        AverageCert cert = tree.node_cert(M, 0);
        cert.eps = tree.declared_eps;
        BlockVector x = cert.combined();
        // random valid trees over a small window of the support
        FiniteSet supp = x.support();
        std::vector<int> pts = supp.elements();
        if (pts.size() > 12) pts.resize(12);
        NormingTree f = random_norming_tree(rng, x.restricted(FiniteSet(pts)), spec);
        auto [pruned, loss] = prune_tree(f, cert, M, spec);
        Enclosure slack = Enclosure::exact(2 * cert.eps) - loss;
        Json w;
        w["M"] = M;
        w["loss"] = enclosure_to_json(loss);
        rep.fold(slack, w);
    }
    return rep;
}

VerifyReport suite_regroup(int samples, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "regroup-bound";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"samples", samples}};
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    Rational theta = spec.theta_limit(64).lo();
    int done = 0;
    while (done < samples) {
        BlockVector x = random_vector(rng, rng.range(4, 8), 24);
        NormingTree f = random_norming_tree(rng, x, spec);
        if (f.root.is_leaf()) continue;
        // walk to a random internal node
        std::vector<int> path;
        const NormNode* cur = &f.root;
        int ord = 0;
        while (!cur->is_leaf() && rng.coin()) {
            int c = static_cast<int>(rng.below(cur->children.size()));
            ord += cur->weight_index;
            path.push_back(c);
            cur = &cur->children[c];
        }
        while (cur->is_leaf()) {
            path.pop_back();
            cur = &f.root;
            ord = 0;
            for (int step : path) {
                ord += cur->weight_index;
                cur = &cur->children[step];
            }
        }
        int r = cur->weight_index;
        int k = ord + static_cast<int>(rng.below(r + 1));
        NormingTree g = regroup_node(f, path, k, spec);
        auto violations = validate_tree(g, spec);
        // t(node) f_node(x) <= theta^k sum_t g_t(x)
        Rational tag(1);
        {
            const NormNode* n = &f.root;
            for (int step : path) {
                tag *= spec.thetas.theta_exact(n->weight_index).value();
                n = &n->children[step];
            }
        }
        Enclosure fval = evaluate(NormingTree{*cur}, x, spec, 64, false);
        const NormNode* gnode = &g.root;
        for (int step : path) gnode = &gnode->children[step];
        Enclosure gsum = Enclosure::exact(Rational(0));
        int d = k - ord;
        if (d == 0) {
            gsum = evaluate(NormingTree{*gnode}, x, spec, 64, false);
        } else if (d == r) {
            for (const auto& c : gnode->children)
                gsum = gsum + evaluate(NormingTree{c}, x, spec, 64, false);
        } else {
            for (const auto& c : gnode->children)
                gsum = gsum + evaluate(NormingTree{c}, x, spec, 64, false);
        }
        Rational theta_k(1);
        for (int i = 0; i < k; ++i) theta_k *= theta;
        Enclosure slack = Enclosure::exact(theta_k) * gsum - Enclosure::exact(tag) * fval;
        Json w;
        w["k"] = k;
        w["ord"] = ord;
        w["weight_index"] = r;
        if (!violations.empty()) {
            w["violations"] = violations;
            slack = Enclosure::exact(Rational(-1));
        }
        rep.fold(slack, w);
        ++done;
    }
    return rep;
}

VerifyReport suite_scc_bracket(int, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "scc-norm-bracket";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"space", "S-geometric-1/2"}, {"max_support", 12}};
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2));
    for (int n = 1; n <= 2; ++n) {
        Rational thn = spec.thetas.theta_exact(n).value();
        for (int m = 2; m <= 12; ++m) {
            FiniteSet F = [&]() -> FiniteSet {
                try {
                    return maximal_schreier_interval(m, n, 12);
                } catch (const CapExceeded&) {
                    return FiniteSet{};
                }
            }();
            if (F.empty() || F.size() > 12) continue;
            std::map<int, Rational> coeffs;
            for (int v : F.elements()) coeffs[v] = Rational(1, F.size());
            Enclosure nv = norm(BlockVector(coeffs), spec);
            Enclosure slack = enc_min(nv - Enclosure::exact(thn),
                                      Enclosure::exact(2 * thn) - nv);
            Json w;
            w["n"] = n;
            w["set"] = finite_set_to_json(F);
            w["norm"] = enclosure_to_json(nv);
            rep.fold(slack, w);
        }
    }
    return rep;
}

VerifyReport suite_delta_bracket(int, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "delta-index-bracket";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"tailN", 4}, {"capF", 4}, {"grid_bits", 6}};
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2));
    std::vector<BlockVector> basis;
    for (int i = 1; i <= 12; ++i) basis.push_back(BlockVector::basis(i));
    for (int n = 1; n <= 2; ++n) {
        DeltaEstimate d = delta_estimate(basis, n, 4, 4, spec);
        Rational thn = spec.thetas.theta_exact(n).value();
        Enclosure slack = enc_min(
            d.value - Enclosure::exact(thn),
            Enclosure::exact(2 * thn + Rational(1, 64)) - d.value);
        if (d.lower_certificate < thn) slack = Enclosure::exact(Rational(-1));
        Json w;
        w["n"] = n;
        w["value"] = enclosure_to_json(d.value);
        w["method"] = d.method;
        rep.fold(slack, w);
    }
    return rep;
}

VerifyReport suite_tsirelson_average(int samples, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "tsirelson-average-lower";
    rep.pass = true;
    rep.seed = seed;
    rep.params = Json{{"samples", samples}};
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    std::vector<BlockVector> blocks;
    for (int i = 4; i <= 24; ++i) blocks.push_back(BlockVector::basis(i));
    for (int t = 0; t < samples; ++t) {
        int M = 1 + static_cast<int>(rng.below(2));
        FiniteSet G = random_schreier_set(rng, M, 6, 24);
        if (G.min() < 4) continue;
        std::vector<Rational> coeffs;
        for (std::size_t i = 0; i < G.size(); ++i)
            coeffs.push_back(Rational(rng.range(1, 4), 4));
        auto res = check_tsirelson_average(blocks, spec, M, {G}, {coeffs});
        Json w;
        w["G"] = finite_set_to_json(G);
        w["worst_ratio"] = enclosure_to_json(res.worst_ratio);
        rep.fold(res.worst_ratio - Enclosure::exact(Rational(1)), w);
    }
    return rep;
}

VerifyReport suite_ris_average(int, std::uint64_t seed) {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    Ave1Instance inst;
    inst.M = 1;
    inst.outer_eps = Rational(3, 4);
    inst.ris_eps = Rational(2);
    inst.n_k = {4, 5};
    AverageCert c1, c2;
    for (int i = 8; i <= 15; ++i) {
        c1.blocks.push_back(BlockVector::basis(i));
        c1.coeffs.push_back(Rational(1, 8));
    }
    c1.M = 4;
    c1.eps = Rational(2);
    for (int i = 32; i <= 63; ++i) {
        c2.blocks.push_back(BlockVector::basis(i));
        c2.coeffs.push_back(Rational(1, 32));
    }
    c2.M = 5;
    c2.eps = Rational(1);
    inst.ris = {c1, c2};
    inst.outer_coeffs = {Rational(1, 2), Rational(1, 2)};
    VerifyReport rep = verify_ave1(inst, spec);
    rep.seed = seed;
    return rep;
}

VerifyReport suite_special_average(int, std::uint64_t seed) {
    VerifyReport rep;
    rep.lemma = "special-average-two-sided";
    rep.pass = true;
    rep.seed = seed;
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    BasisSupply supply(8);
    AveragingTree tree = build_averaging_tree(supply, 1, Rational(1, 3));
    AverageCert cert = tree.node_cert(1, 0);
    auto sp = check_special_average(cert, spec, Rational(2));
    rep.params = Json{{"M", 1}, {"D", "2"}};
    for (const auto& row : sp.rows) {
        Json w;
        w["j"] = row.j;
        w["sup"] = enclosure_to_json(row.split_sup);
        Enclosure slack = enc_min(row.split_sup - row.lower_bound,
                                  row.upper_bound - row.split_sup);
        rep.fold(slack, w);
    }
    rep.witness["empirical_D"] = enclosure_to_json(sp.empirical_D);
    return rep;
}

VerifyReport suite_eq3(int samples, std::uint64_t seed) {
    Rng rng(seed);
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2));
    std::vector<BlockVector> basis;
    for (int i = 1; i <= 10; ++i) basis.push_back(BlockVector::basis(i));
    std::vector<int> alpha{1, 2, 3};
    std::vector<Rational> delta;
    for (int a : alpha) delta.push_back(2 * spec.thetas.theta_exact(a).value());
    std::vector<std::vector<Rational>> samples_v;
    samples_v.push_back(std::vector<Rational>(10, Rational(1, 10)));
    for (int t = 1; t < samples; ++t) {
        std::vector<Rational> a;
        int len = rng.range(1, 10);
        for (int i = 0; i < len; ++i) a.push_back(rng.nonzero_unit_rational(8));
        samples_v.push_back(std::move(a));
    }
    VerifyReport rep = eq3_check(basis, alpha, delta, samples_v, spec);
    rep.seed = seed;
    return rep;
}

using SuiteFn = VerifyReport (*)(int, std::uint64_t);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
    static const std::vector<std::pair<std::string, SuiteFn>> table = {
        {"height-fact", suite_height_fact},
        {"split-upper", suite_split_upper},
        {"compose-iso", suite_compose_iso},
        {"restriction", suite_restriction},
        {"prune", suite_prune},
        {"regroup", suite_regroup},
        {"scc-bracket", suite_scc_bracket},
        {"delta-bracket", suite_delta_bracket},
        {"tsirelson-average", suite_tsirelson_average},
        {"ris-average", suite_ris_average},
        {"special-average", suite_special_average},
        {"eq3", suite_eq3},
    };
    return table;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [n, f] : suite_table()) names.push_back(n);
    return names;
}

VerifyReport run_suite(const std::string& suite, int samples, std::uint64_t seed) {
    for (const auto& [n, f] : suite_table())
        if (n == suite) return f(samples, seed);
    throw Error("unknown suite '" + suite + "'; available: " + [] {
        std::string s;
        for (const auto& n : suite_names()) s += n + " ";
        return s;
    }());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mixed Tsirelson space norms, averaging trees and verifiers"};
    app.require_subcommand(1);

    std::string spec_file, vec_file, set_flag, out_file, tree_file, indices_flag;
    std::string suite_id;
    std::vector<std::string> merge_files;
    int M = 1;
    std::string eps_flag = "1/2";
    int samples = 100;
    std::uint64_t seed = kDefaultSeed;
    int cap = 0;
    int prec = 64;
    long long start = 1;
    bool modified = false, power_of_two = false, restriction_grade = false;
    int horizon = 1024;
    int level = 1;

    auto* c_norm = app.add_subcommand("norm", "norm of a vector in a space");
    c_norm->add_option("--spec", spec_file)->required();
    c_norm->add_option("--vec", vec_file)->required();
    c_norm->add_option("--prec", prec);
    c_norm->add_option("--cap", cap);
    c_norm->add_option("--out", out_file);

    auto* c_func = app.add_subcommand("functional", "optimal norming functional with tree");
    c_func->add_option("--spec", spec_file)->required();
    c_func->add_option("--vec", vec_file)->required();
    c_func->add_option("--prec", prec);
    c_func->add_option("--cap", cap);
    c_func->add_option("--out", out_file);

    auto* c_rank = app.add_subcommand("rank", "least n with the set in S_n");
    c_rank->add_option("--set", set_flag)->required();
    c_rank->add_option("--out", out_file);

    auto* c_part = app.add_subcommand("partitions", "candidate splittings of a support");
    c_part->add_option("--set", set_flag)->required();
    c_part->add_flag("--modified", modified);
    c_part->add_option("--cap", cap);
    c_part->add_option("--out", out_file);

    auto* c_build = app.add_subcommand("average-build", "construct an averaging tree");
    c_build->add_option("--M", M)->required();
    c_build->add_option("--eps", eps_flag)->required();
    c_build->add_option("--start", start);
    c_build->add_flag("--power-of-two", power_of_two);
    c_build->add_flag("--restriction-grade", restriction_grade);
    c_build->add_option("--spec", spec_file);
    c_build->add_option("--out", out_file);

    auto* c_restrict = app.add_subcommand("average-restrict", "restriction of an averaging tree");
    c_restrict->add_option("--tree", tree_file)->required();
    c_restrict->add_option("--M", level)->required();
    c_restrict->add_option("--indices", indices_flag)->required();
    c_restrict->add_option("--out", out_file);

    auto* c_verify = app.add_subcommand("verify", "run a verification suite");
    c_verify->add_option("suite", suite_id)->required();
    c_verify->add_option("--samples", samples);
    c_verify->add_option("--seed", seed);
    c_verify->add_option("--out", out_file);

    auto* c_classify = app.add_subcommand("classify", "finite-horizon class of a space");
    c_classify->add_option("--spec", spec_file)->required();
    c_classify->add_option("--horizon", horizon);
    c_classify->add_option("--prec", prec);
    c_classify->add_option("--out", out_file);

    auto* c_merge = app.add_subcommand("report-merge", "aggregate verify reports");
    c_merge->add_option("files", merge_files)->required();
    c_merge->add_option("--out", out_file);

    std::vector<const char*> argv;
    argv.push_back("tsl");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        NormOptions nopts;
        nopts.prec_bits = prec;
        if (cap > 0) {
            nopts.cap_non_modified = cap;
            nopts.cap_modified = cap;
        }
        nopts.cap_non_modified = cap_override(nopts.cap_non_modified);
        nopts.cap_modified = cap_override(nopts.cap_modified);

        if (c_norm->parsed()) {
            SpaceSpec spec = spec_from_json(load_json_file(spec_file));
            BlockVector x = vector_from_json(load_json_file(vec_file));
            Json j;
            j["norm"] = enclosure_to_json(norm(x, spec, nopts));
            emit(j, out, out_file);
            return 0;
        }
        if (c_func->parsed()) {
            SpaceSpec spec = spec_from_json(load_json_file(spec_file));
            BlockVector x = vector_from_json(load_json_file(vec_file));
            FunctionalResult r = norming_functional(x, spec, nopts);
            Json j;
            j["value"] = enclosure_to_json(r.value);
            j["tree"] = tree_to_json(r.tree);
            j["ambiguous"] = r.ambiguous;
            emit(j, out, out_file);
            return 0;
        }
        if (c_rank->parsed()) {
            FiniteSet f = parse_set_flag(set_flag);
            auto r = schreier_rank(f);
            Json j;
            j["rank"] = r ? Json(*r) : Json(nullptr);
            emit(j, out, out_file);
            return 0;
        }
        if (c_part->parsed()) {
            FiniteSet f = parse_set_flag(set_flag);
            EnumerationCaps caps;
            if (cap > 0) {
                caps.non_modified = cap;
                caps.modified = cap;
            }
            caps.non_modified = cap_override(caps.non_modified);
            caps.modified = cap_override(caps.modified);
            Json arr = Json::array();
            int count = 0;
            enumerate_partitions(f, modified, [&](const PartitionInfo& info) {
                ++count;
                Json p;
                Json blocks = Json::array();
                for (const auto& b : info.partition.blocks)
                    blocks.push_back(finite_set_to_json(b));
                p["blocks"] = std::move(blocks);
                p["block_count"] = info.block_count;
                p["minima_rank"] = info.minima_schreier_rank
                                       ? Json(*info.minima_schreier_rank)
                                       : Json(nullptr);
                arr.push_back(std::move(p));
            }, caps);
            Json j;
            j["count"] = count;
            j["partitions"] = std::move(arr);
            emit(j, out, out_file);
            return 0;
        }
        if (c_build->parsed()) {
            BuildOptions b;
            b.power_of_two = power_of_two;
            if (restriction_grade) {
                if (spec_file.empty())
                    throw Error("--restriction-grade needs --spec for theta_M");
                SpaceSpec spec = spec_from_json(load_json_file(spec_file));
                b.restriction_theta = spec.thetas.theta(M, prec).lo();
                b.power_of_two = true;
            }
            BasisSupply supply(start);
            AveragingTree t = build_averaging_tree(supply, M, parse_fraction(eps_flag), b);
            emit(averaging_tree_to_json(t), out, out_file);
            return 0;
        }
        if (c_restrict->parsed()) {
            AveragingTree t = averaging_tree_from_json(load_json_file(tree_file));
            AveragingTree y = restrict_average(t, level, parse_index_list(indices_flag));
            emit(averaging_tree_to_json(y), out, out_file);
            return 0;
        }
        if (c_verify->parsed()) {
            VerifyReport rep = run_suite(suite_id, samples, seed);
            emit(rep.to_json(), out, out_file);
            return rep.pass ? 0 : 2;
        }
        if (c_classify->parsed()) {
            SpaceSpec spec = spec_from_json(load_json_file(spec_file));
            PSpaceParams params = p_space_params(spec.thetas, horizon, prec);
            SpaceClass cls = classify(params);
            Json j;
            j["class"] = to_string(cls);
            j["horizon"] = horizon;
            j["q"] = enclosure_to_json(params.q);
            j["p"] = enclosure_to_json(params.p);
            j["q_diverges"] = params.q_diverges;
            j["diagnostics"] = params.diagnostics;
            emit(j, out, out_file);
            return 0;
        }
        if (c_merge->parsed()) {
            std::vector<Json> reports;
            for (const auto& f : merge_files) reports.push_back(load_json_file(f));
            Json merged = report_merge(reports);
            emit(merged, out, out_file);
            return merged["global"]["all_pass"].get<bool>() ? 0 : 2;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

}  // namespace tsl
