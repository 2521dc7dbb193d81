// Acceptance suite: one line per criterion, exit code = number of failures.

#include <chrono>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "tsl/cli.hpp"
#include "tsl/json_io.hpp"
#include "tsl/norm_engine.hpp"
#include "tsl/report.hpp"
#include "tsl/rng.hpp"
#include "tsl/sampling.hpp"
#include "tsl/spreading.hpp"

using namespace tsl;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << idx << ". " << name;
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << std::endl;
    if (!pass) ++failures;
}

struct NamedSpec {
    std::string name;
    SpaceSpec spec;
    int max_support;
};

std::vector<NamedSpec> criterion1_specs() {
    return {
        {"table-tsirelson", SpaceSpec::tsirelson_like_table(), 7},
        {"schreier-geometric", SpaceSpec::schreier_geometric(Rational(1, 2)), 7},
        {"schreier-geometric-modified", SpaceSpec::schreier_geometric(Rational(1, 2), true), 6},
        {"a-sqrt", SpaceSpec::a_power_law(Rational(1), Rational(2)), 7},
    };
}

std::vector<BlockVector> seeded_vectors(std::uint64_t seed, int count, int max_support,
                                        int max_index) {
    Rng rng(seed);
    std::vector<BlockVector> out;
    for (int i = 0; i < count; ++i)
        out.push_back(random_vector(rng, rng.range(1, max_support), max_index));
    return out;
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();

    // 1 + 2 + 5: oracle equivalence, duality certificates, modified dominance
    {
        bool oracle_ok = true, duality_ok = true, dominance_ok = true;
        std::string oracle_detail, duality_detail;
        int checked = 0;
        SpaceSpec plain = SpaceSpec::schreier_geometric(Rational(1, 2));
        SpaceSpec modified = SpaceSpec::schreier_geometric(Rational(1, 2), true);
        for (const auto& [name, spec, max_support] : criterion1_specs()) {
            auto vectors = seeded_vectors(0xC0FFEE + max_support, 200, max_support, 16);
            for (const auto& x : vectors) {
                ++checked;
                Enclosure mine = norm(x, spec);
                Enclosure ref = oracle::norm(x, spec);
                if (mine.lo() != ref.lo() || mine.hi() != ref.hi()) {
                    oracle_ok = false;
                    if (oracle_detail.empty()) oracle_detail = "mismatch in " + name;
                }
                FunctionalResult f = norming_functional(x, spec);
                Enclosure eval = evaluate(f.tree, x, spec);
                if (spec.thetas.exact()) {
                    if (eval.lo() != mine.lo()) {
                        duality_ok = false;
                        if (duality_detail.empty()) duality_detail = "exact gap in " + name;
                    }
                } else {
                    if (!eval.overlaps(mine) || eval.width() > Rational(1, 1000000000)) {
                        duality_ok = false;
                        if (duality_detail.empty()) duality_detail = "enclosure gap in " + name;
                    }
                }
                if (!validate_tree(f.tree, spec).empty()) duality_ok = false;
                if (&spec != nullptr && name == "schreier-geometric") {
                    if (!(norm(x, modified).lo() >= norm(x, plain).lo())) dominance_ok = false;
                }
            }
        }
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        std::ostringstream d;
        d << checked << " vectors, " << secs << "s";
        report(1, "norms match the exhaustive norming-set oracle", oracle_ok,
               oracle_detail.empty() ? d.str() : oracle_detail);
        report(2, "norming functionals certify their norms", duality_ok, duality_detail);
        report(5, "modified norm dominates the admissible norm", dominance_ok);
    }

    // 3: special convex combination bracket
    {
        VerifyReport rep = run_suite("scc-bracket", 0, 1);
        std::ostringstream d;
        d << rep.instances << " combinations, worst slack " << rep.worst_slack.to_string();
        report(3, "uniform special combinations land in [theta_n, 2 theta_n]", rep.pass,
               d.str());
    }

    // 4: l_p identities in the square-root space
    {
        SpaceSpec lp = SpaceSpec::a_power_law(Rational(1), Rational(2));
        std::map<int, Rational> c4, c8;
        for (int i = 1; i <= 4; ++i) c4[i] = 1;
        for (int i = 1; i <= 8; ++i) c8[i] = 1;
        Enclosure n4 = norm(BlockVector(c4), lp);
        Enclosure n8 = norm(BlockVector(c8), lp);
        Enclosure sqrt8 = kth_root_enclosure(Rational(8), 2, 80);
        Rational tol(1, 1000000000);
        bool ok4 = n4.contains(Rational(2)) && n4.width() <= tol;
        bool ok8 = n8.lo() <= sqrt8.hi() + tol && n8.hi() >= sqrt8.lo() - tol &&
                   n8.width() <= tol;
        std::ostringstream d;
        d << "norm(1^4) = " << n4.to_string() << ", norm(1^8) width " <<
            to_fraction_string(n8.width());
        report(4, "square-root space reproduces l2 values at powers", ok4 && ok8, d.str());
    }

    // 6: compose-variant isomorphism ratios
    {
        SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
        Rng rng(0xA11CE);
        std::vector<BlockVector> xs;
        for (int t = 0; t < 100; ++t) xs.push_back(random_vector(rng, rng.range(1, 8), 20));
        VerifyReport rep = verify_x2(spec, xs);
        std::ostringstream d;
        d << "ratios in [" << rep.witness.value("ratio_min", std::string("?")) << ", "
          << rep.witness.value("ratio_max", std::string("?")) << "]";
        report(6, "S_n[A_2] variant stays within factor 3", rep.pass, d.str());
    }

    // 7: height-capped search factor
    {
        VerifyReport rep = run_suite("height-fact", 100, 0xFACE);
        std::ostringstream d;
        d << rep.instances << " checks, worst slack " << rep.worst_slack.to_string();
        report(7, "full norm at most twice the height-capped value", rep.pass, d.str());
    }

    // 8: allowable-split upper estimate, exhaustive families
    {
        VerifyReport rep = run_suite("split-upper", 40, 0xBEEF);
        std::ostringstream d;
        d << rep.instances << " families, worst slack " << rep.worst_slack.to_string();
        report(8, "allowable-split upper estimate has nonnegative slack", rep.pass, d.str());
    }

    // 9: restriction construction suite
    {
        VerifyReport rep = run_suite("restriction", 100, 0xDEED);
        std::ostringstream d;
        d << rep.instances << " (tree, I) instances";
        report(9, "restriction outputs satisfy the construction contract", rep.pass, d.str());
    }

    // 10: best S_M-subset sums against brute force
    {
        bool ok = true;
        Rng rng(0x5EED);
        for (int t = 0; t < 500 && ok; ++t) {
            int s = rng.range(1, 10);
            std::map<int, Rational> w;
            int v = rng.range(1, 6);
            for (int i = 0; i < s; ++i) {
                w[v] = Rational(rng.range(0, 16), 16);
                v += rng.range(1, 4);
            }
            int M = rng.range(0, 3);
            if (max_schreier_sum(w, M) != oracle::max_schreier_sum(w, M)) ok = false;
        }
        // exhaustive supports of size <= 6 inside {1..10}
        for (unsigned mask = 1; mask < (1u << 10) && ok; ++mask) {
            if (__builtin_popcount(mask) > 6) continue;
            std::map<int, Rational> w;
            for (int i = 0; i < 10; ++i)
                if (mask & (1u << i)) w[i + 1] = Rational(1, 1 + (i % 5));
            for (int M = 0; M <= 3 && ok; ++M)
                if (max_schreier_sum(w, M) != oracle::max_schreier_sum(w, M)) ok = false;
        }
        report(10, "best S_M-subset sums equal brute force", ok);
    }

    // 11: spreading-index bracket on the basis
    {
        VerifyReport rep = run_suite("delta-bracket", 0, 2);
        report(11, "l1 spreading index within [theta_n, 2 theta_n]", rep.pass,
               rep.worst_slack.to_string());
    }

    // 12: classification of the named spaces
    {
        PSpaceParams tz = p_space_params(ThetaGen::power_law(Rational(1, 2), Rational(2)), 1024);
        PSpaceParams sc = p_space_params(ThetaGen::log_reciprocal(), 1024);
        SpaceClass c_tz = classify(tz);
        SpaceClass c_sc = classify(sc);
        bool ok = c_tz == SpaceClass::Class1 && c_sc == SpaceClass::Class2;
        report(12, "classification at horizon 2^10", ok,
               "sqrt-weights: " + to_string(c_tz) + ", log-weights: " + to_string(c_sc));
    }

    // 13: determinism of the full suite
    {
        auto run_all = [](std::uint64_t seed) {
            std::vector<Json> reports;
            for (const auto& name : suite_names())
                reports.push_back(run_suite(name, 10, seed).to_json());
            return report_merge(reports).dump();
        };
        std::string first = run_all(0xD00D);
        std::string second = run_all(0xD00D);
        report(13, "identical seeds give byte-identical merged reports", first == second);
    }

    auto t_end = std::chrono::steady_clock::now();
    std::cout << "acceptance total: "
              << std::chrono::duration<double>(t_end - t0).count() << "s, failures: "
              << failures << std::endl;
    return failures;
}
