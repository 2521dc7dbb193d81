#include <doctest.h>

#include "tsl/cli.hpp"
#include "tsl/report.hpp"
#include "tsl/estimates.hpp"
#include "tsl/rng.hpp"
#include "tsl/sampling.hpp"
#include "tsl/schreier.hpp"

using namespace tsl;

namespace {

AverageCert basis_average(int from, int count, int M, Rational eps) {
    AverageCert c;
    for (int i = 0; i < count; ++i) {
        c.blocks.push_back(BlockVector::basis(from + i));
        c.coeffs.push_back(Rational(1, count));
    }
    c.M = M;
    c.eps = eps;
    return c;
}

}  // namespace

TEST_CASE("prune keeps deep leaves and bounds the loss") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    AverageCert cert = basis_average(8, 8, 1, Rational(1, 3));
    BlockVector x = cert.combined();
    // all leaves at order >= 1: unchanged
    NormingTree deep{NormNode::internal(
        1, {NormNode::leaf(8), NormNode::leaf(9), NormNode::leaf(10)})};
    auto [t1, loss1] = prune_tree(deep, cert, 1, spec);
    REQUIRE(t1.has_value());
    CHECK(loss1.lo() == 0);
    // a single leaf of order 0 vanishes entirely
    NormingTree leaf{NormNode::leaf(8)};
    auto [t2, loss2] = prune_tree(leaf, cert, 1, spec);
    CHECK_FALSE(t2.has_value());
    CHECK(loss2.lo() == Rational(1, 8));
    CHECK(loss2.lo() <= 2 * cert.eps);
    // randomized: loss <= 2 eps always
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        NormingTree f = random_norming_tree(rng, x, spec);
        auto [pruned, loss] = prune_tree(f, cert, 1, spec);
        CHECK(loss.lo() <= 2 * cert.eps);
        if (pruned) CHECK(validate_tree(*pruned, spec).empty());
    }
}

TEST_CASE("regroup keeps validity and the weight inequality") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    REQUIRE(spec.clubsuit_holds(10));
    // 4-child node of weight index 2 over a far-out support
    NormingTree f{NormNode::internal(2, {NormNode::leaf(8), NormNode::leaf(9),
                                         NormNode::leaf(10), NormNode::leaf(11)})};
    REQUIRE(validate_tree(f, spec).empty());
    BlockVector x({{8, Rational(1)}, {9, Rational(1)}, {10, Rational(1)}, {11, Rational(1)}});
    for (int k = 0; k <= 2; ++k) {
        NormingTree g = regroup_node(f, {}, k, spec);
        CHECK(validate_tree(g, spec).empty());
        if (k == 0 || k == 2) {
            CHECK(evaluate(g, x, spec).lo() == evaluate(f, x, spec).lo());
        } else {
            // inserted layer: root weight 1, children weight 1
            CHECK(g.root.weight_index == 1);
            for (const auto& c : g.root.children) CHECK(c.weight_index == 1);
            // value never increases (supermultiplicativity)
            CHECK(evaluate(g, x, spec).lo() <= evaluate(f, x, spec).lo());
        }
    }
    CHECK_THROWS_AS(regroup_node(f, {}, 3, spec), PreconditionFailed);
}

TEST_CASE("allowable split upper estimate, exhaustive at height 1") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    for (long long start : {4, 6, 8, 10}) {
        BasisSupply supply(start);
        AveragingTree tree = build_averaging_tree(supply, 1, Rational(2) / start + 1);
        VerifyReport rep = verify_theta1(tree, 0, spec);
        CHECK(rep.pass);
        CHECK_FALSE(rep.sampled);
        CHECK(rep.instances > 0);
    }
}

TEST_CASE("allowable split estimate, sampled certified mode at height 2") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    BuildOptions opts;
    opts.power_of_two = true;
    BasisSupply supply(1);
    AveragingTree tree = build_averaging_tree(supply, 2, Rational(3, 4), opts);
    for (int j : {0, 1}) {
        Theta1Options topts;
        topts.samples = 25;
        topts.seed = 5;
        VerifyReport rep = verify_theta1(tree, j, spec, topts);
        CHECK(rep.sampled);
        CHECK(rep.pass);
    }
}

TEST_CASE("height fact on spec examples") {
    VerifyReport r1 = verify_height_fact(BlockVector::basis(9), 1, Rational(1, 2));
    CHECK(r1.pass);
    std::map<int, Rational> c;
    for (int i = 3; i <= 5; ++i) c[i] = Rational(1);
    VerifyReport r2 = verify_height_fact(BlockVector(c), 1, Rational(1, 2));
    CHECK(r2.pass);
    CHECK(r2.witness["full"] == "3/2");
    CHECK(r2.witness["capped"] == "3/2");
    CHECK_THROWS_AS(verify_height_fact(BlockVector({{1, Rational(1)}, {2, Rational(1)}}), 2,
                                       Rational(1, 2)),
                    PreconditionFailed);
}

TEST_CASE("compose isomorphism ratio bounds") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    Rng rng(9);
    std::vector<BlockVector> xs;
    xs.push_back(BlockVector::basis(5));  // ratio exactly 1
    for (int t = 0; t < 25; ++t) xs.push_back(random_vector(rng, rng.range(1, 7), 18));
    VerifyReport rep = verify_x2(spec, xs);
    CHECK(rep.pass);
    CHECK(rep.witness.contains("ratio_min"));
}

TEST_CASE("ris average upper bound with empirical constants") {
    VerifyReport rep = run_suite("ris-average", 1, 3);
    CHECK(rep.pass);
    CHECK(rep.witness.contains("empirical_D"));
    CHECK(rep.witness["hypothesis_eps_below_thetaM"].is_boolean());
}

TEST_CASE("report merge") {
    VerifyReport a;
    a.lemma = "height-cap-factor";
    a.params = Json{{"M", 1}};
    a.instances = 3;
    a.worst_slack = Enclosure::exact(Rational(1, 2));
    a.pass = true;
    VerifyReport b = a;
    b.worst_slack = Enclosure::exact(Rational(1, 4));
    VerifyReport c;
    c.lemma = "prune-loss";
    c.params = Json{{"M", 2}};
    c.instances = 1;
    c.worst_slack = Enclosure::exact(Rational(2));
    c.pass = true;
    // identity merge
    Json m1 = report_merge({a.to_json()});
    CHECK(m1["reports"].size() == 1);
    CHECK(m1["global"]["all_pass"] == true);
    // same lemma, same params: folded into one row with the worse slack
    Json m2 = report_merge({a.to_json(), b.to_json()});
    CHECK(m2["reports"].size() == 1);
    CHECK(m2["reports"][0]["instances"] == 6);
    CHECK(m2["reports"][0]["worst_slack"] == "1/4");
    // disjoint lemmas: union
    Json m3 = report_merge({a.to_json(), c.to_json()});
    CHECK(m3["reports"].size() == 2);
    // same lemma, different params: separate rows keyed by parameter hash
    VerifyReport d = a;
    d.params = Json{{"M", 7}};
    Json m4 = report_merge({a.to_json(), d.to_json()});
    CHECK(m4["reports"].size() == 2);
    CHECK(m4["reports"][0]["param_hash"] != m4["reports"][1]["param_hash"]);
}
