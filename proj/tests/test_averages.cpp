#include <doctest.h>

#include "tsl/averages.hpp"
#include "tsl/json_io.hpp"
#include "tsl/rng.hpp"
#include "tsl/sampling.hpp"

using namespace tsl;

namespace {

AverageCert uniform_basis_cert(int from, int count, int M, Rational eps) {
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

TEST_CASE("average certificate checks") {
    // (1/4) sum of e_4..e_7: S_0 mass 1/4
    CHECK(check_average(uniform_basis_cert(4, 4, 1, Rational(3, 10))).ok);
    CHECK_FALSE(check_average(uniform_basis_cert(4, 4, 1, Rational(1, 5))).ok);
    // degenerate M = 0 average
    AverageCert single;
    single.blocks.push_back(BlockVector::basis(5));
    single.coeffs.push_back(Rational(1));
    single.M = 0;
    single.eps = Rational(1, 100);
    CHECK(check_average(single).ok);
    // monotone in eps, antitone in M
    AverageCert c = uniform_basis_cert(4, 4, 1, Rational(3, 10));
    c.eps = Rational(9, 10);
    CHECK(check_average(c).ok);
    c.M = 2;
    CHECK(check_average(c).ok);
    // malformed: overlapping blocks
    AverageCert bad = uniform_basis_cert(4, 2, 1, Rational(1, 2));
    bad.blocks[1] = BlockVector::basis(4);
    CHECK_THROWS_AS(check_average(bad), MalformedDecomposition);
}

TEST_CASE("build height-1 averages") {
    BasisSupply supply(8);
    AveragingTree t = build_averaging_tree(supply, 1, Rational(1, 2));
    CHECK(t.height() == 1);
    CHECK(t.root().weight > 4);  // N > 2/eps
    CHECK(t.root().vec.min_supp() >= t.root().weight);
    CHECK(check_averaging_tree(t).empty());
    AverageCheck root = check_average(t.node_cert(1, 0));
    CHECK(root.ok);
    // M = 0: single supplied vector
    BasisSupply s2(3);
    AveragingTree t0 = build_averaging_tree(s2, 0, Rational(1, 2));
    CHECK(t0.height() == 0);
    CHECK(t0.levels[0].size() == 1);
}

TEST_CASE("build power-of-two height-2 tree and verify all conditions") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    Rational thetaM = spec.thetas.theta_exact(2).value();
    BuildOptions opts;
    opts.power_of_two = true;
    opts.restriction_theta = thetaM;
    Rational eps = Rational(2) / thetaM + 1;  // strengthened schedule follows from the chain
    BasisSupply supply(1);
    AveragingTree t = build_averaging_tree(supply, 2, eps, opts);
    CHECK(t.height() == 2);
    CHECK(t.levels[1].size() == 4);
    CHECK(t.levels[0].size() == 16932);
    for (const auto& n : t.levels[1]) CHECK((n.weight & (n.weight - 1)) == 0);
    CHECK(check_averaging_tree(t, thetaM * eps).empty());
}

TEST_CASE("supply exhaustion and floors") {
    std::vector<BlockVector> pool{BlockVector::basis(3), BlockVector::basis(4)};
    VectorSupply supply(pool);
    CHECK_THROWS_AS(build_averaging_tree(supply, 1, Rational(1, 2)), SupplyExhausted);
}

TEST_CASE("restriction: identity selection reproduces the tree") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    Rng rng(3);
    RestrictionInstance inst;
    inst.level = 0;
    // explicit small instance: height 1
    BuildOptions opts;
    opts.power_of_two = true;
    opts.restriction_theta = Rational(1, 2);
    BasisSupply supply(4);
    AveragingTree t = build_averaging_tree(supply, 1, Rational(4), opts);
    AveragingTree y = restrict_average(t, 1, {1});
    CHECK(y.height() == 1);
    CHECK_FALSE(y.root_child_count_exception);
    CHECK(y.root().vec == t.root().vec);
    CHECK(check_restriction_properties(t, 1, {1}, y, spec).empty());
}

TEST_CASE("restriction: proper selections on a height-2 tree") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    Rational thetaM = Rational(1, 4);
    BuildOptions opts;
    opts.power_of_two = true;
    opts.restriction_theta = thetaM;
    Rational eps = Rational(2) / thetaM + 1;
    BasisSupply supply(1);
    AveragingTree t = build_averaging_tree(supply, 2, eps, opts);

    for (std::vector<int> I : {std::vector<int>{1, 3}, std::vector<int>{2},
                               std::vector<int>{2, 4}, std::vector<int>{1, 2, 3, 4}}) {
        AveragingTree y = restrict_average(t, 1, I);
        auto violations = check_restriction_properties(t, 1, I, y, spec);
        for (const auto& v : violations) MESSAGE(v);
        CHECK(violations.empty());
        // root eps is the selected node's error
        CHECK(y.declared_eps == t.levels[1][I.front() - 1].eps);
    }
    // identity at the top level
    AveragingTree y2 = restrict_average(t, 2, {1});
    CHECK(check_restriction_properties(t, 2, {1}, y2, spec).empty());
    CHECK(y2.root().vec == t.root().vec);
    // non-integer mass precondition needs a tree whose first selected weight
    // times the mass is fractional; here W * k/4 is always integral, so
    // check the error path with a malformed selection instead
    CHECK_THROWS_AS(restrict_average(t, 1, {5}), PreconditionFailed);
    CHECK_THROWS_AS(restrict_average(t, 3, {1}), PreconditionFailed);
    CHECK_THROWS_AS(restrict_average(t, 1, std::vector<int>{}), PreconditionFailed);
}

TEST_CASE("restriction integrality gate") {
    // height-1 tree with root weight 8; selecting at level 0 is not allowed,
    // so build a height-2 tree with flat leaves and pick a selection whose
    // mass times the first weight is non-integral: with all weights powers
    // of two and masses 1/4 the gate can only trip when W < 4; exercise the
    // error by handing a doctored coefficient instead
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    BuildOptions opts;
    opts.power_of_two = true;
    opts.restriction_theta = Rational(1, 4);
    BasisSupply supply(1);
    AveragingTree t = build_averaging_tree(supply, 2, Rational(2) / Rational(1, 4) + 1, opts);
    t.levels[1][0].coeff = Rational(1, 3);  // break dyadicity upstream
    t.levels[0][0].coeff = Rational(1, 3);
    CHECK_THROWS_AS(restrict_average(t, 1, {1}), NonDyadicCoefficient);
}

TEST_CASE("antichain functional validates in the theta-Tsirelson space") {
    SpaceSpec geo = SpaceSpec::schreier_geometric(Rational(1, 2));
    BuildOptions opts;
    opts.power_of_two = true;
    opts.restriction_theta = Rational(1, 4);
    BasisSupply supply(1);
    AveragingTree t = build_averaging_tree(supply, 2, Rational(9), opts);
    AveragingTree y = restrict_average(t, 1, {2, 3});
    // antichain: all leaf bundles
    std::vector<std::pair<int, int>> F;
    for (int k = 0; k < static_cast<int>(y.levels[0].size()); ++k) F.emplace_back(0, k);
    NormingTree f = antichain_functional(y, F);
    CHECK(validate_tree(f, geo).empty());
    // root alone
    NormingTree froot = antichain_functional(y, {{y.height(), 0}});
    CHECK(froot.root.is_leaf());
    // mixed-level antichain
    if (y.levels[0].size() >= 2) {
        NormingTree fmix = antichain_functional(y, {{0, 0}, {0, 1}});
        CHECK(validate_tree(fmix, geo).empty());
    }
    CHECK_THROWS_AS(antichain_functional(y, {{1, 0}, {0, 0}}), Error);
}

TEST_CASE("special average rows") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    BasisSupply supply(8);
    AveragingTree t = build_averaging_tree(supply, 1, Rational(1, 3));
    AverageCert cert = t.node_cert(1, 0);
    auto rep = check_special_average(cert, spec, Rational(2));
    REQUIRE(rep.rows.size() == 2);
    // j = 0: the sup is the norm itself = 1/2; theta^(M-0) = 1/2
    CHECK(rep.rows[0].split_sup.lo() == Rational(1, 2));
    CHECK(rep.rows[0].within);
    // j = 1: full split into singletons reaches mass 1
    CHECK(rep.rows[1].split_sup.lo() == 1);
    CHECK(rep.rows[1].within);
    CHECK(rep.empirical_D.lo() == 1);
    // D < 1 fails at j = 0 unless equality
    auto tight = check_special_average(cert, spec, Rational(9, 10));
    CHECK_FALSE(tight.rows[0].within);
}

TEST_CASE("tsirelson average bound on basis blocks") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    std::vector<BlockVector> blocks;
    for (int i = 4; i <= 15; ++i) blocks.push_back(BlockVector::basis(i));
    std::vector<FiniteSet> gs{{4, 5, 6, 7}, {5, 6, 7, 8, 9}, {8}};
    std::vector<std::vector<Rational>> coeffs{
        {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)},
        {Rational(1), Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(1, 7)}};
    auto res = check_tsirelson_average(blocks, spec, 1, gs, coeffs);
    CHECK(res.ok);
    CHECK(res.worst_ratio.lo() >= 1);
    // single block, G singleton: 1 >= 1/4
    auto one = check_tsirelson_average(blocks, spec, 0, {FiniteSet{4}}, {{Rational(1)}});
    CHECK(one.ok);
}

TEST_CASE("ris condition arithmetic") {
    SpaceSpec spec = SpaceSpec::schreier_geometric(Rational(1, 2), true);
    AverageCert c1;
    c1.blocks.push_back(BlockVector::basis(8));
    c1.coeffs.push_back(Rational(1));
    c1.M = 0;
    c1.eps = Rational(1, 2);
    // single element: vacuous
    CHECK(check_ris({c1}, {16}, Rational(1, 2), spec));
    AverageCert c2;
    c2.blocks.push_back(BlockVector::basis(20));
    c2.coeffs.push_back(Rational(1));
    c2.M = 0;
    c2.eps = Rational(1, 2);
    // theta_(l_2) * l1(x_1) <= eps/4 with l_2 = 4: 1/16 <= 1/8 -> true
    CHECK(check_ris({c1, c2}, {16, 16}, Rational(1, 2), spec));
    // eps = 1/16 -> requires 1/16 <= 1/64: false
    CHECK_FALSE(check_ris({c1, c2}, {16, 16}, Rational(1, 16), spec));
}

TEST_CASE("averaging tree json round trip") {
    BasisSupply supply(4);
    AveragingTree t = build_averaging_tree(supply, 1, Rational(1, 2));
    Json j = averaging_tree_to_json(t);
    AveragingTree back = averaging_tree_from_json(j);
    CHECK(averaging_tree_to_json(back) == j);
    CHECK(check_averaging_tree(back).empty());
}
