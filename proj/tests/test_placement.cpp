#include <doctest.h>

#include "derstab/placement.hpp"
#include "support.hpp"

using namespace derstab;
using namespace testsupport;

TEST_SUITE("placement") {

TEST_CASE("selector columns are basis vectors") {
    auto g = selector({2}, 3);
    Eigen::MatrixXd m = g.matrix();
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 1);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(1, 0) == 1.0);
    CHECK(m(2, 0) == 0.0);

    auto g2 = selector({1, 3}, 4);
    Eigen::MatrixXd m2 = g2.matrix();
    CHECK(m2(0, 0) == 1.0);
    CHECK(m2(2, 1) == 1.0);
    CHECK(m2.sum() == 2.0);
}

TEST_CASE("selector rejects out-of-range and unordered indices") {
    CHECK_THROWS_AS(selector({5}, 4), DimensionError);
    CHECK_THROWS_AS(selector({2, 2}, 4), DimensionError);
    CHECK_THROWS_AS(selector({3, 1}, 4), DimensionError);
    CHECK_THROWS_AS(selector({0}, 4), DimensionError);
}

TEST_CASE("selector transpose is its Moore-Penrose inverse") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        int c = 2 + static_cast<int>(rng.uniform() * 10);
        std::vector<int> omega;
        for (int i = 1; i <= c; ++i)
            if (rng.uniform() < 0.5) omega.push_back(i);
        if (omega.empty()) omega.push_back(1);
        auto g = selector(omega, c).matrix();
        Eigen::MatrixXd gram = g.transpose() * g;
        CHECK(gram.isApprox(Eigen::MatrixXd::Identity(omega.size(), omega.size())));
    }
}

TEST_CASE("index sets for a 2-node chain with one full site") {
    auto net = parse_feeder("edge 0 1 0.1 0.1\nedge 1 2 0.1 0.1\n");
    Placement p;
    p.sites.push_back({1, true, true});
    auto sets = build_index_sets(p, net);
    CHECK(sets.m == 2);
    CHECK(sets.D == std::vector<int>{1, 3});
    CHECK(sets.S == std::vector<int>{1, 3});
    auto sel = build_selectors(sets);
    Eigen::MatrixXd td = sel.der.matrix();
    REQUIRE(td.rows() == 2);
    REQUIRE(td.cols() == 1);
    CHECK(td(0, 0) == 1.0);
    CHECK(td(1, 0) == 0.0);
}

TEST_CASE("set arithmetic for a mixed siting") {
    auto net = parse_feeder("edge 0 1 0.1 0.1\nedge 1 2 0.1 0.1\nedge 2 3 0.1 0.1\n");
    Placement p;
    p.sites.push_back({1, true, false});
    p.sites.push_back({2, true, true});
    auto sets = build_index_sets(p, net);
    CHECK(sets.D == std::vector<int>{1, 2, 4, 5});
    CHECK(sets.S == std::vector<int>{2, 5});
    auto sel = build_selectors(sets);
    // S∩D = {2,5}, S∩D̄ = ∅: the first two permutation columns pick 2 and 5.
    CHECK(sel.reorder.basis[0] == 2);
    CHECK(sel.reorder.basis[1] == 5);
    CHECK(sel.reorder.is_permutation());
}

TEST_CASE("assumption S subset of D is enforced when required") {
    auto net = parse_feeder("edge 0 1 0.1 0.1\nedge 1 2 0.1 0.1\n");
    Placement p;
    p.sites.push_back({1, false, true});
    p.sites.push_back({2, true, false});
    auto sets = build_index_sets(p, net);
    CHECK_FALSE(sets.sensors_subset_of_ders());
    CHECK_THROWS_AS(build_selectors(sets), AssumptionError);
    CHECK_NOTHROW(build_selectors(sets, false));
}

TEST_CASE("reorder times observable selector equals sensor selector") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 9);
        auto net = random_tree(rng, n);
        auto p = random_placement(rng, n);
        auto sets = build_index_sets(p, net);
        auto sel = build_selectors(sets);
        Eigen::MatrixXd tg = sel.reorder.matrix().leftCols(sets.s());
        CHECK(tg.isApprox(sel.sensor.matrix()));
    }
}

TEST_CASE("reorder is orthogonal") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 9);
        auto net = random_tree(rng, n);
        auto sets = build_index_sets(random_placement(rng, n), net);
        auto sel = build_selectors(sets);
        REQUIRE(sel.reorder.is_permutation());
        Eigen::MatrixXd t = sel.reorder.matrix();
        CHECK((t.transpose() * t).isApprox(Eigen::MatrixXd::Identity(2 * sets.m, 2 * sets.m)));
        Eigen::VectorXd v(2 * sets.m);
        for (int i = 0; i < v.size(); ++i) v(i) = rng.uniform(-1, 1);
        CHECK((t * (t.transpose() * v)).isApprox(v));
    }
}

TEST_CASE("der selector projection fixes vectors supported on DER nodes") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 9);
        auto net = random_tree(rng, n);
        auto sets = build_index_sets(random_placement(rng, n), net);
        auto sel = build_selectors(sets);
        Eigen::MatrixXd td = sel.der.matrix();
        Eigen::VectorXd supported = Eigen::VectorXd::Zero(sets.m);
        for (int ch : sets.D1) supported(ch - 1) = rng.uniform(-2, 2);
        CHECK((td * (td.transpose() * supported)).isApprox(supported, 1e-14));
    }
}

TEST_CASE("removing a full site shrinks S by two and keeps order") {
    auto net = parse_feeder(
        "edge 0 1 0.1 0.1\nedge 1 2 0.1 0.1\nedge 2 3 0.1 0.1\nedge 3 4 0.1 0.1\n");
    Placement p;
    for (int v : {1, 2, 4}) p.sites.push_back({v, true, true});
    auto before = build_index_sets(p, net);
    Placement smaller;
    for (int v : {1, 4}) smaller.sites.push_back({v, true, true});
    auto after = build_index_sets(smaller, net);
    CHECK(after.s() == before.s() - 2);
    CHECK(after.S == std::vector<int>{1, 4, 5, 8});
}

TEST_CASE("placement file round trip") {
    auto p = parse_placement(
        "# siting\n"
        "site 3 der=1 sensor=1\n"
        "site 5 der=1 sensor=0\n"
        "link 5 3\n");
    CHECK(p.der_nodes() == std::vector<int>{3, 5});
    CHECK(p.sensor_nodes() == std::vector<int>{3});
    REQUIRE(p.links.size() == 1);
    CHECK(p.links[0] == std::pair<int, int>{5, 3});
}

TEST_CASE("placement file rejects bad input") {
    CHECK_THROWS_AS(parse_placement("site 1 der=1 sensor=1\nsite 1 der=0 sensor=0\n"), ParseError);
    CHECK_THROWS_AS(parse_placement("site 0 der=1 sensor=1\n"), ParseError);
    CHECK_THROWS_AS(parse_placement("site 1 der=1 rover=1\n"), ParseError);
    CHECK_THROWS_AS(parse_placement("site 1 der=1 sensor=0\nlink 1 1\n"), ParseError);
}

TEST_CASE("sites outside the network are rejected") {
    auto net = parse_feeder("edge 0 1 0.1 0.1\n");
    Placement p;
    p.sites.push_back({2, true, true});
    CHECK_THROWS_AS(build_index_sets(p, net), IndexError);
}

}  // TEST_SUITE
