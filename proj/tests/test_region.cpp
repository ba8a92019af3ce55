#include <doctest.h>

#include <cmath>

#include "derstab/region.hpp"
#include "derstab/stability.hpp"
#include "support.hpp"

using namespace derstab;
using namespace testsupport;

namespace {

// Single colocated pair on a one-edge feeder with diagonal gains: the
// workhorse instance whose 2x2 loop can be expanded by hand.
struct PairInstance {
    StateSpace ss;
    SparsityPattern pattern;
};

PairInstance colocated_pair(double r = 0.1, double x = 0.2) {
    auto net = parse_feeder("edge 0 1 " + std::to_string(r) + " " + std::to_string(x) + "\n");
    Placement p;
    p.sites.push_back({1, true, true});
    auto sets = build_index_sets(p, net);
    auto ss = reduce(build_open_loop(build_impedance_matrices(net), sets));
    SparsityPattern diag;
    diag.rows = 2;
    diag.cols = 2;
    diag.positions = {{0, 0}, {1, 1}};
    return {std::move(ss), std::move(diag)};
}

ParameterPolytope box_polytope(const std::vector<double>& half_widths) {
    ParameterPolytope poly;
    poly.y = static_cast<int>(half_widths.size());
    for (int i = 0; i < poly.y; ++i) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(poly.y);
        a(i) = 1.0;
        poly.rows.push_back({a, half_widths[i], i, true, 0});
        poly.rows.push_back({-a, half_widths[i], i, false, 0});
    }
    return poly;
}

bool row_present(const ParameterPolytope& poly, double a0, double a1, double b) {
    for (const auto& row : poly.rows)
        if (std::abs(row.a(0) - a0) < 1e-12 && std::abs(row.a(1) - a1) < 1e-12 &&
            std::abs(row.b - b) < 1e-12)
            return true;
    return false;
}

}  // namespace

TEST_SUITE("region") {

TEST_CASE("hand expansion of the colocated pair") {
    auto inst = colocated_pair(0.1, 0.2);  // R = 0.2, X = 0.4
    const double eps = 1e-2;
    auto poly = build_polytope(inst.ss, inst.pattern, eps);
    REQUIRE(poly.y == 2);
    // 2 rows × 2 conditions × 2 sign patterns
    CHECK(poly.rows.size() == 8);
    CHECK(poly.active_groups == std::vector<int>{1, 1});
    const double R = 0.2, X = 0.4;
    // magnitude row: X f_q ± R f_p between eps and 2-eps
    CHECK(row_present(poly, X, R, 2.0 - eps));
    CHECK(row_present(poly, X, -R, 2.0 - eps));
    CHECK(row_present(poly, -X, R, -eps));
    CHECK(row_present(poly, -X, -R, -eps));
    // angle row: X/2 f_p ± R/2 f_q
    CHECK(row_present(poly, R / 2, X / 2, 2.0 - eps));
    CHECK(row_present(poly, -R / 2, X / 2, 2.0 - eps));
    CHECK(row_present(poly, R / 2, -X / 2, -eps));
    CHECK(row_present(poly, -R / 2, -X / 2, -eps));
}

TEST_CASE("origin is cut off for positive margins") {
    auto inst = colocated_pair();
    auto poly = build_polytope(inst.ss, inst.pattern, 1e-2);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    bool violated = false;
    for (const auto& row : poly.rows)
        if (row.a.dot(origin) > row.b) violated = true;
    CHECK(violated);
}

TEST_CASE("dense 12-output instance hits the combinatorial row count") {
    // Full siting on a 6-node chain: s = 12, every off-diagonal group active.
    std::string feeder;
    for (int v = 0; v < 6; ++v)
        feeder += "edge " + std::to_string(v) + " " + std::to_string(v + 1) + " 0.02 0.04\n";
    auto net = parse_feeder(feeder);
    Placement p;
    for (int v = 1; v <= 6; ++v) p.sites.push_back({v, true, true});
    auto sets = build_index_sets(p, net);
    auto ss = reduce(build_open_loop(build_impedance_matrices(net), sets));
    auto pattern = SparsityPattern::dense(sets.d(), sets.s());
    auto poly = build_polytope(ss, pattern, 1e-2, 100000);
    CHECK(poly.rows.size() == 2 * 12 * 2048);  // 2s·2^(s-1) with s = 12
    CHECK_THROWS_AS(build_polytope(ss, pattern, 1e-2, 1000), ExplosionError);
}

TEST_CASE("expanded rows reproduce the disc geometry at random gains") {
    auto inst = colocated_pair(0.13, 0.27);
    const double eps = 2e-2;
    auto poly = build_polytope(inst.ss, inst.pattern, eps);
    Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd f(2);
        f << rng.uniform(-3, 3), rng.uniform(-3, 3);
        auto cl = closed_loop(inst.ss, GainMatrix::unpack(f, inst.pattern));
        auto discs = gershgorin(cl);
        for (int i = 0; i < 2; ++i) {
            double upper = -1e300, lower = -1e300;
            for (const auto& row : poly.rows) {
                if (row.disc_row != i) continue;
                (row.upper ? upper : lower) = std::max(row.upper ? upper : lower, row.a.dot(f));
            }
            CHECK(upper == doctest::Approx(discs[i].center + discs[i].radius).epsilon(1e-12));
            CHECK(lower == doctest::Approx(-discs[i].center + discs[i].radius).epsilon(1e-12));
        }
    }
}

TEST_CASE("unit box ball") {
    auto poly = box_polytope({1.0, 1.0});
    auto cheb = chebyshev(poly);
    CHECK(cheb.radius == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cheb.center.norm() < 1e-9);
    CHECK(cheb.active.size() >= 1);
}

TEST_CASE("classic incircle of the right triangle") {
    ParameterPolytope poly;
    poly.y = 2;
    Eigen::VectorXd a1(2), a2(2), a3(2);
    a1 << -1.0, 0.0;
    a2 << 0.0, -1.0;
    a3 << 1.0, 1.0;
    poly.rows.push_back({a1, 0.0, 0, true, 0});
    poly.rows.push_back({a2, 0.0, 1, true, 0});
    poly.rows.push_back({a3, 1.0, 2, true, 0});
    auto cheb = chebyshev(poly);
    const double expected = 1.0 / (2.0 + std::sqrt(2.0));
    CHECK(cheb.radius == doctest::Approx(expected).epsilon(1e-9));
    CHECK(cheb.center(0) == doctest::Approx(expected).epsilon(1e-7));
    CHECK(cheb.center(1) == doctest::Approx(expected).epsilon(1e-7));
    CHECK(cheb.active.size() == 3);
}

TEST_CASE("empty polytope raises InfeasibleError") {
    ParameterPolytope poly;
    poly.y = 1;
    Eigen::VectorXd a(1);
    a << 1.0;
    poly.rows.push_back({a, 0.0, 0, true, 0});
    Eigen::VectorXd na(1);
    na << -1.0;
    poly.rows.push_back({na, -1.0, 0, false, 0});  // x ≥ 1 and x ≤ 0
    CHECK_THROWS_AS(chebyshev(poly), InfeasibleError);
}

TEST_CASE("unbounded ball raises UnboundedError") {
    ParameterPolytope poly;
    poly.y = 2;
    Eigen::VectorXd a(2);
    a << 1.0, 0.0;
    poly.rows.push_back({a, 1.0, 0, true, 0});  // a half space holds balls of any radius
    CHECK_THROWS_AS(chebyshev(poly), UnboundedError);
}

TEST_CASE("grid oracle confirms the LP on random low-dimensional polytopes") {
    Rng rng(107);
    for (int trial = 0; trial < 8; ++trial) {
        int y = 2 + static_cast<int>(rng.uniform() * 3);
        ParameterPolytope poly;
        poly.y = y;
        // random slabs through a known interior point keep it bounded + feasible
        Eigen::VectorXd inside(y);
        for (int i = 0; i < y; ++i) inside(i) = rng.uniform(-0.3, 0.3);
        for (int i = 0; i < y; ++i) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(y);
            a(i) = 1.0;
            poly.rows.push_back({a, 1.0, i, true, 0});
            poly.rows.push_back({-a, 1.0, i, false, 0});
        }
        for (int k = 0; k < 2 * y; ++k) {
            Eigen::VectorXd a(y);
            for (int i = 0; i < y; ++i) a(i) = rng.uniform(-1, 1);
            if (a.norm() < 1e-3) continue;
            poly.rows.push_back({a, a.dot(inside) + rng.uniform(0.2, 1.0), k, true, 0});
        }
        auto cheb = chebyshev(poly);
        double oracle = chebyshev_grid_oracle(poly, Eigen::VectorXd::Constant(y, -1.0),
                                              Eigen::VectorXd::Constant(y, 1.0));
        CHECK(std::abs(cheb.radius - oracle) < 2e-3);
    }
}

TEST_CASE("range widths follow the mode") {
    ChebyshevResult cheb;
    cheb.center = Eigen::VectorXd::Zero(120);
    cheb.radius = 0.0275;
    auto paper = parameter_ranges(cheb, RangeMode::PaperSquare);
    CHECK(paper.front().width() == doctest::Approx(0.0389).epsilon(2e-3));

    cheb.radius = 0.1037;
    paper = parameter_ranges(cheb, RangeMode::PaperSquare);
    CHECK(paper.front().width() == doctest::Approx(0.1466).epsilon(2e-3));

    auto safe = parameter_ranges(cheb, RangeMode::SafeHypercube);
    CHECK(safe.front().width() == doctest::Approx(2.0 * 0.1037 / std::sqrt(120.0)).epsilon(1e-12));
    CHECK(safe.front().width() == doctest::Approx(0.0189).epsilon(2e-3));

    cheb.radius = 0.0;
    CHECK_THROWS_AS(parameter_ranges(cheb, RangeMode::SafeHypercube), DegenerateError);
}

TEST_CASE("safe-hypercube corners stay inside the ball hence the polytope") {
    auto inst = colocated_pair(0.08, 0.22);
    auto poly = build_polytope(inst.ss, inst.pattern, 1e-2);
    auto cheb = chebyshev(poly);
    auto ranges = parameter_ranges(cheb, RangeMode::SafeHypercube);
    const int y = poly.y;
    // analytic containment: corner distance = sqrt(y)·(w/2) = radius
    double corner_dist = std::sqrt(double(y)) * ranges.front().width() / 2.0;
    CHECK(corner_dist == doctest::Approx(cheb.radius).epsilon(1e-12));
    Rng rng(109);
    for (int k = 0; k < 200; ++k) {
        Eigen::VectorXd f(y);
        for (int i = 0; i < y; ++i) f(i) = rng.uniform() < 0.5 ? ranges[i].lo : ranges[i].hi;
        for (const auto& row : poly.rows) CHECK(row.a.dot(f) <= row.b + 1e-9);
    }
}

TEST_CASE("chebyshev center passes the disc check with the built margin") {
    auto inst = colocated_pair(0.15, 0.31);
    const double eps = 1e-2;
    auto poly = build_polytope(inst.ss, inst.pattern, eps);
    auto cheb = chebyshev(poly);
    auto gain = GainMatrix::unpack(cheb.center, inst.pattern);
    CHECK(check_region(closed_loop(inst.ss, gain), eps));
}

TEST_CASE("sampling policies pick the advertised points") {
    std::vector<ParameterRange> ranges{{-1.0, 3.0}, {0.0, 2.0}, {-4.0, -2.0}, {1.0, 5.0}};
    SparsityPattern pattern;
    pattern.rows = 2;
    pattern.cols = 2;
    pattern.positions = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

    auto mid = sample_gain(ranges, pattern, GainPolicy::Midpoint);
    CHECK(mid.F(0, 0) == 1.0);
    CHECK(mid.F(1, 1) == 3.0);
    auto upper = sample_gain(ranges, pattern, GainPolicy::Upper);
    CHECK(upper.F(0, 0) == 3.0);
    CHECK(upper.F(0, 1) == 2.0);
    auto lower = sample_gain(ranges, pattern, GainPolicy::Lower);
    CHECK(lower.F(1, 0) == -4.0);

    // quadrant schedules: Q11 = magnitude→reactive rows, Q21 = magnitude→real
    auto voltreg = sample_gain(ranges, pattern, GainPolicy::VoltRegPeak);
    CHECK(voltreg.F(0, 0) == 3.0);   // Q11 at upper
    CHECK(voltreg.F(0, 1) == 1.0);   // Q12 at midpoint
    CHECK(voltreg.F(1, 0) == -3.0);  // Q21 at midpoint
    auto realpeak = sample_gain(ranges, pattern, GainPolicy::RealPowerPeak);
    CHECK(realpeak.F(1, 0) == -4.0);  // Q21 at lower
    CHECK(realpeak.F(0, 0) == 1.0);   // Q11 at midpoint
}

TEST_CASE("midpoint samples from safe ranges keep the disc margin") {
    Rng rng(113);
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = colocated_pair(rng.uniform(0.05, 0.2), rng.uniform(0.1, 0.4));
        const double eps = 1e-2;
        auto poly = build_polytope(inst.ss, inst.pattern, eps);
        auto cheb = chebyshev(poly);
        auto ranges = parameter_ranges(cheb, RangeMode::SafeHypercube);
        for (int k = 0; k < 50; ++k) {
            Eigen::VectorXd f(poly.y);
            for (int i = 0; i < poly.y; ++i) f(i) = rng.uniform(ranges[i].lo, ranges[i].hi);
            CHECK(check_region(closed_loop(inst.ss, GainMatrix::unpack(f, inst.pattern)), eps));
        }
    }
}

}  // TEST_SUITE
