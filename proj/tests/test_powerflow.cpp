#include <doctest.h>

#include "derstab/powerflow.hpp"
#include "support.hpp"

using namespace derstab;
using namespace testsupport;

TEST_SUITE("powerflow") {

TEST_CASE("zero injections keep the substation profile") {
    auto net = parse_feeder("edge 0 1 0.02 0.04\nedge 1 2 0.02 0.04\n");
    auto res = sweep_power_flow(net, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2));
    CHECK(res.v_mag(0) == 1.0);
    CHECK(res.v_mag(1) == 1.0);
    CHECK(res.angle(0) == 0.0);
    CHECK(res.iterations <= 2);
}

TEST_CASE("generation raises voltage, load lowers it") {
    auto net = parse_feeder("edge 0 1 0.02 0.04\nedge 1 2 0.02 0.04\n");
    Eigen::VectorXd p(2), q = Eigen::VectorXd::Zero(2);
    p << 0.0, 0.05;
    auto gen = sweep_power_flow(net, p, q);
    CHECK(gen.v_mag(1) > 1.0);
    auto load = sweep_power_flow(net, Eigen::VectorXd(-p), q);
    CHECK(load.v_mag(1) < 1.0);
}

TEST_CASE("small injections agree with the linear model") {
    Rng rng(127);
    for (int trial = 0; trial < 15; ++trial) {
        int n = 3 + static_cast<int>(rng.uniform() * 8);
        auto net = random_tree(rng, n);
        auto mats = build_impedance_matrices(net);
        Eigen::VectorXd p(n), q(n);
        for (int i = 0; i < n; ++i) {
            p(i) = rng.uniform(-0.01, 0.01);
            q(i) = rng.uniform(-0.01, 0.01);
        }
        auto res = sweep_power_flow(net, p, q);
        Eigen::VectorXd v_lin = (mats.R * p + mats.X * q).array() + 1.0;
        Eigen::VectorXd d_lin = 0.5 * (mats.X * p - mats.R * q);
        for (int i = 0; i < n; ++i) {
            CHECK(res.v_mag(i) == doctest::Approx(std::sqrt(v_lin(i))).epsilon(5e-3));
            CHECK(res.angle(i) == doctest::Approx(d_lin(i)).epsilon(0).scale(1).epsilon(5e-3));
        }
    }
}

TEST_CASE("substation voltage and angle offsets propagate") {
    auto net = parse_feeder("v0 1.0404\ndelta0 0.1\nedge 0 1 0.02 0.04\n");
    auto res = sweep_power_flow(net, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    CHECK(res.v_mag(0) == doctest::Approx(1.02).epsilon(1e-12));
    CHECK(res.angle(0) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("absurd load reports divergence") {
    auto net = parse_feeder("edge 0 1 0.2 0.4\n");
    Eigen::VectorXd p(1), q(1);
    p << -50.0;
    q << 0.0;
    CHECK_THROWS_AS(sweep_power_flow(net, p, q), PowerFlowDiverged);
}

TEST_CASE("three-phase channels are swept independently when decoupled") {
    auto net = parse_feeder("phases 3\nedge 0 1 0.02 0.04\n");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(3), q = Eigen::VectorXd::Zero(3);
    p(net.channel_of(1, 1)) = 0.05;  // inject on phase b only
    auto res = sweep_power_flow(net, p, q);
    CHECK(res.v_mag(net.channel_of(1, 1)) > 1.0);
    CHECK(res.v_mag(net.channel_of(1, 0)) == 1.0);
    CHECK(res.v_mag(net.channel_of(1, 2)) == 1.0);
}

TEST_CASE("wrong injection size is rejected") {
    auto net = parse_feeder("edge 0 1 0.02 0.04\n");
    CHECK_THROWS_AS(sweep_power_flow(net, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)),
                    DimensionError);
}

}  // TEST_SUITE
