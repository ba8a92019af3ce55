#pragma once

// Shared generators and independent oracles for the test suites. Oracles here
// must stay independent of the library code paths they check: the path-walk
// oracle enumerates edge sets explicitly, the Chebyshev oracle is a refining
// grid search, eigenvalues for multiset checks come straight from Eigen.

#include <algorithm>
#include <complex>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include <doctest.h>

#include <Eigen/Dense>

#include "derstab/placement.hpp"
#include "derstab/profiles.hpp"
#include "derstab/region.hpp"
#include "derstab/system.hpp"

namespace testsupport {

using namespace derstab;

inline RadialNetwork random_tree(Rng& rng, int n, int phase_count = 1) {
    std::vector<Edge> edges;
    for (int v = 1; v <= n; ++v) {
        Edge e;
        e.from = v == 1 ? 0 : static_cast<int>(rng.uniform() * v);  // any earlier node
        e.to = v;
        e.r = rng.uniform(0.02, 0.3);
        e.x = rng.uniform(0.03, 0.5);
        edges.push_back(e);
    }
    return RadialNetwork(n, std::move(edges), phase_count);
}

/// Random siting with sensors a subset of DER nodes (never empty).
inline Placement random_placement(Rng& rng, int n) {
    std::vector<int> ders;
    for (int v = 1; v <= n; ++v)
        if (rng.uniform() < 0.5) ders.push_back(v);
    if (ders.empty()) ders.push_back(1 + static_cast<int>(rng.uniform() * n));
    std::vector<int> sensors;
    for (int d : ders)
        if (rng.uniform() < 0.6) sensors.push_back(d);
    if (sensors.empty()) sensors.push_back(ders[static_cast<int>(rng.uniform() * ders.size())]);

    Placement p;
    std::set<int> sensor_set(sensors.begin(), sensors.end());
    for (int d : ders) p.sites.push_back({d, true, sensor_set.count(d) > 0});
    return p;
}

inline SparsityPattern random_pattern(Rng& rng, int rows, int cols, double keep = 0.5) {
    SparsityPattern p;
    p.rows = rows;
    p.cols = cols;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (rng.uniform() < keep) p.positions.push_back({r, c});
    if (p.positions.empty())
        p.positions.push_back({static_cast<int>(rng.uniform() * rows),
                               static_cast<int>(rng.uniform() * cols)});
    return p;
}

/// Random pattern that always lets every sensor drive its colocated DER
/// (which exists under S ⊆ D). The colocated reactance is strictly positive,
/// so the reduced loop determinant is a nonzero polynomial of the gain values
/// and random draws are nonsingular generically; without this a sensor that
/// shares no path with any linked DER makes H̄ structurally singular.
inline SparsityPattern random_pattern_colocated(Rng& rng, const IndexSets& sets,
                                                double keep = 0.5) {
    SparsityPattern p = random_pattern(rng, sets.d(), sets.s(), keep);
    const int half_d = sets.d() / 2;
    const int half_s = sets.s() / 2;
    for (int c = 0; c < half_s; ++c) {
        auto slot = std::find(sets.D1.begin(), sets.D1.end(), sets.S1[c]);
        REQUIRE(slot != sets.D1.end());
        int k = static_cast<int>(slot - sets.D1.begin());
        p.positions.push_back({k, c});                      // reactive from magnitude error
        p.positions.push_back({k + half_d, c + half_s});    // real from angle error
    }
    p.normalize();
    return p;
}

inline GainMatrix random_gain(Rng& rng, const SparsityPattern& pattern, double scale = 1.0) {
    Eigen::VectorXd f(pattern.size());
    for (int t = 0; t < pattern.size(); ++t) f(t) = rng.uniform(-scale, scale);
    return GainMatrix::unpack(f, pattern);
}

/// Random gain re-drawn until the reduced loop matrix is safely nonsingular,
/// keeping the zero eigenvalue of the full loop semisimple. Dense eigensolvers
/// resolve defective zero clusters only to ~‖H‖·√ε, so multiset comparisons at
/// 1e-9..1e-8 need this; the exact structural identity is tested separately
/// without any such restriction.
inline GainMatrix random_gain_solver_friendly(Rng& rng, const SparsityPattern& pattern,
                                              const StateSpace& ss, double scale = 1.0) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        GainMatrix gain = random_gain(rng, pattern, scale);
        Eigen::MatrixXd h_red = ss.B_red * gain.F * ss.C_red;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(h_red);
        if (svd.singularValues().size() == 0) continue;
        double smin = svd.singularValues().tail(1)(0);
        double smax = svd.singularValues()(0);
        if (smax > 0 && smin > 1e-5 * smax) return gain;
    }
    FAIL("could not draw a nonsingular reduced loop for this pattern");
    return random_gain(rng, pattern, scale);
}

// ---- cluster instances (DER-sensor pairs in the glossary sense) ----------

/// One sensor tracked by one or more DERs; clusters own their DERs
/// exclusively so removing a pair deletes whole rows/columns of the loop.
struct Cluster {
    int sensor_node = 0;
    std::vector<int> der_nodes;  // includes the sensor node itself
};

inline std::vector<Cluster> random_clusters(Rng& rng, int n, int count) {
    std::vector<int> nodes(n);
    for (int v = 0; v < n; ++v) nodes[v] = v + 1;
    for (int v = n - 1; v > 0; --v)
        std::swap(nodes[v], nodes[static_cast<int>(rng.uniform() * (v + 1))]);
    std::vector<Cluster> out;
    size_t cursor = 0;
    for (int c = 0; c < count && cursor < nodes.size(); ++c) {
        Cluster cl;
        cl.sensor_node = nodes[cursor++];
        cl.der_nodes.push_back(cl.sensor_node);
        int extra = static_cast<int>(rng.uniform() * 3);
        for (int e = 0; e < extra && cursor < nodes.size(); ++e)
            cl.der_nodes.push_back(nodes[cursor++]);
        out.push_back(cl);
    }
    return out;
}

inline Placement placement_from_clusters(const std::vector<Cluster>& clusters) {
    Placement p;
    for (const auto& cl : clusters) {
        for (int d : cl.der_nodes)
            p.sites.push_back({d, true, d == cl.sensor_node});
        for (int d : cl.der_nodes) p.links.push_back({d, cl.sensor_node});
    }
    std::sort(p.sites.begin(), p.sites.end(),
              [](const SiteTriplet& a, const SiteTriplet& b) { return a.node < b.node; });
    return p;
}

/// Copy gain values between instances by the physical identity of each
/// position: (DER node-phase channel, power quantity, sensor node-phase
/// channel, measured quantity). Positions without a source entry get filled
/// from `rng`.
inline GainMatrix transfer_gain(const GainMatrix& source, const IndexSets& source_sets,
                                const SparsityPattern& target, const IndexSets& target_sets,
                                Rng& rng, double scale = 1.0) {
    auto key_of = [](const IndexSets& sets, int r, int c) {
        int half_d = sets.d() / 2, half_s = sets.s() / 2;
        int der_ch = sets.D1[r % half_d];
        int sens_ch = sets.S1[c % half_s];
        return std::tuple<int, int, int, int>{der_ch, r / half_d, sens_ch, c / half_s};
    };
    std::map<std::tuple<int, int, int, int>, double> values;
    for (int t = 0; t < source.pattern.size(); ++t) {
        auto [r, c] = source.pattern.positions[t];
        values[key_of(source_sets, r, c)] = source.F(r, c);
    }
    Eigen::VectorXd f(target.size());
    for (int t = 0; t < target.size(); ++t) {
        auto [r, c] = target.positions[t];
        auto hit = values.find(key_of(target_sets, r, c));
        f(t) = hit != values.end() ? hit->second : rng.uniform(-scale, scale);
    }
    return GainMatrix::unpack(f, target);
}

// ---- path-walk oracle --------------------------------------------------

inline std::vector<int> root_path_edges(const RadialNetwork& net, int node) {
    std::vector<int> edges;
    for (int v = node; v != 0; v = net.parent(v)) edges.push_back(net.edge_to(v));
    std::reverse(edges.begin(), edges.end());  // root-first, matching accumulation order
    return edges;
}

/// 2 × Σ over the explicitly enumerated shared-path edges, summed root-first.
inline double path_walk_entry(const RadialNetwork& net, int i, int j, bool resistance) {
    auto pi = root_path_edges(net, i);
    auto pj = root_path_edges(net, j);
    std::set<int> in_j(pj.begin(), pj.end());
    double sum = 0.0;
    for (int e : pi)
        if (in_j.count(e)) sum += resistance ? net.edges()[e].r : net.edges()[e].x;
    return 2.0 * sum;
}

// ---- eigenvalue helpers --------------------------------------------------

inline std::vector<std::complex<double>> eigenvalues_of(const Eigen::MatrixXd& mat) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(mat);
    REQUIRE(solver.info() == Eigen::Success);
    std::vector<std::complex<double>> out(mat.rows());
    for (int i = 0; i < mat.rows(); ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

/// Multiset check: Λ(full) = {0 ×(dim gap)} ∪ Λ(reduced) within tol.
inline bool eig_multiset_matches(std::vector<std::complex<double>> full,
                                 const std::vector<std::complex<double>>& reduced, double tol) {
    for (const auto& mu : reduced) {
        double best = tol;
        int best_at = -1;
        for (size_t i = 0; i < full.size(); ++i) {
            double dist = std::abs(full[i] - mu);
            if (dist <= best) {
                best = dist;
                best_at = static_cast<int>(i);
            }
        }
        if (best_at < 0) return false;
        full.erase(full.begin() + best_at);
    }
    for (const auto& lambda : full)
        if (std::abs(lambda) > tol) return false;
    return true;
}

// ---- Chebyshev grid-search oracle ----------------------------------------

inline double inscribed_radius_at(const ParameterPolytope& poly, const Eigen::VectorXd& x) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& row : poly.rows) {
        double norm = row.a.norm();
        if (norm == 0.0) continue;
        r = std::min(r, (row.b - row.a.dot(x)) / norm);
    }
    return r;
}

/// Refining grid search for the Chebyshev radius. The objective is concave
/// (a min of affine functions), so shrinking the box around the grid argmax
/// converges to the global optimum.
inline double chebyshev_grid_oracle(const ParameterPolytope& poly, Eigen::VectorXd lo,
                                    Eigen::VectorXd hi, double resolution = 1e-3) {
    const int y = static_cast<int>(lo.size());
    const int pts = 11;
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = 0.5 * (lo + hi);
    while ((hi - lo).maxCoeff() > resolution) {
        std::vector<int> idx(y, 0);
        Eigen::VectorXd x(y);
        bool done = false;
        while (!done) {
            for (int dim = 0; dim < y; ++dim)
                x(dim) = lo(dim) + (hi(dim) - lo(dim)) * idx[dim] / (pts - 1);
            double r = inscribed_radius_at(poly, x);
            if (r > best) {
                best = r;
                best_x = x;
            }
            int dim = 0;
            while (dim < y && ++idx[dim] == pts) idx[dim++] = 0;
            done = dim == y;
        }
        // Keep a generous window around the incumbent: the grid argmax of a
        // concave function can sit a couple of cells off the true one.
        Eigen::VectorXd cell = (hi - lo) / (pts - 1);
        lo = best_x - 2.5 * cell;
        hi = best_x + 2.5 * cell;
    }
    return best;
}

}  // namespace testsupport
