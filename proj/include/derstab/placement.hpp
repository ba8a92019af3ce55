#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "derstab/network.hpp"

namespace derstab {

struct SiteTriplet {
    int node = 0;
    bool has_der = false;
    bool has_sensor = false;
};

/// DER/sensor siting plus the communication links declaring which sensors
/// each DER can hear. Empty `links` means every DER hears every sensor.
struct Placement {
    std::vector<SiteTriplet> sites;
    std::vector<std::pair<int, int>> links;  // (der node, sensor node)

    std::vector<int> der_nodes() const;
    std::vector<int> sensor_nodes() const;
};

/// Parse the placement format: `site <node> der=<0|1> sensor=<0|1>` and
/// optional `link <der_node> <sensor_node>` lines; `#` comments.
Placement parse_placement(const std::string& text);

/// Ordered 1-based index sets over node-phase channels. With m channels the
/// magnitude block is 1..m and the angle block m+1..2m; DER / sensor sets
/// appear once per block.
struct IndexSets {
    int m = 0;
    std::vector<int> D1, S1;  // channel indices in 1..m
    std::vector<int> D, S;    // in 1..2m: {D1, D1+m} and {S1, S1+m}

    int d() const { return static_cast<int>(D.size()); }
    int s() const { return static_cast<int>(S.size()); }
    std::vector<int> D_complement() const;
    std::vector<int> S_complement() const;
    bool sensors_subset_of_ders() const;  // Assumption: S ⊆ D
};

IndexSets build_index_sets(const Placement& placement, const RadialNetwork& net);

/// Column selection matrix: column k is the basis vector e_{basis[k]} of
/// dimension `rows`. Stored structurally; orthonormal columns make the
/// Moore-Penrose inverse the plain transpose.
struct SelectorMatrix {
    int rows = 0;
    std::vector<int> basis;  // 1-based, strictly increasing per block

    int cols() const { return static_cast<int>(basis.size()); }
    Eigen::MatrixXd matrix() const;
    /// Gather: picks the basis rows of v (the transpose action).
    Eigen::VectorXd gather(const Eigen::VectorXd& v) const;
    /// Scatter: places entries of v at the basis rows of a `rows` vector.
    Eigen::VectorXd scatter(const Eigen::VectorXd& v) const;
    bool is_permutation() const;
};

/// Γ_c(Ω): throws DimensionError if any index exceeds c.
SelectorMatrix selector(const std::vector<int>& omega, int c);

struct Selectors {
    SelectorMatrix der;         // T^d = Γ_m(D1), m × d/2
    SelectorMatrix sensor;      // Γ_2m(S); the read-out map C is its transpose
    SelectorMatrix reorder;     // T = [Γ(S∩D) Γ(S∩D̄) Γ(S̄∩D) Γ(S̄∩D̄)], a permutation
    SelectorMatrix observable;  // G = Γ_2m({1..s})
};

/// Throws AssumptionError when `require_colocated_sensing` and S ⊄ D.
Selectors build_selectors(const IndexSets& sets, bool require_colocated_sensing = true);

}  // namespace derstab
