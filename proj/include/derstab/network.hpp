#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "derstab/errors.hpp"

namespace derstab {

/// One line segment of the feeder. `r`/`x` are the per-phase (decoupled)
/// impedances in p.u.; `rb`/`xb` carry the full 3x3 mutual blocks when the
/// feeder file supplies them.
struct Edge {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    std::optional<Eigen::Matrix3d> rb;
    std::optional<Eigen::Matrix3d> xb;
};

/// Radial (tree) feeder rooted at the substation, node 0. Nodes are numbered
/// contiguously 0..n; every matrix produced downstream indexes the non-root
/// nodes 1..n in id order. Immutable after construction.
class RadialNetwork {
public:
    /// Validates topology (tree rooted at 0) and phase consistency.
    /// `phase_mask[i]` holds the phases present at node i as bits a=1,b=2,c=4;
    /// pass an empty vector to give every node all `phase_count` phases.
    RadialNetwork(int node_count, std::vector<Edge> edges, int phase_count = 1,
                  double v0 = 1.0, double delta0 = 0.0,
                  std::vector<int> phase_mask = {});

    int node_count() const { return n_; }
    int phase_count() const { return phase_count_; }
    double v0() const { return v0_; }
    double delta0() const { return delta0_; }

    const std::vector<Edge>& edges() const { return edges_; }
    int parent(int node) const;
    /// Index into edges() of the segment parent(node) -> node.
    int edge_to(int node) const;
    int depth(int node) const;
    /// Deepest common node of the root paths of i and j (0 if disjoint).
    int lowest_common_ancestor(int i, int j) const;
    int phase_mask(int node) const { return mask_[node]; }

    // Node-phase channels: node-major, phase ascending, 0-based. A 1-phase
    // feeder has channel i-1 for node i.
    int channel_count() const { return channel_total_; }
    int channel_base(int node) const { return base_[node]; }
    int channel_width(int node) const;
    int channel_of(int node, int phase) const;
    int channel_node(int ch) const { return ch_node_[ch]; }
    int channel_phase(int ch) const { return ch_phase_[ch]; }

private:
    int n_ = 0;
    int phase_count_ = 1;
    double v0_ = 1.0;
    double delta0_ = 0.0;
    std::vector<Edge> edges_;
    std::vector<int> parent_;
    std::vector<int> edge_of_;
    std::vector<int> depth_;
    std::vector<int> mask_;
    std::vector<int> base_;
    std::vector<int> ch_node_;
    std::vector<int> ch_phase_;
    int channel_total_ = 0;
};

/// LinDistFlow sensitivity matrices over node-phase channels: entry (i,j) is
/// twice the summed resistance (reactance) of the shared upstream path of the
/// two channels' nodes. Decoupled phases put zeros off the per-node phase
/// diagonal unless the feeder supplies mutual blocks.
struct ImpedanceMatrices {
    Eigen::MatrixXd R;
    Eigen::MatrixXd X;
    int dim() const { return static_cast<int>(R.rows()); }
};

/// Parse the line-oriented feeder format:
///   phases <1|3>
///   v0 <pu^2>            delta0 <rad>
///   node <id> [phases=<subset of abc>]
///   edge <from> <to> <r_pu> <x_pu> [9 r:x entries row-major]
/// `#` starts a comment. Throws ParseError / TopologyError.
RadialNetwork parse_feeder(const std::string& text);

ImpedanceMatrices build_impedance_matrices(const RadialNetwork& net);

/// Common-node impedance Z_ij = R0_ij + jX0_ij between nodes i, j in 1..n,
/// evaluated from the per-phase scalar path impedances.
std::complex<double> common_node_impedance(const RadialNetwork& net,
                                           const ImpedanceMatrices& mats,
                                           int i, int j);

}  // namespace derstab
