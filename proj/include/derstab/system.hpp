#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "derstab/placement.hpp"

namespace derstab {

/// Integral-action open-loop model over phasor tracking errors. The state is
/// [squared-magnitude errors; angle errors] at all node-phase channels, the
/// input is [reactive-power changes; real-power changes] at DER channels and
/// A is the identity throughout, so only B and C are stored.
struct StateSpace {
    int m = 0;  // node-phase channel count; the state dimension is 2m

    Eigen::MatrixXd R;  // m × d/2, impedance columns of the DER channels
    Eigen::MatrixXd X;
    Eigen::MatrixXd B;  // 2m × d, [[X R][-R/2 X/2]]
    Eigen::MatrixXd C;  // s × 2m, sensor read-out

    IndexSets sets;
    Selectors sel;

    // Minimal realization over sensor channels (see reduce()).
    bool reduced = false;
    Eigen::MatrixXd B_red;  // s × d
    Eigen::MatrixXd C_red;  // s × s, identity when sensors are colocated with DERs

    int state_dim() const { return 2 * m; }
    int input_dim() const { return sets.d(); }
    int output_dim() const { return sets.s(); }
};

StateSpace build_open_loop(const ImpedanceMatrices& mats, const IndexSets& sets);

/// Kalman-style reduction to the observable (and, since S ⊆ D, controllable)
/// subsystem: B̄ = Gᵀ Tᵀ B, C̄ = C T G. Throws AssumptionError when some
/// sensor lacks a DER, which would leave observable-but-uncontrollable modes.
StateSpace reduce(StateSpace ss);

/// Permitted nonzero positions of the gain matrix, i.e. the DER-sensor
/// communication network. Positions are 0-based (input row, sensor column),
/// kept sorted row-major; the packed vector f follows that order.
struct SparsityPattern {
    int rows = 0;
    int cols = 0;
    std::vector<std::pair<int, int>> positions;

    int size() const { return static_cast<int>(positions.size()); }
    void normalize();  // sort, drop duplicates, bounds-check
    static SparsityPattern dense(int rows, int cols);
};

/// PhaseMatched keeps only same-phase channel pairs, the natural scope when
/// the impedance model is phase-decoupled (cross-phase reactances are zero,
/// so cross-phase gains cannot help and reciprocal-reactance policies divide
/// by zero there).
enum class PatternScope { FullBlocks, PhaseMatched };

/// Build the pattern implied by placement links: each (DER node, sensor node)
/// link opens the block of both power quantities against both measured
/// quantities across the nodes' phases. Empty links connect everything.
SparsityPattern pattern_from_links(const Placement& placement, const RadialNetwork& net,
                                   const IndexSets& sets,
                                   PatternScope scope = PatternScope::FullBlocks);

struct GainMatrix {
    Eigen::MatrixXd F;  // d × s
    SparsityPattern pattern;

    Eigen::VectorXd pack() const;
    static GainMatrix unpack(const Eigen::VectorXd& f, const SparsityPattern& pattern);
    /// SparsityError if F has a nonzero outside the pattern.
    void validate() const;
};

struct ClosedLoop {
    Eigen::MatrixXd H;      // B F C, 2m × 2m
    Eigen::MatrixXd F_red;  // F C̄, d × s
    Eigen::MatrixXd H_red;  // B̄ F̄, s × s
};

ClosedLoop closed_loop(const StateSpace& ss, const GainMatrix& gain);

}  // namespace derstab
