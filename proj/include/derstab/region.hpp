#pragma once

#include <cstdint>
#include <vector>

#include "derstab/system.hpp"

namespace derstab {

/// One linear inequality aᵀf ≤ b over the packed gain vector, tagged with the
/// Gershgorin row, bound side and sign pattern that generated it.
struct PolytopeRow {
    Eigen::VectorXd a;
    double b = 0.0;
    int disc_row = 0;
    bool upper = true;        // true: center+radius bound, false: center-radius bound
    std::uint64_t signs = 0;  // bit g set means group g entered with -1
};

struct ParameterPolytope {
    int y = 0;
    double eps = 0.0;
    std::vector<PolytopeRow> rows;
    /// Active absolute-value groups per disc row after pruning identically
    /// zero entries; the row count is Σ 2·2^groups.
    std::vector<int> active_groups;
};

/// Expand the disc conditions center±radius over all sign patterns of the
/// off-diagonal entries into linear rows over the packed gains. Throws
/// ExplosionError when the expansion would exceed `row_cap`.
ParameterPolytope build_polytope(const StateSpace& ss, const SparsityPattern& pattern,
                                 double eps, std::size_t row_cap = 1000000);

struct ChebyshevResult {
    Eigen::VectorXd center;
    double radius = 0.0;
    std::vector<int> active;  // rows met with equality by the ball
};

/// Largest inscribed ball, solved with the in-repo simplex on the dual so the
/// basis stays (y+1)-dimensional however many rows the polytope has. The
/// returned ball is re-verified by direct substitution.
ChebyshevResult chebyshev(const ParameterPolytope& poly);

enum class RangeMode {
    PaperSquare,    // width c·√2: the inscribed square of the 2-D cross-section
    SafeHypercube,  // width 2c/√y: the full hypercube fits inside the ball
};

struct ParameterRange {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

/// Throws DegenerateError when the ball has no interior.
std::vector<ParameterRange> parameter_ranges(const ChebyshevResult& cheb, RangeMode mode);

enum class GainPolicy {
    Midpoint,
    Upper,
    Lower,
    VoltRegPeak,    // magnitude→reactive quadrant at upper bound, rest midpoint
    RealPowerPeak,  // magnitude→real quadrant at lower bound, rest midpoint
};

GainMatrix sample_gain(const std::vector<ParameterRange>& ranges, const SparsityPattern& pattern,
                       GainPolicy policy);

}  // namespace derstab
