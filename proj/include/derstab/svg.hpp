#pragma once

#include <string>

#include "derstab/region.hpp"
#include "derstab/sim.hpp"

namespace derstab::svg {

/// Voltage magnitude envelope over time with the violation band marked.
std::string envelope_plot(const MetricsReport& rep, const Trace& trace);

/// 2-D slice of the gain space through the Chebyshev center: grid points
/// colored by the eigenvalue verdict, with the ball and the parameter-range
/// square overlaid. dims pick the two plotted packed-gain coordinates.
std::string region_slice_plot(const StateSpace& ss, const SparsityPattern& pattern,
                              const ChebyshevResult& cheb,
                              const std::vector<ParameterRange>& ranges, int dim_x, int dim_y,
                              int grid = 41);

}  // namespace derstab::svg
