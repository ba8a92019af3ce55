#pragma once

#include <Eigen/Core>

#include "derstab/network.hpp"

namespace derstab {

struct SweepOptions {
    double tol = 1e-8;   // max voltage mismatch, p.u.
    int max_iter = 200;
};

struct SweepResult {
    Eigen::VectorXd v_mag;  // per channel, p.u.
    Eigen::VectorXd angle;  // per channel, rad (relative to the substation)
    int iterations = 0;
};

/// Backward/forward-sweep AC power flow on the radial feeder with
/// constant-power injections (generation positive, p.u.) per node-phase
/// channel. Phases are swept independently using the per-phase scalar line
/// impedances. Throws PowerFlowDiverged when the voltage mismatch does not
/// reach `tol` within `max_iter`, or when a voltage collapses — both signal
/// an operating point far from the linearization.
SweepResult sweep_power_flow(const RadialNetwork& net, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& q, const SweepOptions& opt = {});

}  // namespace derstab
