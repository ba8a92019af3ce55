#pragma once

#include <complex>
#include <vector>

#include "derstab/system.hpp"

namespace derstab {

struct GershgorinDisc {
    double center = 0.0;  // diagonal entry of the reduced loop matrix
    double radius = 0.0;  // absolute off-diagonal row sum
    int row = 0;
};

struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;  // of the reduced loop matrix
    std::vector<GershgorinDisc> discs;
    bool eig_verdict = false;   // every eigenvalue inside the unit ball at 1+j0
    bool disc_verdict = false;  // disc conditions hold at the report's eps
    double eps = 0.0;
    double rho_hat = 0.0;    // farthest disc point from 1+j0
    double margin = 0.0;     // 1 - rho_hat; non-positive withdraws the guarantee
    double rho_exact = 0.0;  // max |1 - λ|
};

/// True iff the spectrum of the reduced loop matrix lies strictly inside the
/// unit ball centered at 1+j0 (equivalently, the closed-loop map I - H̄ has
/// spectral radius < 1). Throws EigenFailure if the solver does not converge.
bool assess_eigen(const ClosedLoop& cl);

std::vector<GershgorinDisc> gershgorin(const ClosedLoop& cl);

/// Disc conditions with margin eps: center+radius ≤ 2-eps and
/// center-radius ≥ eps on every row.
bool check_region(const ClosedLoop& cl, double eps = 1e-2);

/// Returns (margin, rho_hat). Centers are real, so the farthest disc-union
/// point from 1+j0 is max_i(|center_i - 1| + radius_i) in closed form.
std::pair<double, double> stability_margin(const ClosedLoop& cl);

StabilityReport analyze(const ClosedLoop& cl, double eps = 1e-2);

/// Margin curve as the root path of a single DER-sensor location is
/// lengthened: entry k is the margin with the path impedances multiplied by
/// scales[k], under the same fixed gain. The placement must have exactly one
/// sensor node.
std::vector<double> depth_scan(const RadialNetwork& net, const Placement& placement,
                               const GainMatrix& gain, const std::vector<double>& scales);

struct RelevantImpedance {
    int sensor_node = 0;
    int der_node = 0;
    std::complex<double> z;
};

/// The sensor-row / DER-column common-node impedances: the only line data the
/// reduced loop matrix depends on. Perturbing edges outside every listed
/// shared path leaves the closed loop bit-identical.
std::vector<RelevantImpedance> relevant_impedances(const RadialNetwork& net,
                                                   const Placement& placement);

}  // namespace derstab
