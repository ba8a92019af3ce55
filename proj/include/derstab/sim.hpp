#pragma once

#include <optional>
#include <vector>

#include "derstab/powerflow.hpp"
#include "derstab/profiles.hpp"
#include "derstab/system.hpp"

namespace derstab {

enum class TruthModel { Linear, Sweep };

/// Per-sensor-channel squared-magnitude and angle references; one column per
/// step. Pass std::nullopt to simulate() for the defaults: v_ref = 1 p.u.²
/// and the controller-off angle at the turn-on step.
struct ReferenceSchedule {
    Eigen::MatrixXd v_ref;      // s/2 × steps
    Eigen::MatrixXd delta_ref;  // s/2 × steps
};

struct SimOptions {
    TruthModel truth = TruthModel::Sweep;
    int k_on = 12;           // first step the controller acts on
    double power_cap = 0.0;  // per-channel |p̂|,|q̂| clamp in p.u.; 0 disables
    SweepOptions sweep;
};

/// Piecewise-constant gain schedule: entry (k, gain) makes `gain` active from
/// step k onward. A single-entry schedule is the fixed-gain case.
struct GainSchedule {
    std::vector<std::pair<int, GainMatrix>> stages;
    static GainSchedule fixed(GainMatrix gain) { return {{{0, std::move(gain)}}}; }
    const GainMatrix& at(int k) const;
};

struct Trace {
    double delta_s = 5.0;
    int k_on = 0;
    int start_minutes = 0;
    TruthModel truth = TruthModel::Linear;

    Eigen::MatrixXd v;          // channels × steps, squared magnitudes
    Eigen::MatrixXd delta;      // channels × steps, rad
    Eigen::MatrixXd p_hat;      // d/2 × steps, DER injections applied during step k
    Eigen::MatrixXd q_hat;
    Eigen::MatrixXd err_v;      // s/2 × steps, sensor tracking errors (squared units)
    Eigen::MatrixXd err_delta;  // s/2 × steps
    int saturation_events = 0;

    IndexSets sets;
    int steps() const { return static_cast<int>(v.cols()); }
    /// Reporting boundary: magnitudes √v.
    Eigen::MatrixXd voltage_magnitude() const;
};

/// Closed-loop quasi-steady-state run: at each step the truth model resolves
/// voltages for the accumulated DER injections plus the profile, sensors read
/// the phasor tracking error and, from k_on on, the integral law
/// u = -F̄ ē increments the injections.
Trace simulate(const RadialNetwork& net, const ImpedanceMatrices& mats, const StateSpace& ss,
               const GainSchedule& schedule, const Profile& profile,
               const std::optional<ReferenceSchedule>& refs, const SimOptions& opt);

Trace simulate(const RadialNetwork& net, const ImpedanceMatrices& mats, const StateSpace& ss,
               const GainMatrix& gain, const Profile& profile,
               const std::optional<ReferenceSchedule>& refs, const SimOptions& opt);

/// Stationary linear policy benchmark: gain (1.98/y)·(2/X_ij) at the
/// magnitude→reactive positions of the pattern, zero elsewhere. Throws
/// DivideByZero when a permitted position has X_ij = 0.
GainMatrix benchmark_gain(const StateSpace& ss, const SparsityPattern& pattern);

struct MetricsReport {
    double band = 0.05;         // violation band around nominal
    double inner_band = 0.015;  // settling band
    double nominal = 1.0;       // p.u. magnitude
    double violation_share = 0.0;  // fraction of post-k_on steps with any channel outside
    int settling_steps = -1;       // control iterations from k_on until all inside for good
    double settling_seconds = -1.0;
    std::vector<double> envelope_min;  // per step, magnitude p.u.
    std::vector<double> envelope_max;
};

MetricsReport metrics(const Trace& trace, double band = 0.05, double nominal = 1.0,
                      double inner_band = 0.015);

}  // namespace derstab
