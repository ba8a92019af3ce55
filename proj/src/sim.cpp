#include "derstab/sim.hpp"

#include <cmath>

#include "derstab/errors.hpp"

namespace derstab {

const GainMatrix& GainSchedule::at(int k) const {
    if (stages.empty()) throw DimensionError("empty gain schedule");
    const GainMatrix* current = &stages.front().second;
    for (const auto& [start, gain] : stages) {
        if (start > k) break;
        current = &gain;
    }
    return *current;
}

Eigen::MatrixXd Trace::voltage_magnitude() const { return v.cwiseSqrt(); }

namespace {

struct Truth {
    Eigen::VectorXd v;      // squared magnitudes per channel
    Eigen::VectorXd delta;  // rad per channel
};

Truth resolve(const RadialNetwork& net, const ImpedanceMatrices& mats, TruthModel truth,
              const Eigen::VectorXd& p, const Eigen::VectorXd& q, const SweepOptions& sweep) {
    Truth out;
    if (truth == TruthModel::Linear) {
        out.v = mats.R * p + mats.X * q + Eigen::VectorXd::Constant(p.size(), net.v0());
        out.delta = 0.5 * (mats.X * p - mats.R * q) +
                    Eigen::VectorXd::Constant(p.size(), net.delta0());
    } else {
        auto pf = sweep_power_flow(net, p, q, sweep);
        out.v = pf.v_mag.array().square();
        out.delta = pf.angle;
    }
    return out;
}

}  // namespace

Trace simulate(const RadialNetwork& net, const ImpedanceMatrices& mats, const StateSpace& ss,
               const GainSchedule& schedule, const Profile& profile,
               const std::optional<ReferenceSchedule>& refs, const SimOptions& opt) {
    if (!ss.reduced) throw DimensionError("simulate needs a reduced state space");
    const int m = net.channel_count();
    if (profile.p.rows() != m || profile.q.rows() != m)
        throw DimensionError("profile channel count does not match the network");
    const int steps = profile.steps;
    const int half_d = ss.input_dim() / 2;
    const int half_s = ss.output_dim() / 2;
    if (opt.k_on < 0 || opt.k_on >= steps)
        throw DimensionError("k_on must fall inside the horizon");
    for (const auto& [start, gain] : schedule.stages)
        if (gain.F.rows() != ss.input_dim() || gain.F.cols() != ss.output_dim())
            throw DimensionError("scheduled gain must be d×s");

    Trace tr;
    tr.delta_s = profile.delta_s;
    tr.k_on = opt.k_on;
    tr.start_minutes = profile.start_minutes;
    tr.truth = opt.truth;
    tr.sets = ss.sets;
    tr.v.resize(m, steps);
    tr.delta.resize(m, steps);
    tr.p_hat = Eigen::MatrixXd::Zero(half_d, steps);
    tr.q_hat = Eigen::MatrixXd::Zero(half_d, steps);
    tr.err_v.resize(half_s, steps);
    tr.err_delta.resize(half_s, steps);

    // Default references: squared nominal magnitude, controller-off angle at
    // the turn-on step.
    Eigen::VectorXd vref_const = Eigen::VectorXd::Ones(half_s);
    Eigen::VectorXd dref_const = Eigen::VectorXd::Zero(half_s);
    if (!refs) {
        auto off = resolve(net, mats, opt.truth, profile.p.col(opt.k_on), profile.q.col(opt.k_on),
                           opt.sweep);
        for (int j = 0; j < half_s; ++j) dref_const(j) = off.delta(ss.sets.S1[j] - 1);
    } else if (refs->v_ref.rows() != half_s || refs->v_ref.cols() < steps ||
               refs->delta_ref.rows() != half_s || refs->delta_ref.cols() < steps) {
        throw DimensionError("reference schedule must cover every sensor channel and step");
    }

    Eigen::VectorXd p_hat = Eigen::VectorXd::Zero(half_d);
    Eigen::VectorXd q_hat = Eigen::VectorXd::Zero(half_d);

    for (int k = 0; k < steps; ++k) {
        Eigen::VectorXd p_full = profile.p.col(k);
        Eigen::VectorXd q_full = profile.q.col(k);
        for (int t = 0; t < half_d; ++t) {
            p_full(ss.sets.D1[t] - 1) += p_hat(t);
            q_full(ss.sets.D1[t] - 1) += q_hat(t);
        }

        Truth now = resolve(net, mats, opt.truth, p_full, q_full, opt.sweep);
        tr.v.col(k) = now.v;
        tr.delta.col(k) = now.delta;
        tr.p_hat.col(k) = p_hat;
        tr.q_hat.col(k) = q_hat;

        Eigen::VectorXd ebar(2 * half_s);
        for (int j = 0; j < half_s; ++j) {
            int ch = ss.sets.S1[j] - 1;
            double vr = refs ? refs->v_ref(j, k) : vref_const(j);
            double dr = refs ? refs->delta_ref(j, k) : dref_const(j);
            ebar(j) = now.v(ch) - vr;
            ebar(half_s + j) = now.delta(ch) - dr;
            tr.err_v(j, k) = ebar(j);
            tr.err_delta(j, k) = ebar(half_s + j);
        }

        if (k >= opt.k_on && k + 1 < steps) {
            Eigen::VectorXd u = -schedule.at(k).F * ebar;  // F̄ = F under colocated sensing
            q_hat += u.head(half_d);
            p_hat += u.tail(half_d);
            if (opt.power_cap > 0.0) {
                for (int t = 0; t < half_d; ++t) {
                    double before_p = p_hat(t), before_q = q_hat(t);
                    p_hat(t) = std::clamp(p_hat(t), -opt.power_cap, opt.power_cap);
                    q_hat(t) = std::clamp(q_hat(t), -opt.power_cap, opt.power_cap);
                    if (p_hat(t) != before_p || q_hat(t) != before_q) ++tr.saturation_events;
                }
            }
        }
    }
    return tr;
}

Trace simulate(const RadialNetwork& net, const ImpedanceMatrices& mats, const StateSpace& ss,
               const GainMatrix& gain, const Profile& profile,
               const std::optional<ReferenceSchedule>& refs, const SimOptions& opt) {
    return simulate(net, mats, ss, GainSchedule::fixed(gain), profile, refs, opt);
}

GainMatrix benchmark_gain(const StateSpace& ss, const SparsityPattern& pattern) {
    const int half_d = ss.input_dim() / 2;
    const int half_s = ss.output_dim() / 2;
    const double y = static_cast<double>(pattern.size());
    GainMatrix g;
    g.pattern = pattern;
    g.F = Eigen::MatrixXd::Zero(pattern.rows, pattern.cols);
    for (auto [r, c] : pattern.positions) {
        if (r >= half_d || c >= half_s) continue;  // magnitude→reactive quadrant only
        double x = ss.X(ss.sets.S1[c] - 1, r);
        if (x == 0.0)
            throw DivideByZero("benchmark gain undefined: zero common-node reactance between "
                               "sensor channel " + std::to_string(c) + " and DER channel " +
                               std::to_string(r));
        g.F(r, c) = (1.98 / y) * (2.0 / x);
    }
    return g;
}

MetricsReport metrics(const Trace& trace, double band, double nominal, double inner_band) {
    MetricsReport rep;
    rep.band = band;
    rep.inner_band = inner_band;
    rep.nominal = nominal;

    const int steps = trace.steps();
    Eigen::MatrixXd mag = trace.voltage_magnitude();
    rep.envelope_min.resize(steps);
    rep.envelope_max.resize(steps);
    for (int k = 0; k < steps; ++k) {
        rep.envelope_min[k] = mag.col(k).minCoeff();
        rep.envelope_max[k] = mag.col(k).maxCoeff();
    }

    int violating = 0;
    int post = 0;
    int settled_from = steps;  // first step after which all stay inside the inner band
    for (int k = steps - 1; k >= trace.k_on; --k) {
        bool outside_inner = rep.envelope_max[k] > nominal * (1.0 + inner_band) ||
                             rep.envelope_min[k] < nominal * (1.0 - inner_band);
        if (outside_inner) break;
        settled_from = k;
    }
    for (int k = trace.k_on; k < steps; ++k) {
        ++post;
        if (rep.envelope_max[k] > nominal * (1.0 + band) ||
            rep.envelope_min[k] < nominal * (1.0 - band))
            ++violating;
    }
    rep.violation_share = post > 0 ? static_cast<double>(violating) / post : 0.0;
    if (settled_from < steps) {
        rep.settling_steps = settled_from - trace.k_on;
        rep.settling_seconds = rep.settling_steps * trace.delta_s;
    }
    return rep;
}

}  // namespace derstab
