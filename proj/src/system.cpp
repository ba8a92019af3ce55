#include "derstab/system.hpp"

#include <algorithm>

#include "derstab/errors.hpp"

namespace derstab {

StateSpace build_open_loop(const ImpedanceMatrices& mats, const IndexSets& sets) {
    if (mats.dim() != sets.m)
        throw DimensionError("impedance matrices are " + std::to_string(mats.dim()) +
                             "-dimensional but the placement expects " + std::to_string(sets.m));
    StateSpace ss;
    ss.m = sets.m;
    ss.sets = sets;
    ss.sel = build_selectors(sets, /*require_colocated_sensing=*/false);

    const int half_d = sets.d() / 2;
    ss.R.resize(sets.m, half_d);
    ss.X.resize(sets.m, half_d);
    for (int k = 0; k < half_d; ++k) {
        ss.R.col(k) = mats.R.col(sets.D1[k] - 1);
        ss.X.col(k) = mats.X.col(sets.D1[k] - 1);
    }

    ss.B.resize(2 * sets.m, sets.d());
    ss.B.topLeftCorner(sets.m, half_d) = ss.X;
    ss.B.topRightCorner(sets.m, half_d) = ss.R;
    ss.B.bottomLeftCorner(sets.m, half_d) = -0.5 * ss.R;
    ss.B.bottomRightCorner(sets.m, half_d) = 0.5 * ss.X;

    ss.C = ss.sel.sensor.matrix().transpose();
    return ss;
}

StateSpace reduce(StateSpace ss) {
    if (!ss.sets.sensors_subset_of_ders())
        throw AssumptionError("reduction needs a DER at every sensor node (S ⊆ D)");

    // T is a permutation, so its inverse is the transpose; B̄ gathers the
    // first s permuted rows of B and C̄ = C T G collapses to the identity.
    const auto& order = ss.sel.reorder.basis;
    const int s = ss.sets.s();
    ss.B_red.resize(s, ss.sets.d());
    for (int k = 0; k < s; ++k) ss.B_red.row(k) = ss.B.row(order[k] - 1);

    Eigen::MatrixXd tg(2 * ss.m, s);
    Eigen::MatrixXd t_full = ss.sel.reorder.matrix();
    tg = t_full.leftCols(s);
    ss.C_red = ss.C * tg;
    ss.reduced = true;
    return ss;
}

void SparsityPattern::normalize() {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    for (auto [r, c] : positions)
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw DimensionError("sparsity position (" + std::to_string(r) + "," + std::to_string(c) +
                                 ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
}

SparsityPattern SparsityPattern::dense(int rows, int cols) {
    SparsityPattern p;
    p.rows = rows;
    p.cols = cols;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) p.positions.push_back({r, c});
    return p;
}

SparsityPattern pattern_from_links(const Placement& placement, const RadialNetwork& net,
                                   const IndexSets& sets, PatternScope scope) {
    SparsityPattern p;
    p.rows = sets.d();
    p.cols = sets.s();
    const int half_d = sets.d() / 2;
    const int half_s = sets.s() / 2;

    auto linked = [&](int der_node, int sensor_node) {
        if (placement.links.empty()) return true;
        for (auto [d, s] : placement.links)
            if (d == der_node && s == sensor_node) return true;
        return false;
    };

    for (int k = 0; k < half_d; ++k) {
        int der_ch = sets.D1[k] - 1;
        for (int j = 0; j < half_s; ++j) {
            int sens_ch = sets.S1[j] - 1;
            if (!linked(net.channel_node(der_ch), net.channel_node(sens_ch))) continue;
            if (scope == PatternScope::PhaseMatched &&
                net.channel_phase(der_ch) != net.channel_phase(sens_ch))
                continue;
            // both power quantities × both measured quantities
            p.positions.push_back({k, j});
            p.positions.push_back({k, j + half_s});
            p.positions.push_back({k + half_d, j});
            p.positions.push_back({k + half_d, j + half_s});
        }
    }
    p.normalize();
    return p;
}

Eigen::VectorXd GainMatrix::pack() const {
    Eigen::VectorXd f(pattern.size());
    for (int t = 0; t < pattern.size(); ++t) {
        auto [r, c] = pattern.positions[t];
        f(t) = F(r, c);
    }
    return f;
}

GainMatrix GainMatrix::unpack(const Eigen::VectorXd& f, const SparsityPattern& pattern) {
    if (f.size() != pattern.size())
        throw DimensionError("packed gain vector has " + std::to_string(f.size()) + " entries, pattern has " +
                             std::to_string(pattern.size()));
    GainMatrix g;
    g.pattern = pattern;
    g.F = Eigen::MatrixXd::Zero(pattern.rows, pattern.cols);
    for (int t = 0; t < pattern.size(); ++t) {
        auto [r, c] = pattern.positions[t];
        g.F(r, c) = f(t);
    }
    return g;
}

void GainMatrix::validate() const {
    if (F.rows() != pattern.rows || F.cols() != pattern.cols)
        throw DimensionError("gain matrix shape does not match its sparsity pattern");
    Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(pattern.rows, pattern.cols);
    for (auto [r, c] : pattern.positions) mask(r, c) = 1.0;
    for (int r = 0; r < F.rows(); ++r)
        for (int c = 0; c < F.cols(); ++c)
            if (F(r, c) != 0.0 && mask(r, c) == 0.0)
                throw SparsityError("gain entry (" + std::to_string(r) + "," + std::to_string(c) +
                                    ") is nonzero outside the communication pattern");
}

ClosedLoop closed_loop(const StateSpace& ss, const GainMatrix& gain) {
    if (!ss.reduced) throw DimensionError("closed_loop needs a reduced state space; call reduce() first");
    if (gain.F.rows() != ss.input_dim() || gain.F.cols() != ss.output_dim())
        throw DimensionError("gain must be d×s = " + std::to_string(ss.input_dim()) + "x" +
                             std::to_string(ss.output_dim()));
    gain.validate();

    ClosedLoop cl;
    cl.H = ss.B * gain.F * ss.C;
    cl.F_red = gain.F * ss.C_red;
    cl.H_red = ss.B_red * cl.F_red;
    return cl;
}

}  // namespace derstab
