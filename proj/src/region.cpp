#include "derstab/region.hpp"

#include <cmath>
#include <random>

#include "derstab/errors.hpp"
#include "derstab/simplex.hpp"

namespace derstab {

namespace {

// Coefficient vectors of the reduced loop entries over the packed gains:
// entry (i,j) is Σ_t coef[i][j](t)·f(t) with coef[i][j](t) = B̄(i,row_t) when
// the t-th pattern position sits in column j.
std::vector<std::vector<Eigen::VectorXd>> entry_coefficients(const StateSpace& ss,
                                                             const SparsityPattern& pattern) {
    const int s = ss.output_dim();
    const int y = pattern.size();
    std::vector<std::vector<Eigen::VectorXd>> coef(s, std::vector<Eigen::VectorXd>(s, Eigen::VectorXd::Zero(y)));
    for (int t = 0; t < y; ++t) {
        auto [row, col] = pattern.positions[t];
        for (int i = 0; i < s; ++i) coef[i][col](t) += ss.B_red(i, row);
    }
    return coef;
}

}  // namespace

ParameterPolytope build_polytope(const StateSpace& ss, const SparsityPattern& pattern,
                                 double eps, std::size_t row_cap) {
    if (!ss.reduced) throw DimensionError("build_polytope needs a reduced state space");
    if (pattern.rows != ss.input_dim() || pattern.cols != ss.output_dim())
        throw DimensionError("sparsity pattern must be d×s");

    const int s = ss.output_dim();
    const int y = pattern.size();
    auto coef = entry_coefficients(ss, pattern);

    // The loop entries must be linear with zero offset in the packed gains;
    // spot-check the coefficient table against the dense product.
    {
        std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
        auto unit = [&] { return (rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
        for (int trial = 0; trial < 3; ++trial) {
            Eigen::VectorXd f(y);
            for (int t = 0; t < y; ++t) f(t) = unit();
            GainMatrix g = GainMatrix::unpack(f, pattern);
            Eigen::MatrixXd h = ss.B_red * (g.F * ss.C_red);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    if (std::abs(h(i, j) - coef[i][j].dot(f)) > 1e-9 * (1.0 + std::abs(h(i, j))))
                        throw Error("loop entries are not linear in the packed gains; "
                                    "is the output matrix the identity?");
        }
    }

    ParameterPolytope poly;
    poly.y = y;
    poly.eps = eps;
    poly.active_groups.resize(s);

    std::size_t total = 0;
    std::vector<std::vector<int>> groups(s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j)
            if (j != i && (coef[i][j].array() != 0.0).any()) groups[i].push_back(j);
        poly.active_groups[i] = static_cast<int>(groups[i].size());
        if (groups[i].size() > 62) throw ExplosionError("too many absolute-value groups in one disc row");
        total += std::size_t{2} << groups[i].size();
        if (total > row_cap)
            throw ExplosionError("polytope would need " + std::to_string(total) + "+ rows; cap is " +
                                 std::to_string(row_cap) + " — coarsen the pattern");
    }

    poly.rows.reserve(total);
    for (int i = 0; i < s; ++i) {
        const auto& g = groups[i];
        const std::uint64_t patterns = std::uint64_t{1} << g.size();
        for (std::uint64_t bits = 0; bits < patterns; ++bits) {
            Eigen::VectorXd radius_part = Eigen::VectorXd::Zero(y);
            for (size_t k = 0; k < g.size(); ++k)
                radius_part += (bits >> k) & 1 ? -coef[i][g[k]] : coef[i][g[k]];
            poly.rows.push_back({coef[i][i] + radius_part, 2.0 - eps, i, true, bits});
            poly.rows.push_back({-coef[i][i] + radius_part, -eps, i, false, bits});
        }
    }
    return poly;
}

ChebyshevResult chebyshev(const ParameterPolytope& poly) {
    const int y = poly.y;
    const int k = static_cast<int>(poly.rows.size());
    if (k == 0) throw UnboundedError("polytope has no rows; the ball radius is unbounded");

    bool any_normal = false;
    std::vector<double> norms(k);
    for (int i = 0; i < k; ++i) {
        norms[i] = poly.rows[i].a.norm();
        if (norms[i] > 0.0) any_normal = true;
        else if (poly.rows[i].b < 0.0)
            throw InfeasibleError("stability polytope is empty: a trivial row demands 0 ≤ " +
                                  std::to_string(poly.rows[i].b));
    }
    if (!any_normal) throw UnboundedError("every polytope row is trivial; the ball radius is unbounded");

    // Primal: max r s.t. aᵀx + ‖a‖r ≤ b, 0 ≤ r ≤ R_cap. Solved through the
    // dual min hᵀw s.t. Gᵀw = e_r, w ≥ 0, whose multipliers are (x, r).
    const double radius_cap = 1e9;
    const int m_rows = k + 2;
    Eigen::MatrixXd a_std(y + 1, m_rows);
    Eigen::VectorXd c_std(m_rows);
    for (int i = 0; i < k; ++i) {
        a_std.block(0, i, y, 1) = poly.rows[i].a;
        a_std(y, i) = norms[i];
        c_std(i) = poly.rows[i].b;
    }
    a_std.col(k).setZero();
    a_std(y, k) = -1.0;  // r ≥ 0
    c_std(k) = 0.0;
    a_std.col(k + 1).setZero();
    a_std(y, k + 1) = 1.0;  // r ≤ R_cap keeps the dual feasible
    c_std(k + 1) = radius_cap;

    Eigen::VectorXd b_std = Eigen::VectorXd::Zero(y + 1);
    b_std(y) = 1.0;

    auto sol = lp::solve_standard_form(a_std, b_std, c_std);
    if (sol.status == lp::Status::Unbounded)
        throw InfeasibleError("stability polytope is empty at this margin");
    if (sol.status == lp::Status::Infeasible)
        throw Error("chebyshev: dual infeasible; the polytope rows are inconsistent");

    ChebyshevResult out;
    out.center = sol.duals.head(y);
    double r_lp = sol.duals(y);
    if (r_lp > 0.9 * radius_cap)
        throw UnboundedError("ball radius is unbounded; no disc condition constrains the gains");

    // The optimal face can be a long valley when two gains act through nearly
    // identical impedances; any point on it is a Chebyshev center, so pick
    // the minimum-|f|₁ one (the least-actuation parameters). Stage 2 solves
    // min Σ|x| s.t. aᵀx ≤ b - r‖a‖ through the dual, again (2y)-dimensional.
    {
        const double r_face = r_lp * (1.0 - 1e-7);
        Eigen::MatrixXd a2(2 * y, k + 2 * y);
        Eigen::VectorXd b2 = Eigen::VectorXd::Ones(2 * y);
        Eigen::VectorXd c2(k + 2 * y);
        for (int i = 0; i < k; ++i) {
            a2.block(0, i, y, 1) = -poly.rows[i].a;
            a2.block(y, i, y, 1) = poly.rows[i].a;
            c2(i) = poly.rows[i].b - r_face * norms[i];
        }
        a2.rightCols(2 * y).setIdentity();
        c2.tail(2 * y).setZero();
        auto sol2 = lp::solve_standard_form(a2, b2, c2);
        // Multipliers of the equality rows are -(z⁺; z⁻); x = z⁺ - z⁻.
        if (sol2.status == lp::Status::Optimal)
            out.center = sol2.duals.tail(y) - sol2.duals.head(y);
    }

    // Re-verify by direct substitution: the reported radius is the exact
    // inscribed radius at the returned center.
    double r_true = radius_cap;
    for (int i = 0; i < k; ++i) {
        if (norms[i] == 0.0) {
            if (poly.rows[i].b < -1e-12) throw InfeasibleError("polytope contains 0 ≤ negative row");
            continue;
        }
        r_true = std::min(r_true, (poly.rows[i].b - poly.rows[i].a.dot(out.center)) / norms[i]);
    }
    if (r_true < -1e-9) throw Error("chebyshev: simplex returned an infeasible center");
    if (std::abs(r_true - r_lp) > 1e-6 * (1.0 + std::abs(r_lp)))
        throw Error("chebyshev: verification mismatch between LP radius and substitution");
    out.radius = std::max(0.0, r_true);

    for (int i = 0; i < k; ++i) {
        if (norms[i] == 0.0) continue;
        double slack = (poly.rows[i].b - poly.rows[i].a.dot(out.center)) / norms[i] - out.radius;
        if (slack <= 1e-7 * (1.0 + out.radius)) out.active.push_back(i);
    }
    return out;
}

std::vector<ParameterRange> parameter_ranges(const ChebyshevResult& cheb, RangeMode mode) {
    if (cheb.radius <= 0.0) throw DegenerateError("chebyshev ball has zero radius; no ranges exist");
    const int y = static_cast<int>(cheb.center.size());
    const double width = mode == RangeMode::PaperSquare ? cheb.radius * std::sqrt(2.0)
                                                        : 2.0 * cheb.radius / std::sqrt(double(y));
    std::vector<ParameterRange> out(y);
    for (int i = 0; i < y; ++i)
        out[i] = {cheb.center(i) - 0.5 * width, cheb.center(i) + 0.5 * width};
    return out;
}

GainMatrix sample_gain(const std::vector<ParameterRange>& ranges, const SparsityPattern& pattern,
                       GainPolicy policy) {
    if (static_cast<int>(ranges.size()) != pattern.size())
        throw DimensionError("ranges and sparsity pattern disagree on the parameter count");
    Eigen::VectorXd f(pattern.size());
    const int half_rows = pattern.rows / 2;
    const int half_cols = pattern.cols / 2;
    for (int t = 0; t < pattern.size(); ++t) {
        auto [r, c] = pattern.positions[t];
        switch (policy) {
            case GainPolicy::Midpoint: f(t) = ranges[t].mid(); break;
            case GainPolicy::Upper: f(t) = ranges[t].hi; break;
            case GainPolicy::Lower: f(t) = ranges[t].lo; break;
            case GainPolicy::VoltRegPeak:
                f(t) = (r < half_rows && c < half_cols) ? ranges[t].hi : ranges[t].mid();
                break;
            case GainPolicy::RealPowerPeak:
                f(t) = (r >= half_rows && c < half_cols) ? ranges[t].lo : ranges[t].mid();
                break;
        }
    }
    return GainMatrix::unpack(f, pattern);
}

}  // namespace derstab
