#include "derstab/stability.hpp"

#include <Eigen/Eigenvalues>

#include "derstab/errors.hpp"

namespace derstab {

namespace {

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& mat) {
    if (mat.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> solver(mat);
    if (solver.info() != Eigen::Success)
        throw EigenFailure("eigensolver failed to converge on a " + std::to_string(mat.rows()) +
                           "x" + std::to_string(mat.cols()) + " matrix");
    std::vector<std::complex<double>> out(mat.rows());
    for (int i = 0; i < mat.rows(); ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

}  // namespace

bool assess_eigen(const ClosedLoop& cl) {
    for (const auto& lambda : spectrum(cl.H_red))
        if (std::abs(lambda - std::complex<double>(1.0, 0.0)) >= 1.0) return false;
    return true;
}

std::vector<GershgorinDisc> gershgorin(const ClosedLoop& cl) {
    const auto& h = cl.H_red;
    std::vector<GershgorinDisc> discs(h.rows());
    for (int i = 0; i < h.rows(); ++i) {
        double radius = 0.0;
        for (int j = 0; j < h.cols(); ++j)
            if (j != i) radius += std::abs(h(i, j));
        discs[i] = {h(i, i), radius, i};
    }
    return discs;
}

bool check_region(const ClosedLoop& cl, double eps) {
    for (const auto& disc : gershgorin(cl)) {
        if (disc.center + disc.radius > 2.0 - eps) return false;
        if (disc.center - disc.radius < eps) return false;
    }
    return true;
}

std::pair<double, double> stability_margin(const ClosedLoop& cl) {
    double rho_hat = 0.0;
    for (const auto& disc : gershgorin(cl))
        rho_hat = std::max(rho_hat, std::abs(disc.center - 1.0) + disc.radius);
    return {1.0 - rho_hat, rho_hat};
}

StabilityReport analyze(const ClosedLoop& cl, double eps) {
    StabilityReport report;
    report.eps = eps;
    report.eigenvalues = spectrum(cl.H_red);
    report.discs = gershgorin(cl);
    report.eig_verdict = true;
    for (const auto& lambda : report.eigenvalues) {
        report.rho_exact = std::max(report.rho_exact, std::abs(std::complex<double>(1.0, 0.0) - lambda));
        if (std::abs(lambda - std::complex<double>(1.0, 0.0)) >= 1.0) report.eig_verdict = false;
    }
    report.disc_verdict = check_region(cl, eps);
    std::tie(report.margin, report.rho_hat) = stability_margin(cl);
    return report;
}

std::vector<double> depth_scan(const RadialNetwork& net, const Placement& placement,
                               const GainMatrix& gain, const std::vector<double>& scales) {
    auto sensors = placement.sensor_nodes();
    if (sensors.size() != 1)
        throw DimensionError("depth_scan expects a single DER-sensor pair template");
    const int target = sensors.front();

    // Edges on the root path of the pair's node.
    std::vector<char> on_path(net.edges().size(), 0);
    for (int v = target; v != 0; v = net.parent(v)) on_path[net.edge_to(v)] = 1;

    std::vector<double> margins;
    margins.reserve(scales.size());
    for (double scale : scales) {
        std::vector<Edge> edges = net.edges();
        for (size_t e = 0; e < edges.size(); ++e) {
            if (!on_path[e]) continue;
            edges[e].r *= scale;
            edges[e].x *= scale;
            if (edges[e].rb) *edges[e].rb *= scale;
            if (edges[e].xb) *edges[e].xb *= scale;
        }
        std::vector<int> mask(net.node_count() + 1);
        for (int v = 0; v <= net.node_count(); ++v) mask[v] = net.phase_mask(v);
        RadialNetwork scaled(net.node_count(), std::move(edges), net.phase_count(),
                             net.v0(), net.delta0(), std::move(mask));
        auto sets = build_index_sets(placement, scaled);
        auto ss = reduce(build_open_loop(build_impedance_matrices(scaled), sets));
        margins.push_back(stability_margin(closed_loop(ss, gain)).first);
    }
    return margins;
}

std::vector<RelevantImpedance> relevant_impedances(const RadialNetwork& net,
                                                   const Placement& placement) {
    ImpedanceMatrices unused;
    std::vector<RelevantImpedance> out;
    for (int i : placement.sensor_nodes())
        for (int j : placement.der_nodes())
            out.push_back({i, j, common_node_impedance(net, unused, i, j)});
    return out;
}

}  // namespace derstab
