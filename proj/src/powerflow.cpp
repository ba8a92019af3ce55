#include "derstab/powerflow.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace derstab {

SweepResult sweep_power_flow(const RadialNetwork& net, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& q, const SweepOptions& opt) {
    const int n = net.node_count();
    const int m = net.channel_count();
    if (p.size() != m || q.size() != m)
        throw DimensionError("sweep_power_flow: injections must have one entry per channel");

    // Children lists and a leaves-first ordering shared by all phases.
    std::vector<std::vector<int>> children(n + 1);
    for (int v = 1; v <= n; ++v) children[net.parent(v)].push_back(v);
    std::vector<int> order;  // root-first
    order.reserve(n);
    {
        std::vector<int> stack{0};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (v != 0) order.push_back(v);
            for (int c : children[v]) stack.push_back(c);
        }
    }

    const std::complex<double> v_root =
        std::sqrt(net.v0()) * std::exp(std::complex<double>(0.0, net.delta0()));

    SweepResult out;
    out.v_mag.resize(m);
    out.angle.resize(m);

    for (int phase = 0; phase < (net.phase_count() == 3 ? 3 : 1); ++phase) {
        std::vector<char> has(n + 1, 0);
        has[0] = 1;
        for (int v = 1; v <= n; ++v) has[v] = (net.phase_mask(v) >> phase) & 1;

        std::vector<std::complex<double>> voltage(n + 1, v_root);
        std::vector<std::complex<double>> branch(n + 1);  // current parent→v

        int it = 0;
        for (; it < opt.max_iter; ++it) {
            // Backward: accumulate demand currents from the leaves up.
            for (int idx = n - 1; idx >= 0; --idx) {
                int v = order[idx];
                if (!has[v]) continue;
                int ch = net.channel_of(v, phase);
                std::complex<double> inj(p(ch), q(ch));
                branch[v] = -std::conj(inj / voltage[v]);
                for (int c : children[v])
                    if (has[c]) branch[v] += branch[c];
            }
            // Forward: drop voltages along each branch.
            double mismatch = 0.0;
            for (int v : order) {
                if (!has[v]) continue;
                const Edge& e = net.edges()[net.edge_to(v)];
                std::complex<double> z(e.r, e.x);
                std::complex<double> next = voltage[net.parent(v)] - z * branch[v];
                mismatch = std::max(mismatch, std::abs(next - voltage[v]));
                voltage[v] = next;
                if (!(std::abs(next) > 0.1))
                    throw PowerFlowDiverged("voltage collapse at node " + std::to_string(v) +
                                            "; operating point is far from the linearization");
            }
            if (mismatch < opt.tol) break;
        }
        if (it == opt.max_iter)
            throw PowerFlowDiverged("sweep did not reach " + std::to_string(opt.tol) + " p.u. in " +
                                    std::to_string(opt.max_iter) + " iterations");

        for (int v = 1; v <= n; ++v) {
            if (!has[v]) continue;
            int ch = net.channel_of(v, phase);
            out.v_mag(ch) = std::abs(voltage[v]);
            out.angle(ch) = std::arg(voltage[v]);
        }
        out.iterations = std::max(out.iterations, it + 1);
    }
    return out;
}

}  // namespace derstab
