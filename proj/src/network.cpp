#include "derstab/network.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace derstab {

namespace {

int popcount3(int mask) { return ((mask >> 0) & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1); }

}  // namespace

RadialNetwork::RadialNetwork(int node_count, std::vector<Edge> edges, int phase_count,
                             double v0, double delta0, std::vector<int> phase_mask)
    : n_(node_count), phase_count_(phase_count), v0_(v0), delta0_(delta0), edges_(std::move(edges)) {
    if (n_ < 1) throw TopologyError("network needs at least one node beyond the substation");
    if (phase_count_ != 1 && phase_count_ != 3)
        throw TopologyError("phase_count must be 1 or 3");
    if (static_cast<int>(edges_.size()) != n_)
        throw TopologyError("a radial network on nodes 0.." + std::to_string(n_) + " needs exactly " +
                            std::to_string(n_) + " edges, got " + std::to_string(edges_.size()));

    const int full = phase_count_ == 3 ? 0b111 : 0b001;
    mask_ = std::move(phase_mask);
    if (mask_.empty()) mask_.assign(n_ + 1, full);
    if (static_cast<int>(mask_.size()) != n_ + 1)
        throw TopologyError("phase mask must cover nodes 0..n");
    mask_[0] = full;

    std::vector<std::vector<std::pair<int, int>>> adj(n_ + 1);  // (neighbor, edge index)
    std::set<std::pair<int, int>> seen;
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        const Edge& ed = edges_[e];
        if (ed.from < 0 || ed.from > n_ || ed.to < 0 || ed.to > n_)
            throw TopologyError("edge endpoint out of range: " + std::to_string(ed.from) + "-" +
                                std::to_string(ed.to));
        if (ed.from == ed.to) throw TopologyError("self-loop at node " + std::to_string(ed.from));
        if (!seen.insert({ed.from, ed.to}).second)
            throw ParseError("duplicate edge " + std::to_string(ed.from) + " " + std::to_string(ed.to));
        adj[ed.from].push_back({ed.to, e});
        adj[ed.to].push_back({ed.from, e});
    }

    parent_.assign(n_ + 1, -1);
    edge_of_.assign(n_ + 1, -1);
    depth_.assign(n_ + 1, 0);
    std::vector<char> visited(n_ + 1, 0);
    std::deque<int> queue{0};
    visited[0] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (auto [w, e] : adj[v]) {
            if (w == parent_[v] && e == edge_of_[v]) continue;
            if (visited[w])
                throw TopologyError("cycle through nodes " + std::to_string(v) + " and " + std::to_string(w));
            visited[w] = 1;
            parent_[w] = v;
            edge_of_[w] = e;
            depth_[w] = depth_[v] + 1;
            queue.push_back(w);
        }
    }
    for (int v = 0; v <= n_; ++v)
        if (!visited[v]) throw TopologyError("node " + std::to_string(v) + " has no path to the substation");

    for (int v = 1; v <= n_; ++v) {
        if (mask_[v] == 0) throw TopologyError("node " + std::to_string(v) + " has no phases");
        if ((mask_[v] & ~full) != 0) throw TopologyError("node " + std::to_string(v) + " phase out of range");
        if ((mask_[v] & ~mask_[parent_[v]]) != 0)
            throw TopologyError("node " + std::to_string(v) + " carries a phase its parent lacks");
    }

    base_.assign(n_ + 1, 0);
    int ch = 0;
    for (int v = 1; v <= n_; ++v) {
        base_[v] = ch;
        for (int p = 0; p < 3; ++p) {
            if (mask_[v] & (1 << p)) {
                ch_node_.push_back(v);
                ch_phase_.push_back(p);
                ++ch;
            }
        }
    }
    channel_total_ = ch;
}

int RadialNetwork::parent(int node) const {
    if (node < 1 || node > n_) throw IndexError("node " + std::to_string(node) + " out of range");
    return parent_[node];
}

int RadialNetwork::edge_to(int node) const {
    if (node < 1 || node > n_) throw IndexError("node " + std::to_string(node) + " out of range");
    return edge_of_[node];
}

int RadialNetwork::depth(int node) const {
    if (node < 0 || node > n_) throw IndexError("node " + std::to_string(node) + " out of range");
    return depth_[node];
}

int RadialNetwork::lowest_common_ancestor(int i, int j) const {
    if (i < 0 || i > n_ || j < 0 || j > n_) throw IndexError("node out of range in LCA query");
    while (depth_[i] > depth_[j]) i = parent_[i];
    while (depth_[j] > depth_[i]) j = parent_[j];
    while (i != j) {
        i = parent_[i];
        j = parent_[j];
    }
    return i;
}

int RadialNetwork::channel_width(int node) const {
    if (node < 1 || node > n_) throw IndexError("node " + std::to_string(node) + " out of range");
    return popcount3(mask_[node]);
}

int RadialNetwork::channel_of(int node, int phase) const {
    if (node < 1 || node > n_) throw IndexError("node " + std::to_string(node) + " out of range");
    if (phase < 0 || phase > 2 || !(mask_[node] & (1 << phase)))
        throw IndexError("node " + std::to_string(node) + " has no phase " + std::to_string(phase));
    int offset = 0;
    for (int p = 0; p < phase; ++p)
        if (mask_[node] & (1 << p)) ++offset;
    return base_[node] + offset;
}

namespace {

int parse_phase_set(const std::string& token, int line_no) {
    int mask = 0;
    for (char c : token) {
        if (c < 'a' || c > 'c')
            throw ParseError("line " + std::to_string(line_no) + ": bad phase letter '" + std::string(1, c) + "'");
        mask |= 1 << (c - 'a');
    }
    if (mask == 0) throw ParseError("line " + std::to_string(line_no) + ": empty phase set");
    return mask;
}

double parse_num(const std::string& token, int line_no) {
    try {
        size_t used = 0;
        double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected a number, got '" + token + "'");
    }
}

// One 3x3 block cell "r:x".
std::pair<double, double> parse_block_entry(const std::string& token, int line_no) {
    auto colon = token.find(':');
    if (colon == std::string::npos)
        throw ParseError("line " + std::to_string(line_no) + ": block entry '" + token + "' must look like r:x");
    return {parse_num(token.substr(0, colon), line_no), parse_num(token.substr(colon + 1), line_no)};
}

}  // namespace

RadialNetwork parse_feeder(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;

    int phase_count = 1;
    double v0 = 1.0;
    double delta0 = 0.0;
    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> node_masks;  // (id, mask) declarations
    int max_id = 0;
    std::set<int> mentioned;

    while (std::getline(stream, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string keyword;
        if (!(words >> keyword)) continue;

        auto next = [&](const char* what) {
            std::string token;
            if (!(words >> token))
                throw ParseError("line " + std::to_string(line_no) + ": missing " + what);
            return token;
        };

        if (keyword == "phases") {
            phase_count = static_cast<int>(parse_num(next("phase count"), line_no));
            if (phase_count != 1 && phase_count != 3)
                throw ParseError("line " + std::to_string(line_no) + ": phases must be 1 or 3");
        } else if (keyword == "v0") {
            v0 = parse_num(next("v0 value"), line_no);
        } else if (keyword == "delta0") {
            delta0 = parse_num(next("delta0 value"), line_no);
        } else if (keyword == "node") {
            int id = static_cast<int>(parse_num(next("node id"), line_no));
            if (id < 0) throw ParseError("line " + std::to_string(line_no) + ": negative node id");
            max_id = std::max(max_id, id);
            mentioned.insert(id);
            std::string opt;
            while (words >> opt) {
                if (opt.rfind("phases=", 0) == 0) {
                    node_masks.push_back({id, parse_phase_set(opt.substr(7), line_no)});
                } else {
                    throw ParseError("line " + std::to_string(line_no) + ": unknown node option '" + opt + "'");
                }
            }
        } else if (keyword == "edge") {
            Edge e;
            e.from = static_cast<int>(parse_num(next("edge endpoint"), line_no));
            e.to = static_cast<int>(parse_num(next("edge endpoint"), line_no));
            e.r = parse_num(next("edge resistance"), line_no);
            e.x = parse_num(next("edge reactance"), line_no);
            if (e.from < 0 || e.to < 0)
                throw ParseError("line " + std::to_string(line_no) + ": negative node id");
            if (e.r < 0 || e.x < 0)
                throw ParseError("line " + std::to_string(line_no) + ": negative impedance");
            if (e.r == 0 && e.x == 0)
                throw ParseError("line " + std::to_string(line_no) + ": edge needs r > 0 or x > 0");
            std::vector<std::pair<double, double>> cells;
            std::string token;
            while (words >> token) cells.push_back(parse_block_entry(token, line_no));
            if (!cells.empty()) {
                if (cells.size() != 9)
                    throw ParseError("line " + std::to_string(line_no) + ": a 3-phase block needs 9 r:x entries");
                Eigen::Matrix3d rb, xb;
                for (int k = 0; k < 9; ++k) {
                    rb(k / 3, k % 3) = cells[k].first;
                    xb(k / 3, k % 3) = cells[k].second;
                }
                e.rb = rb;
                e.xb = xb;
            }
            for (const Edge& other : edges)
                if (other.from == e.from && other.to == e.to)
                    throw ParseError("line " + std::to_string(line_no) + ": duplicate edge " +
                                     std::to_string(e.from) + " " + std::to_string(e.to));
            max_id = std::max({max_id, e.from, e.to});
            mentioned.insert(e.from);
            mentioned.insert(e.to);
            edges.push_back(e);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown keyword '" + keyword + "'");
        }
    }

    if (edges.empty()) throw ParseError("feeder file declares no edges");
    for (int id = 0; id <= max_id; ++id)
        if (!mentioned.count(id))
            throw TopologyError("node ids must be contiguous; " + std::to_string(id) + " is missing");

    std::vector<int> mask;
    if (phase_count == 3) {
        mask.assign(max_id + 1, 0b111);
        for (auto [id, m] : node_masks) mask[id] = m;
    } else if (!node_masks.empty()) {
        throw ParseError("phases=... declarations need a 'phases 3' feeder");
    }
    return RadialNetwork(max_id, std::move(edges), phase_count, v0, delta0, std::move(mask));
}

ImpedanceMatrices build_impedance_matrices(const RadialNetwork& net) {
    const int n = net.node_count();

    // Accumulated path impedance from the substation to each node, one 3x3
    // block per node (scalar feeders use the (0,0) cell). Accumulating in
    // BFS order keeps every path sum a prefix sum, so entries that share a
    // path prefix are bit-identical.
    std::vector<Eigen::Matrix3d> cum_r(n + 1, Eigen::Matrix3d::Zero());
    std::vector<Eigen::Matrix3d> cum_x(n + 1, Eigen::Matrix3d::Zero());
    std::vector<int> order(n);
    for (int v = 1; v <= n; ++v) order[v - 1] = v;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return net.depth(a) != net.depth(b) ? net.depth(a) < net.depth(b) : a < b;
    });
    for (int v : order) {
        const Edge& e = net.edges()[net.edge_to(v)];
        Eigen::Matrix3d rb = e.rb ? *e.rb : Eigen::Matrix3d(e.r * Eigen::Matrix3d::Identity());
        Eigen::Matrix3d xb = e.xb ? *e.xb : Eigen::Matrix3d(e.x * Eigen::Matrix3d::Identity());
        cum_r[v] = cum_r[net.parent(v)] + rb;
        cum_x[v] = cum_x[net.parent(v)] + xb;
    }

    const int m = net.channel_count();
    ImpedanceMatrices mats;
    mats.R = Eigen::MatrixXd::Zero(m, m);
    mats.X = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            int lca = net.lowest_common_ancestor(net.channel_node(a), net.channel_node(b));
            mats.R(a, b) = 2.0 * cum_r[lca](net.channel_phase(a), net.channel_phase(b));
            mats.X(a, b) = 2.0 * cum_x[lca](net.channel_phase(a), net.channel_phase(b));
        }
    }
    return mats;
}

std::complex<double> common_node_impedance(const RadialNetwork& net,
                                           const ImpedanceMatrices& mats, int i, int j) {
    (void)mats;
    if (i < 1 || i > net.node_count() || j < 1 || j > net.node_count())
        throw IndexError("common_node_impedance: node out of range");
    int lca = net.lowest_common_ancestor(i, j);
    double r = 0.0, x = 0.0;
    for (int v = lca; v != 0; v = net.parent(v)) {
        const Edge& e = net.edges()[net.edge_to(v)];
        r += e.r;
        x += e.x;
    }
    return {2.0 * r, 2.0 * x};
}

}  // namespace derstab
