#include "derstab/placement.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "derstab/errors.hpp"

namespace derstab {

std::vector<int> Placement::der_nodes() const {
    std::vector<int> out;
    for (const auto& t : sites)
        if (t.has_der) out.push_back(t.node);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Placement::sensor_nodes() const {
    std::vector<int> out;
    for (const auto& t : sites)
        if (t.has_sensor) out.push_back(t.node);
    std::sort(out.begin(), out.end());
    return out;
}

Placement parse_placement(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    Placement p;
    std::map<int, SiteTriplet> by_node;

    auto parse_int = [&](const std::string& token) {
        try {
            size_t used = 0;
            int value = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            return value;
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + token + "'");
        }
    };

    while (std::getline(stream, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string keyword;
        if (!(words >> keyword)) continue;
        if (keyword == "site") {
            std::string node_tok;
            if (!(words >> node_tok)) throw ParseError("line " + std::to_string(line_no) + ": missing node id");
            SiteTriplet t;
            t.node = parse_int(node_tok);
            if (t.node < 1) throw ParseError("line " + std::to_string(line_no) + ": site node must be >= 1");
            std::string opt;
            while (words >> opt) {
                if (opt.rfind("der=", 0) == 0) t.has_der = parse_int(opt.substr(4)) != 0;
                else if (opt.rfind("sensor=", 0) == 0) t.has_sensor = parse_int(opt.substr(7)) != 0;
                else throw ParseError("line " + std::to_string(line_no) + ": unknown site option '" + opt + "'");
            }
            if (by_node.count(t.node))
                throw ParseError("line " + std::to_string(line_no) + ": duplicate site for node " + std::to_string(t.node));
            by_node[t.node] = t;
        } else if (keyword == "link") {
            std::string a, b;
            if (!(words >> a >> b)) throw ParseError("line " + std::to_string(line_no) + ": link needs two nodes");
            p.links.push_back({parse_int(a), parse_int(b)});
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown keyword '" + keyword + "'");
        }
    }
    for (auto& [node, t] : by_node) p.sites.push_back(t);

    for (auto [der, sensor] : p.links) {
        if (!by_node.count(der) || !by_node[der].has_der)
            throw ParseError("link references node " + std::to_string(der) + " which has no DER");
        if (!by_node.count(sensor) || !by_node[sensor].has_sensor)
            throw ParseError("link references node " + std::to_string(sensor) + " which has no sensor");
    }
    return p;
}

std::vector<int> IndexSets::D_complement() const {
    std::vector<int> out;
    auto it = D.begin();
    for (int i = 1; i <= 2 * m; ++i) {
        if (it != D.end() && *it == i) ++it;
        else out.push_back(i);
    }
    return out;
}

std::vector<int> IndexSets::S_complement() const {
    std::vector<int> out;
    auto it = S.begin();
    for (int i = 1; i <= 2 * m; ++i) {
        if (it != S.end() && *it == i) ++it;
        else out.push_back(i);
    }
    return out;
}

bool IndexSets::sensors_subset_of_ders() const {
    return std::includes(D.begin(), D.end(), S.begin(), S.end());
}

IndexSets build_index_sets(const Placement& placement, const RadialNetwork& net) {
    IndexSets sets;
    sets.m = net.channel_count();
    for (const auto& t : placement.sites)
        if (t.node < 1 || t.node > net.node_count())
            throw IndexError("site node " + std::to_string(t.node) + " not on the network");

    auto channels_of = [&](const std::vector<int>& nodes) {
        std::vector<int> out;
        for (int node : nodes)
            for (int k = 0; k < net.channel_width(node); ++k)
                out.push_back(net.channel_base(node) + k + 1);  // 1-based
        std::sort(out.begin(), out.end());
        return out;
    };
    sets.D1 = channels_of(placement.der_nodes());
    sets.S1 = channels_of(placement.sensor_nodes());

    auto doubled = [&](const std::vector<int>& block) {
        std::vector<int> out = block;
        for (int i : block) out.push_back(i + sets.m);
        return out;
    };
    sets.D = doubled(sets.D1);
    sets.S = doubled(sets.S1);
    return sets;
}

Eigen::MatrixXd SelectorMatrix::matrix() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols());
    for (int k = 0; k < cols(); ++k) out(basis[k] - 1, k) = 1.0;
    return out;
}

Eigen::VectorXd SelectorMatrix::gather(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(cols());
    for (int k = 0; k < cols(); ++k) out(k) = v(basis[k] - 1);
    return out;
}

Eigen::VectorXd SelectorMatrix::scatter(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(rows);
    for (int k = 0; k < cols(); ++k) out(basis[k] - 1) = v(k);
    return out;
}

bool SelectorMatrix::is_permutation() const {
    if (cols() != rows) return false;
    std::vector<char> hit(rows, 0);
    for (int b : basis) {
        if (b < 1 || b > rows || hit[b - 1]) return false;
        hit[b - 1] = 1;
    }
    return true;
}

SelectorMatrix selector(const std::vector<int>& omega, int c) {
    SelectorMatrix sel;
    sel.rows = c;
    sel.basis = omega;
    for (size_t k = 0; k < omega.size(); ++k) {
        if (omega[k] < 1 || omega[k] > c)
            throw DimensionError("selector index " + std::to_string(omega[k]) + " outside 1.." + std::to_string(c));
        if (k > 0 && omega[k] <= omega[k - 1])
            throw DimensionError("selector index set must be strictly increasing");
    }
    return sel;
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

Selectors build_selectors(const IndexSets& sets, bool require_colocated_sensing) {
    if (require_colocated_sensing && !sets.sensors_subset_of_ders())
        throw AssumptionError("every sensor node needs a DER (S ⊆ D) for the reduction to be minimal");

    Selectors out;
    out.der = selector(sets.D1, sets.m);
    out.sensor = selector(sets.S, 2 * sets.m);

    const auto d_comp = sets.D_complement();
    const auto s_comp = sets.S_complement();
    std::vector<int> order;
    for (const auto& part : {intersect(sets.S, sets.D), intersect(sets.S, d_comp),
                             intersect(s_comp, sets.D), intersect(s_comp, d_comp)})
        order.insert(order.end(), part.begin(), part.end());
    out.reorder.rows = 2 * sets.m;
    out.reorder.basis = order;

    std::vector<int> first_s(sets.s());
    for (int k = 0; k < sets.s(); ++k) first_s[k] = k + 1;
    out.observable = selector(first_s, 2 * sets.m);
    return out;
}

}  // namespace derstab
