#include "derstab/profiles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace derstab {

double Rng::gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
}

Profile synth_profiles(const ProfileShape& shape, const RadialNetwork& net, std::uint64_t seed,
                       double delta_s, int steps, int start_minutes) {
    const int m = net.channel_count();
    Profile prof;
    prof.delta_s = delta_s;
    prof.steps = steps;
    prof.start_minutes = start_minutes;
    prof.p = Eigen::MatrixXd::Zero(m, steps);
    prof.q = Eigen::MatrixXd::Zero(m, steps);

    Rng rng(seed);
    const double tan_phi =
        std::tan(std::acos(std::min(1.0, std::max(0.1, shape.load_power_factor))));

    // Daily load curve with a morning rise and an evening peak near 1.
    auto load_shape = [](double minutes) {
        double h = minutes / 60.0;
        double morning = std::exp(-0.5 * std::pow((h - 9.0) / 4.0, 2.0));
        double evening = std::exp(-0.5 * std::pow((h - 19.0) / 3.0, 2.0));
        return 0.45 + 0.25 * morning + 0.55 * evening;
    };
    auto solar_shape = [&](double minutes) {
        double dm = minutes - shape.event_minutes;
        return std::exp(-0.5 * std::pow(dm / shape.event_width_minutes, 2.0));
    };

    std::vector<char> light(net.node_count() + 1, 0);
    for (int node : shape.light_nodes)
        if (node >= 1 && node <= net.node_count()) light[node] = 1;

    for (int ch = 0; ch < m; ++ch) {
        // Per-channel level diversity, fixed across the day. The weight is
        // applied after the draw so the random stream does not depend on it.
        double weight = light[net.channel_node(ch)] ? shape.light_scale : 1.0;
        double load_level = weight * shape.base_load * rng.uniform(0.75, 1.25);
        double solar_level = shape.solar_penetration * load_level;
        for (int k = 0; k < steps; ++k) {
            double minutes = start_minutes + k * delta_s / 60.0;
            double load = load_level * load_shape(minutes) * (1.0 + shape.noise_level * rng.gauss());
            double solar = solar_level * solar_shape(minutes) *
                           std::max(0.0, 1.0 + shape.noise_level * rng.gauss());
            prof.p(ch, k) = solar - load;
            prof.q(ch, k) = -load * tan_phi;
        }
    }
    return prof;
}

std::string profile_to_csv(const Profile& profile, const RadialNetwork& net) {
    std::ostringstream out;
    out << "t,node,phase,p,q\n";
    out.precision(17);
    for (int k = 0; k < profile.steps; ++k)
        for (int ch = 0; ch < net.channel_count(); ++ch)
            out << k * profile.delta_s << ',' << net.channel_node(ch) << ','
                << net.channel_phase(ch) + 1 << ',' << profile.p(ch, k) << ','
                << profile.q(ch, k) << '\n';
    return out.str();
}

Profile profile_from_csv(const std::string& text, const RadialNetwork& net, double delta_s,
                         int start_minutes) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,node,phase,p,q", 0) != 0)
        throw ParseError("profile CSV must start with header t,node,phase,p,q");

    struct Row {
        double t;
        int ch;
        double p, q;
    };
    std::vector<Row> rows;
    double max_t = 0.0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        double vals[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(cells, cell, ','))
                throw ParseError("profile CSV line " + std::to_string(line_no) + ": expected 5 cells");
            try {
                vals[i] = std::stod(cell);
            } catch (const std::exception&) {
                throw ParseError("profile CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        int node = static_cast<int>(vals[1]);
        int phase = static_cast<int>(vals[2]) - 1;
        rows.push_back({vals[0], net.channel_of(node, phase), vals[3], vals[4]});
        max_t = std::max(max_t, vals[0]);
    }

    Profile prof;
    prof.delta_s = delta_s;
    prof.steps = static_cast<int>(std::lround(max_t / delta_s)) + 1;
    prof.start_minutes = start_minutes;
    prof.p = Eigen::MatrixXd::Zero(net.channel_count(), prof.steps);
    prof.q = Eigen::MatrixXd::Zero(net.channel_count(), prof.steps);
    for (const auto& row : rows) {
        int k = static_cast<int>(std::lround(row.t / delta_s));
        if (k < 0 || k >= prof.steps) throw ParseError("profile CSV time out of range");
        prof.p(row.ch, k) = row.p;
        prof.q(row.ch, k) = row.q;
    }
    return prof;
}

}  // namespace derstab
