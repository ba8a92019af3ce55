#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "derstab/network.hpp"

namespace derstab {

/// Uncontrolled per-channel injection series (generation positive, p.u.) at
/// interval delta_s over `steps` steps, starting at `start_minutes` of day.
struct Profile {
    double delta_s = 5.0;
    int steps = 0;
    int start_minutes = 0;
    Eigen::MatrixXd p;  // channels × steps
    Eigen::MatrixXd q;

    int minutes_at(int k) const {
        return (start_minutes + static_cast<int>(k * delta_s / 60.0)) % 1440;
    }
};

/// Synthetic-day descriptor standing in for metered load/solar data: a daily
/// load curve plus a solar bell around `event_minutes`, with solar sized so
/// that max(solar)/max(load) = `solar_penetration` per node.
struct ProfileShape {
    double base_load = 0.004;       // per-channel load scale, p.u.
    double solar_penetration = 1.25;
    double noise_level = 0.02;
    double event_minutes = 660.0;   // 11:00
    double event_width_minutes = 150.0;
    double load_power_factor = 0.95;
    // Spatial heterogeneity: nodes listed here carry `light_scale` times the
    // base load and solar (a lightly loaded rural stretch).
    std::vector<int> light_nodes;
    double light_scale = 1.0;
};

/// Deterministic by seed: the same inputs produce bit-identical series.
Profile synth_profiles(const ProfileShape& shape, const RadialNetwork& net, std::uint64_t seed,
                       double delta_s, int steps, int start_minutes);

/// CSV with header t,node,phase,p,q (t in seconds, phase 1-based).
std::string profile_to_csv(const Profile& profile, const RadialNetwork& net);
Profile profile_from_csv(const std::string& text, const RadialNetwork& net, double delta_s,
                         int start_minutes);

/// Small deterministic RNG (xorshift64*) used wherever reproducibility is
/// part of the output contract; avoids the implementation-defined sequences
/// of std::normal_distribution and friends.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x2545f4914f6cdd1dull) {}
    std::uint64_t next() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gauss();  // Box-Muller

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace derstab
