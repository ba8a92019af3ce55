#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "derstab/economics.hpp"
#include "derstab/profiles.hpp"
#include "derstab/region.hpp"
#include "derstab/sim.hpp"

namespace derstab {

/// Flat key-value scenario document (`key = value`, `#` comments). Relative
/// paths are resolved against the scenario file's directory.
struct Scenario {
    std::string feeder_path;
    std::string placement_path;
    std::string tariff_path;
    std::string profiles_path;  // empty: synthesize from `shape`
    std::vector<std::string> siting_paths;

    double eps = 1e-2;
    PatternScope pattern_scope = PatternScope::FullBlocks;
    RangeMode range_mode = RangeMode::SafeHypercube;
    std::string gain_policy = "midpoint";  // midpoint | upper | lower | benchmark
    double gain_scale = 1.0;
    TruthModel truth = TruthModel::Sweep;

    int horizon_steps = 96;
    double delta_s = 5.0;
    double k_on_s = 60.0;
    std::uint64_t seed = 42;
    int start_minutes = 660;

    double band = 0.05;
    double inner_band = 0.015;
    double nominal = 1.0;
    double sbase_kva = 1000.0;
    double power_cap = 0.0;

    ProfileShape shape;

    int k_on() const { return static_cast<int>(k_on_s / delta_s); }
};

Scenario parse_scenario(const std::string& path);

/// Everything the commands need, assembled once from the scenario inputs.
struct ModelBundle {
    RadialNetwork net;
    ImpedanceMatrices mats;
    Placement placement;
    IndexSets sets;
    StateSpace ss;  // reduced
    SparsityPattern pattern;
};

ModelBundle load_model(const Scenario& scenario);
ModelBundle load_model(const Scenario& scenario, const std::string& placement_path);

Profile load_profile(const Scenario& scenario, const RadialNetwork& net);

/// Resolve the scenario's gain policy into a concrete gain, computing the
/// parameter region when the policy needs it.
GainMatrix scenario_gain(const Scenario& scenario, const ModelBundle& model);

}  // namespace derstab
