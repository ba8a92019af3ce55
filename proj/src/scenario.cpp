#include "derstab/scenario.hpp"

#include <filesystem>
#include <sstream>

#include "derstab/errors.hpp"
#include "derstab/report.hpp"

namespace derstab {

namespace {

int hhmm_to_minutes(const std::string& value) {
    if (value.size() != 4) throw ParseError("time '" + value + "' must be hhmm");
    return std::stoi(value.substr(0, 2)) * 60 + std::stoi(value.substr(2, 2));
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Scenario parse_scenario(const std::string& path) {
    std::string text = read_file(path);
    auto dir = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (dir / fp).string();
    };

    Scenario sc;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("scenario line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "feeder") sc.feeder_path = resolve(value);
            else if (key == "placement") sc.placement_path = resolve(value);
            else if (key == "tariff") sc.tariff_path = resolve(value);
            else if (key == "profiles") sc.profiles_path = resolve(value);
            else if (key == "sitings") {
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ','))
                    sc.siting_paths.push_back(resolve(trim(item)));
            } else if (key == "eps") sc.eps = std::stod(value);
            else if (key == "pattern") {
                if (value == "full") sc.pattern_scope = PatternScope::FullBlocks;
                else if (value == "phase") sc.pattern_scope = PatternScope::PhaseMatched;
                else throw ParseError("pattern must be full or phase");
            }
            else if (key == "range_mode") {
                if (value == "paper") sc.range_mode = RangeMode::PaperSquare;
                else if (value == "safe") sc.range_mode = RangeMode::SafeHypercube;
                else throw ParseError("range_mode must be paper or safe");
            } else if (key == "gain_policy") {
                if (value != "midpoint" && value != "upper" && value != "lower" && value != "benchmark")
                    throw ParseError("gain_policy must be midpoint, upper, lower or benchmark");
                sc.gain_policy = value;
            } else if (key == "gain_scale") sc.gain_scale = std::stod(value);
            else if (key == "truth") {
                if (value == "linear") sc.truth = TruthModel::Linear;
                else if (value == "sweep") sc.truth = TruthModel::Sweep;
                else throw ParseError("truth must be linear or sweep");
            } else if (key == "horizon_steps") sc.horizon_steps = std::stoi(value);
            else if (key == "delta_s") sc.delta_s = std::stod(value);
            else if (key == "k_on_s") sc.k_on_s = std::stod(value);
            else if (key == "seed") sc.seed = std::stoull(value);
            else if (key == "start_hhmm") sc.start_minutes = hhmm_to_minutes(value);
            else if (key == "band") sc.band = std::stod(value);
            else if (key == "inner_band") sc.inner_band = std::stod(value);
            else if (key == "nominal") sc.nominal = std::stod(value);
            else if (key == "sbase_kva") sc.sbase_kva = std::stod(value);
            else if (key == "power_cap") sc.power_cap = std::stod(value);
            else if (key == "base_load") sc.shape.base_load = std::stod(value);
            else if (key == "solar_penetration") sc.shape.solar_penetration = std::stod(value);
            else if (key == "noise_level") sc.shape.noise_level = std::stod(value);
            else if (key == "event_hhmm") sc.shape.event_minutes = hhmm_to_minutes(value);
            else if (key == "event_width_min") sc.shape.event_width_minutes = std::stod(value);
            else if (key == "load_power_factor") sc.shape.load_power_factor = std::stod(value);
            else if (key == "light_nodes") {
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ','))
                    sc.shape.light_nodes.push_back(std::stoi(trim(item)));
            } else if (key == "light_scale") sc.shape.light_scale = std::stod(value);
            else throw ParseError("unknown key '" + key + "'");
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("scenario line " + std::to_string(line_no) + ": bad value '" + value +
                             "' for " + key);
        }
    }
    if (sc.feeder_path.empty()) throw ParseError("scenario needs a feeder path");
    return sc;
}

ModelBundle load_model(const Scenario& scenario) {
    return load_model(scenario, scenario.placement_path);
}

ModelBundle load_model(const Scenario& scenario, const std::string& placement_path) {
    if (placement_path.empty()) throw FileError("scenario needs a placement path");
    RadialNetwork net = parse_feeder(read_file(scenario.feeder_path));
    ImpedanceMatrices mats = build_impedance_matrices(net);
    Placement placement = parse_placement(read_file(placement_path));
    IndexSets sets = build_index_sets(placement, net);
    StateSpace ss = reduce(build_open_loop(mats, sets));
    SparsityPattern pattern = pattern_from_links(placement, net, sets, scenario.pattern_scope);
    return ModelBundle{std::move(net), std::move(mats), std::move(placement),
                       std::move(sets),  std::move(ss),  std::move(pattern)};
}

Profile load_profile(const Scenario& scenario, const RadialNetwork& net) {
    if (!scenario.profiles_path.empty())
        return profile_from_csv(read_file(scenario.profiles_path), net, scenario.delta_s,
                                scenario.start_minutes);
    return synth_profiles(scenario.shape, net, scenario.seed, scenario.delta_s,
                          scenario.horizon_steps, scenario.start_minutes);
}

GainMatrix scenario_gain(const Scenario& scenario, const ModelBundle& model) {
    GainMatrix gain;
    if (scenario.gain_policy == "benchmark") {
        // The benchmark policy prescribes a gain at every same-phase
        // magnitude→reactive pair, whatever the communication links say.
        Placement all_to_all = model.placement;
        all_to_all.links.clear();
        gain = benchmark_gain(model.ss, pattern_from_links(all_to_all, model.net, model.sets,
                                                           PatternScope::PhaseMatched));
    } else {
        auto poly = build_polytope(model.ss, model.pattern, scenario.eps);
        auto cheb = chebyshev(poly);
        auto ranges = parameter_ranges(cheb, scenario.range_mode);
        GainPolicy policy = scenario.gain_policy == "upper"   ? GainPolicy::Upper
                            : scenario.gain_policy == "lower" ? GainPolicy::Lower
                                                              : GainPolicy::Midpoint;
        gain = sample_gain(ranges, model.pattern, policy);
    }
    if (scenario.gain_scale != 1.0) gain.F *= scenario.gain_scale;
    return gain;
}

}  // namespace derstab
