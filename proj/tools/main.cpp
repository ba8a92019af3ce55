#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "derstab/report.hpp"
#include "derstab/scenario.hpp"
#include "derstab/svg.hpp"

namespace {

using namespace derstab;

struct GlobalOpts {
    std::string scenario_path;
    std::string out_dir = ".";
    bool require_stable = false;
    bool emit_svg = false;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps;
    std::optional<std::string> range_mode;
    std::optional<std::string> truth;
};

Scenario load_scenario(const GlobalOpts& opts) {
    if (opts.scenario_path.empty()) throw FileError("--scenario is required");
    Scenario sc = parse_scenario(opts.scenario_path);
    if (opts.seed) sc.seed = *opts.seed;
    if (opts.eps) sc.eps = *opts.eps;
    if (opts.range_mode) {
        if (*opts.range_mode == "paper") sc.range_mode = RangeMode::PaperSquare;
        else if (*opts.range_mode == "safe") sc.range_mode = RangeMode::SafeHypercube;
        else throw ParseError("--range-mode must be paper or safe");
    }
    if (opts.truth) {
        if (*opts.truth == "linear") sc.truth = TruthModel::Linear;
        else if (*opts.truth == "sweep") sc.truth = TruthModel::Sweep;
        else throw ParseError("--truth must be linear or sweep");
    }
    return sc;
}

std::string out_path(const GlobalOpts& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

int cmd_build(const GlobalOpts& opts) {
    Scenario sc = load_scenario(opts);
    ModelBundle model = load_model(sc);
    std::cout << "nodes        " << model.net.node_count() << "\n"
              << "channels     " << model.net.channel_count() << "\n"
              << "d (inputs)   " << model.ss.input_dim() << "\n"
              << "s (outputs)  " << model.ss.output_dim() << "\n"
              << "y (gains)    " << model.pattern.size() << "\n"
              << "|B|          " << model.ss.B.norm() << "\n"
              << "|B_reduced|  " << model.ss.B_red.norm() << "\n";
    write_file(out_path(opts, "build.json"), model_summary_json(model.ss, model.pattern));
    return 0;
}

int cmd_stability(const GlobalOpts& opts) {
    Scenario sc = load_scenario(opts);
    ModelBundle model = load_model(sc);
    GainMatrix gain = scenario_gain(sc, model);
    StabilityReport report = analyze(closed_loop(model.ss, gain), sc.eps);

    std::cout << "gain policy  " << sc.gain_policy
              << (sc.gain_scale != 1.0 ? " (x" + std::to_string(sc.gain_scale) + ")" : "") << "\n";
    std::cout << "row  center      radius\n";
    for (const auto& d : report.discs)
        std::cout << d.row << "    " << d.center << "  " << d.radius << "\n";
    std::cout << "eig verdict  " << (report.eig_verdict ? "stable" : "NOT guaranteed") << "\n"
              << "disc verdict " << (report.disc_verdict ? "stable" : "NOT guaranteed") << "\n"
              << "margin       " << report.margin << "\n"
              << "rho_hat      " << report.rho_hat << "\n"
              << "rho_exact    " << report.rho_exact << "\n";
    write_file(out_path(opts, "stability.json"), stability_report_json(report));
    if (opts.require_stable && !report.eig_verdict) return 1;
    return 0;
}

int cmd_region(const GlobalOpts& opts) {
    Scenario sc = load_scenario(opts);
    ModelBundle model = load_model(sc);
    ParameterPolytope poly = build_polytope(model.ss, model.pattern, sc.eps);
    ChebyshevResult cheb = chebyshev(poly);
    auto ranges = parameter_ranges(cheb, sc.range_mode);

    std::cout << "parameters (y)    " << poly.y << "\n"
              << "polytope rows     " << poly.rows.size() << "\n"
              << "chebyshev radius  " << cheb.radius << "\n"
              << "range width       " << ranges.front().width() << " ("
              << (sc.range_mode == RangeMode::PaperSquare ? "paper-square" : "safe-hypercube")
              << ")\n";
    write_file(out_path(opts, "region.json"), region_report_json(poly, cheb, ranges, sc.range_mode));
    write_file(out_path(opts, "polytope.csv"), polytope_to_csv(poly));
    if (opts.emit_svg && poly.y >= 2)
        write_file(out_path(opts, "region_slice.svg"),
                   svg::region_slice_plot(model.ss, model.pattern, cheb, ranges, 0, 1));
    return 0;
}

SimOptions sim_options(const Scenario& sc) {
    SimOptions opt;
    opt.truth = sc.truth;
    opt.k_on = sc.k_on();
    opt.power_cap = sc.power_cap;
    return opt;
}

int cmd_simulate(const GlobalOpts& opts) {
    Scenario sc = load_scenario(opts);
    ModelBundle model = load_model(sc);
    GainMatrix gain = scenario_gain(sc, model);
    Profile profile = load_profile(sc, model.net);
    Trace trace = simulate(model.net, model.mats, model.ss, gain, profile, std::nullopt, sim_options(sc));
    MetricsReport rep = metrics(trace, sc.band, sc.nominal, sc.inner_band);

    std::cout << "violation share  " << rep.violation_share << "\n"
              << "settling steps   " << rep.settling_steps << "\n"
              << "saturations      " << trace.saturation_events << "\n";
    write_file(out_path(opts, "trace.csv"), trace_to_csv(trace, model.net));
    write_file(out_path(opts, "metrics.json"), metrics_report_json(rep, trace));
    if (opts.emit_svg) write_file(out_path(opts, "envelope.svg"), svg::envelope_plot(rep, trace));
    return 0;
}

int cmd_economics(const GlobalOpts& opts) {
    Scenario sc = load_scenario(opts);
    if (sc.tariff_path.empty()) throw FileError("economics needs a tariff path in the scenario");
    ModelBundle model = load_model(sc);
    Tariff tariff = parse_tariff(read_file(sc.tariff_path));
    Profile profile = load_profile(sc, model.net);
    SimOptions opt = sim_options(sc);

    ParameterPolytope poly = build_polytope(model.ss, model.pattern, sc.eps);
    ChebyshevResult cheb = chebyshev(poly);
    auto ranges = parameter_ranges(cheb, sc.range_mode);

    GainMatrix off = GainMatrix::unpack(Eigen::VectorXd::Zero(model.pattern.size()), model.pattern);
    GainMatrix midpoint = sample_gain(ranges, model.pattern, GainPolicy::Midpoint);

    GainSchedule adjusted;
    int previous = -1;  // -1 none, 0 midpoint, 1 voltreg, 2 energy
    for (int k = 0; k < profile.steps; ++k) {
        int minute = profile.minutes_at(k);
        int mode = tariff.voltreg_on(minute) ? 1 : tariff.energy_on(minute) ? 2 : 0;
        if (mode != previous) {
            GainPolicy policy = mode == 1   ? GainPolicy::VoltRegPeak
                                : mode == 2 ? GainPolicy::RealPowerPeak
                                            : GainPolicy::Midpoint;
            adjusted.stages.push_back({k, sample_gain(ranges, model.pattern, policy)});
            previous = mode;
        }
    }

    Trace trace_off = simulate(model.net, model.mats, model.ss, off, profile, std::nullopt, opt);
    Trace trace_fixed = simulate(model.net, model.mats, model.ss, midpoint, profile, std::nullopt, opt);
    Trace trace_adj = simulate(model.net, model.mats, model.ss, adjusted, profile, std::nullopt, opt);

    RevenueColumn fixed = economics(trace_fixed, trace_off, tariff, sc.sbase_kva);
    RevenueColumn adj = economics(trace_adj, trace_off, tariff, sc.sbase_kva);

    auto row = [](const std::string& label, double a, double b) {
        std::cout << label << "  " << a << "  " << b << "\n";
    };
    std::cout << "                                   fixed      adjusted\n";
    row("voltreg effort off-peak (pu-h) ", fixed.effort_off_puh, adj.effort_off_puh);
    row("voltreg revenue off-peak       ", fixed.voltreg_revenue_off, adj.voltreg_revenue_off);
    row("voltreg effort on-peak (pu-h)  ", fixed.effort_on_puh, adj.effort_on_puh);
    row("voltreg revenue on-peak        ", fixed.voltreg_revenue_on, adj.voltreg_revenue_on);
    row("real power off-peak (kWh)      ", fixed.energy_off_kwh, adj.energy_off_kwh);
    row("real power revenue off-peak    ", fixed.energy_revenue_off, adj.energy_revenue_off);
    row("real power on-peak (kWh)       ", fixed.energy_on_kwh, adj.energy_on_kwh);
    row("real power revenue on-peak     ", fixed.energy_revenue_on, adj.energy_revenue_on);
    row("total                          ", fixed.total(), adj.total());

    write_file(out_path(opts, "economics.json"), revenue_report_json(fixed, adj));
    write_file(out_path(opts, "trace_fixed.csv"), trace_to_csv(trace_fixed, model.net));
    write_file(out_path(opts, "trace_adjusted.csv"), trace_to_csv(trace_adj, model.net));
    write_file(out_path(opts, "trace_off.csv"), trace_to_csv(trace_off, model.net));
    return 0;
}

int cmd_sitescan(const GlobalOpts& opts, const std::vector<std::string>& extra) {
    Scenario sc = load_scenario(opts);
    std::vector<std::string> sitings = sc.siting_paths;
    sitings.insert(sitings.end(), extra.begin(), extra.end());
    if (sitings.empty()) throw FileError("site-scan needs siting placement files");

    std::cout << "siting  d  s  y  radius  margin@midpoint\n";
    std::string doc;
    for (const auto& path : sitings) {
        ModelBundle model = load_model(sc, path);
        ParameterPolytope poly = build_polytope(model.ss, model.pattern, sc.eps);
        ChebyshevResult cheb = chebyshev(poly);
        auto ranges = parameter_ranges(cheb, sc.range_mode);
        GainMatrix mid = sample_gain(ranges, model.pattern, GainPolicy::Midpoint);
        auto [margin, rho_hat] = stability_margin(closed_loop(model.ss, mid));
        std::cout << std::filesystem::path(path).filename().string() << "  " << model.ss.input_dim()
                  << "  " << model.ss.output_dim() << "  " << model.pattern.size() << "  "
                  << cheb.radius << "  " << margin << "\n";
        doc += std::filesystem::path(path).filename().string() + "," +
               std::to_string(model.ss.input_dim()) + "," + std::to_string(model.ss.output_dim()) +
               "," + std::to_string(model.pattern.size()) + "," + std::to_string(cheb.radius) +
               "," + std::to_string(margin) + "\n";
    }
    write_file(out_path(opts, "sitescan.csv"), "siting,d,s,y,radius,margin_midpoint\n" + doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-signal voltage stability analysis for DER control on radial feeders"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts opts;
    app.add_option("--scenario", opts.scenario_path, "scenario key-value file");
    app.add_option("--out", opts.out_dir, "output directory");
    app.add_option("--seed", [&](const CLI::results_t& r) { opts.seed = std::stoull(r[0]); return true; },
                   "override the scenario seed");
    app.add_option("--eps", [&](const CLI::results_t& r) { opts.eps = std::stod(r[0]); return true; },
                   "override the disc-condition margin");
    app.add_option("--range-mode", [&](const CLI::results_t& r) { opts.range_mode = r[0]; return true; },
                   "paper | safe");
    app.add_option("--truth", [&](const CLI::results_t& r) { opts.truth = r[0]; return true; },
                   "linear | sweep");
    app.add_flag("--require-stable", opts.require_stable, "exit 1 when the verdict is unstable");
    app.add_flag("--svg", opts.emit_svg, "emit figures next to the reports");

    auto* build = app.add_subcommand("build", "assemble the model and print its dimensions");
    auto* stability = app.add_subcommand("stability", "disc and eigenvalue stability report");
    auto* region = app.add_subcommand("region", "stability polytope, Chebyshev ball and ranges");
    auto* simulate = app.add_subcommand("simulate", "closed-loop simulation with metrics");
    auto* economics = app.add_subcommand("economics", "daily revenue with fixed vs adjusted gains");
    auto* sitescan = app.add_subcommand("site-scan", "compare candidate sitings");
    std::vector<std::string> scan_args;
    sitescan->add_option("sitings", scan_args, "additional placement files");

    CLI11_PARSE(app, argc, argv);

    auto started = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (build->parsed()) code = cmd_build(opts);
        else if (stability->parsed()) code = cmd_stability(opts);
        else if (region->parsed()) code = cmd_region(opts);
        else if (simulate->parsed()) code = cmd_simulate(opts);
        else if (economics->parsed()) code = cmd_economics(opts);
        else if (sitescan->parsed()) code = cmd_sitescan(opts, scan_args);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const TopologyError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const IndexError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const FileError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const AssumptionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const SparsityError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const MismatchedScenario& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }

    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    std::cerr << "elapsed: " << elapsed.count() << " s\n";
    return code;
}
