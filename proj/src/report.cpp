#include "derstab/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "derstab/errors.hpp"

namespace derstab {

using json = nlohmann::ordered_json;

std::string stability_report_json(const StabilityReport& report) {
    json doc;
    doc["eigenvalues"] = json::array();
    for (const auto& lambda : report.eigenvalues)
        doc["eigenvalues"].push_back({{"re", lambda.real()}, {"im", lambda.imag()}});
    doc["discs"] = json::array();
    for (const auto& disc : report.discs)
        doc["discs"].push_back({{"row", disc.row}, {"center", disc.center}, {"radius", disc.radius}});
    doc["eig_verdict"] = report.eig_verdict;
    doc["disc_verdict"] = report.disc_verdict;
    doc["eps"] = report.eps;
    doc["rho_hat"] = report.rho_hat;
    doc["rho_exact"] = report.rho_exact;
    doc["margin"] = report.margin;
    return doc.dump(2) + "\n";
}

std::string region_report_json(const ParameterPolytope& poly, const ChebyshevResult& cheb,
                               const std::vector<ParameterRange>& ranges, RangeMode mode) {
    json doc;
    doc["y"] = poly.y;
    doc["eps"] = poly.eps;
    doc["row_count"] = poly.rows.size();
    doc["active_groups"] = poly.active_groups;
    doc["chebyshev"] = {{"radius", cheb.radius},
                        {"center", std::vector<double>(cheb.center.data(), cheb.center.data() + cheb.center.size())},
                        {"active_rows", cheb.active}};
    doc["range_mode"] = mode == RangeMode::PaperSquare ? "paper-square" : "safe-hypercube";
    doc["range_width"] = ranges.empty() ? 0.0 : ranges.front().width();
    doc["ranges"] = json::array();
    for (const auto& r : ranges) doc["ranges"].push_back({{"lo", r.lo}, {"hi", r.hi}});
    return doc.dump(2) + "\n";
}

std::string metrics_report_json(const MetricsReport& rep, const Trace& trace) {
    json doc;
    doc["truth"] = trace.truth == TruthModel::Linear ? "linear" : "sweep";
    doc["delta_s"] = trace.delta_s;
    doc["k_on"] = trace.k_on;
    doc["steps"] = trace.steps();
    doc["band"] = rep.band;
    doc["inner_band"] = rep.inner_band;
    doc["nominal"] = rep.nominal;
    doc["violation_share"] = rep.violation_share;
    doc["settling_steps"] = rep.settling_steps;
    doc["settling_seconds"] = rep.settling_seconds;
    doc["saturation_events"] = trace.saturation_events;
    doc["envelope"] = json::array();
    for (size_t k = 0; k < rep.envelope_min.size(); ++k)
        doc["envelope"].push_back({{"t", k * trace.delta_s},
                                   {"min", rep.envelope_min[k]},
                                   {"max", rep.envelope_max[k]}});
    return doc.dump(2) + "\n";
}

namespace {

json revenue_column_json(const RevenueColumn& col) {
    return {{"voltreg_effort_offpeak_puh", col.effort_off_puh},
            {"voltreg_revenue_offpeak", col.voltreg_revenue_off},
            {"voltreg_effort_onpeak_puh", col.effort_on_puh},
            {"voltreg_revenue_onpeak", col.voltreg_revenue_on},
            {"energy_offpeak_kwh", col.energy_off_kwh},
            {"energy_revenue_offpeak", col.energy_revenue_off},
            {"energy_onpeak_kwh", col.energy_on_kwh},
            {"energy_revenue_onpeak", col.energy_revenue_on},
            {"total", col.total()}};
}

}  // namespace

std::string revenue_report_json(const RevenueColumn& fixed, const RevenueColumn& adjusted) {
    json doc;
    doc["fixed"] = revenue_column_json(fixed);
    doc["adjusted"] = revenue_column_json(adjusted);
    doc["daily_difference"] = adjusted.total() - fixed.total();
    return doc.dump(2) + "\n";
}

std::string model_summary_json(const StateSpace& ss, const SparsityPattern& pattern) {
    json doc;
    doc["channels"] = ss.m;
    doc["state_dim"] = ss.state_dim();
    doc["d"] = ss.input_dim();
    doc["s"] = ss.output_dim();
    doc["y"] = pattern.size();
    doc["norm_B"] = ss.B.norm();
    doc["norm_B_reduced"] = ss.reduced ? ss.B_red.norm() : 0.0;
    return doc.dump(2) + "\n";
}

std::string trace_to_csv(const Trace& trace, const RadialNetwork& net) {
    std::ostringstream out;
    out << "t,node,phase,v,delta,p_hat,q_hat\n";
    out.precision(17);
    const int half_d = static_cast<int>(trace.p_hat.rows());
    std::vector<int> der_slot(net.channel_count(), -1);
    for (int t = 0; t < half_d; ++t) der_slot[trace.sets.D1[t] - 1] = t;

    Eigen::MatrixXd mag = trace.voltage_magnitude();
    for (int k = 0; k < trace.steps(); ++k) {
        for (int ch = 0; ch < net.channel_count(); ++ch) {
            double p_hat = der_slot[ch] >= 0 ? trace.p_hat(der_slot[ch], k) : 0.0;
            double q_hat = der_slot[ch] >= 0 ? trace.q_hat(der_slot[ch], k) : 0.0;
            out << k * trace.delta_s << ',' << net.channel_node(ch) << ','
                << net.channel_phase(ch) + 1 << ',' << mag(ch, k) << ',' << trace.delta(ch, k)
                << ',' << p_hat << ',' << q_hat << '\n';
        }
    }
    return out.str();
}

std::string polytope_to_csv(const ParameterPolytope& poly) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& row : poly.rows) {
        for (int i = 0; i < row.a.size(); ++i) out << row.a(i) << ',';
        out << row.b << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot write " + path);
    out << content;
}

}  // namespace derstab
