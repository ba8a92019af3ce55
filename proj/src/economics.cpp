#include "derstab/economics.hpp"

#include <cmath>
#include <sstream>

#include "derstab/errors.hpp"

namespace derstab {

bool Tariff::voltreg_on(int minute) const {
    for (const auto& w : voltreg_windows)
        if (w.contains(minute)) return true;
    return false;
}

bool Tariff::energy_on(int minute) const {
    for (const auto& w : energy_windows)
        if (w.contains(minute)) return true;
    return false;
}

namespace {

int parse_hhmm(const std::string& cell) {
    if (cell.size() != 4) throw ParseError("tariff time '" + cell + "' must be hhmm");
    int h = std::stoi(cell.substr(0, 2));
    int m = std::stoi(cell.substr(2, 2));
    if (h < 0 || h > 24 || m < 0 || m > 59) throw ParseError("tariff time '" + cell + "' out of range");
    return h * 60 + m;
}

}  // namespace

Tariff parse_tariff(const std::string& text) {
    Tariff tariff;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_voltreg_off = false, have_energy_off = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream cells(line);
        std::string service, start, end, price;
        if (!std::getline(cells, service, ',') || !std::getline(cells, start, ',') ||
            !std::getline(cells, end, ',') || !std::getline(cells, price))
            throw ParseError("tariff line " + std::to_string(line_no) +
                             ": expected service,start_hhmm,end_hhmm,price");
        double value = 0.0;
        try {
            value = std::stod(price);
        } catch (const std::exception&) {
            throw ParseError("tariff line " + std::to_string(line_no) + ": bad price '" + price + "'");
        }
        if (service == "voltreg") {
            tariff.voltreg_windows.push_back({parse_hhmm(start), parse_hhmm(end)});
            tariff.voltreg_on_price = value;
        } else if (service == "energy") {
            tariff.energy_windows.push_back({parse_hhmm(start), parse_hhmm(end)});
            tariff.energy_on_price = value;
        } else if (service == "voltreg_offpeak") {
            tariff.voltreg_off_price = value;
            have_voltreg_off = true;
        } else if (service == "energy_offpeak") {
            tariff.energy_off_price = value;
            have_energy_off = true;
        } else {
            throw ParseError("tariff line " + std::to_string(line_no) + ": unknown service '" + service + "'");
        }
    }
    if (!have_voltreg_off || !have_energy_off)
        throw ParseError("tariff needs voltreg_offpeak and energy_offpeak rows");
    return tariff;
}

RevenueColumn economics(const Trace& active, const Trace& baseline, const Tariff& tariff,
                        double sbase_kva) {
    if (active.steps() != baseline.steps() || active.delta_s != baseline.delta_s ||
        active.start_minutes != baseline.start_minutes || active.v.rows() != baseline.v.rows())
        throw MismatchedScenario("economics needs traces from the same scenario and horizon");

    const int steps = active.steps();
    const double dt_h = active.delta_s / 3600.0;
    Eigen::MatrixXd mag_on = active.voltage_magnitude();
    Eigen::MatrixXd mag_off = baseline.voltage_magnitude();

    RevenueColumn col;
    for (int k = 0; k < steps; ++k) {
        int minute = active.start_minutes + static_cast<int>(k * active.delta_s / 60.0);
        minute %= 1440;

        // Voltage-regulation effort: excursion area mitigated vs. baseline.
        double mitigated = 0.0;
        for (int ch = 0; ch < mag_on.rows(); ++ch) {
            double exc_on = std::abs(mag_on(ch, k) - 1.0);
            double exc_off = std::abs(mag_off(ch, k) - 1.0);
            mitigated += std::max(0.0, exc_off - exc_on);
        }
        double effort = mitigated * dt_h;

        // Real-power service: accumulated generation by the DERs.
        double gen_kwh = 0.0;
        for (int t = 0; t < active.p_hat.rows(); ++t)
            gen_kwh += std::max(0.0, active.p_hat(t, k)) * sbase_kva * dt_h;

        if (tariff.voltreg_on(minute)) {
            col.effort_on_puh += effort;
            col.voltreg_revenue_on += effort * tariff.voltreg_on_price;
        } else {
            col.effort_off_puh += effort;
            col.voltreg_revenue_off += effort * tariff.voltreg_off_price;
        }
        if (tariff.energy_on(minute)) {
            col.energy_on_kwh += gen_kwh;
            col.energy_revenue_on += gen_kwh * tariff.energy_on_price;
        } else {
            col.energy_off_kwh += gen_kwh;
            col.energy_revenue_off += gen_kwh * tariff.energy_off_price;
        }
    }
    return col;
}

}  // namespace derstab
