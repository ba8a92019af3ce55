#pragma once

#include <string>
#include <vector>

#include "derstab/sim.hpp"

namespace derstab {

struct TariffWindow {
    int start_min = 0;  // inclusive, minutes of day
    int end_min = 0;    // exclusive
    bool contains(int minute) const { return minute >= start_min && minute < end_min; }
};

/// Two compensated services: voltage regulation (paid per pu-h of excursion
/// mitigated) and real-power generation (paid per kWh). Each has on-peak
/// windows with a price and a price for the rest of the day.
struct Tariff {
    std::vector<TariffWindow> voltreg_windows;
    double voltreg_on_price = 0.0;   // currency per pu-h
    double voltreg_off_price = 0.0;
    std::vector<TariffWindow> energy_windows;
    double energy_on_price = 0.0;  // currency per kWh
    double energy_off_price = 0.0;

    bool voltreg_on(int minute) const;
    bool energy_on(int minute) const;
};

/// Lines `service,start_hhmm,end_hhmm,price` with service one of
/// voltreg, energy, voltreg_offpeak, energy_offpeak (times of the *_offpeak
/// rows are ignored); `#` comments.
Tariff parse_tariff(const std::string& text);

/// One simulated case of the daily-revenue table.
struct RevenueColumn {
    double effort_off_puh = 0.0;  // voltage excursion mitigated vs. controller-off
    double effort_on_puh = 0.0;
    double voltreg_revenue_off = 0.0;
    double voltreg_revenue_on = 0.0;
    double energy_off_kwh = 0.0;  // accumulated real-power generation
    double energy_on_kwh = 0.0;
    double energy_revenue_off = 0.0;
    double energy_revenue_on = 0.0;
    double total() const {
        return voltreg_revenue_off + voltreg_revenue_on + energy_revenue_off + energy_revenue_on;
    }
};

/// Revenue accounting of `active` against the controller-off baseline.
/// `sbase_kva` converts per-unit power to kW for the energy service; the
/// nominal magnitude for excursions is 1 p.u. Throws MismatchedScenario when
/// the traces do not share horizon, interval, start time and channel count.
RevenueColumn economics(const Trace& active, const Trace& baseline, const Tariff& tariff,
                        double sbase_kva);

}  // namespace derstab
