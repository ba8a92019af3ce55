#pragma once

#include <string>
#include <vector>

#include "derstab/economics.hpp"
#include "derstab/region.hpp"
#include "derstab/sim.hpp"
#include "derstab/stability.hpp"

namespace derstab {

// JSON documents with stable field names and insertion order; no timestamps,
// so identical inputs serialize to identical bytes.
std::string stability_report_json(const StabilityReport& report);
std::string region_report_json(const ParameterPolytope& poly, const ChebyshevResult& cheb,
                               const std::vector<ParameterRange>& ranges, RangeMode mode);
std::string metrics_report_json(const MetricsReport& rep, const Trace& trace);
std::string revenue_report_json(const RevenueColumn& fixed, const RevenueColumn& adjusted);

std::string model_summary_json(const StateSpace& ss, const SparsityPattern& pattern);

/// CSV t,node,phase,v,delta,p_hat,q_hat; voltages leave the library as
/// magnitudes in p.u. (the squared convention stays internal).
std::string trace_to_csv(const Trace& trace, const RadialNetwork& net);

/// CSV rows a_1,...,a_y,b of the polytope.
std::string polytope_to_csv(const ParameterPolytope& poly);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace derstab
