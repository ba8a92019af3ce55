#include "derstab/svg.hpp"

#include <algorithm>
#include <sstream>

#include "derstab/errors.hpp"
#include "derstab/stability.hpp"

namespace derstab::svg {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 420;
constexpr int kPad = 48;

struct Mapper {
    double x0, x1, y0, y1;
    double px(double x) const { return kPad + (x - x0) / (x1 - x0) * (kWidth - 2 * kPad); }
    double py(double y) const { return kHeight - kPad - (y - y0) / (y1 - y0) * (kHeight - 2 * kPad); }
};

void polyline(std::ostringstream& out, const Mapper& map, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* color, double width) {
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='" << width << "' points='";
    for (size_t i = 0; i < xs.size(); ++i) out << map.px(xs[i]) << ',' << map.py(ys[i]) << ' ';
    out << "'/>\n";
}

void hline(std::ostringstream& out, const Mapper& map, double y, const char* color) {
    out << "<line x1='" << map.px(map.x0) << "' y1='" << map.py(y) << "' x2='" << map.px(map.x1)
        << "' y2='" << map.py(y) << "' stroke='" << color << "' stroke-width='1' stroke-dasharray='6 4'/>\n";
}

std::string header() {
    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "' viewBox='0 0 " << kWidth << ' ' << kHeight << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n";
    return out.str();
}

void axes(std::ostringstream& out, const Mapper& map, const std::string& xlabel,
          const std::string& ylabel) {
    out << "<rect x='" << kPad << "' y='" << kPad << "' width='" << kWidth - 2 * kPad
        << "' height='" << kHeight - 2 * kPad << "' fill='none' stroke='black'/>\n";
    out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12 << "' text-anchor='middle' font-size='13'>"
        << xlabel << "</text>\n";
    out << "<text x='14' y='" << kHeight / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 14 "
        << kHeight / 2 << ")'>" << ylabel << "</text>\n";
    out << "<text x='" << kPad << "' y='" << kHeight - kPad + 16 << "' font-size='11'>" << map.x0
        << "</text>\n";
    out << "<text x='" << kWidth - kPad << "' y='" << kHeight - kPad + 16
        << "' text-anchor='end' font-size='11'>" << map.x1 << "</text>\n";
    out << "<text x='" << kPad - 4 << "' y='" << map.py(map.y0) << "' text-anchor='end' font-size='11'>"
        << map.y0 << "</text>\n";
    out << "<text x='" << kPad - 4 << "' y='" << map.py(map.y1) + 10
        << "' text-anchor='end' font-size='11'>" << map.y1 << "</text>\n";
}

}  // namespace

std::string envelope_plot(const MetricsReport& rep, const Trace& trace) {
    const int steps = trace.steps();
    std::vector<double> t(steps);
    for (int k = 0; k < steps; ++k) t[k] = k * trace.delta_s;

    double lo = *std::min_element(rep.envelope_min.begin(), rep.envelope_min.end());
    double hi = *std::max_element(rep.envelope_max.begin(), rep.envelope_max.end());
    lo = std::min(lo, rep.nominal * (1.0 - rep.band) - 0.01);
    hi = std::max(hi, rep.nominal * (1.0 + rep.band) + 0.01);
    Mapper map{0.0, t.back(), lo, hi};

    std::ostringstream out;
    out << header();
    axes(out, map, "time (s)", "voltage magnitude (pu)");
    hline(out, map, rep.nominal * (1.0 + rep.band), "black");
    hline(out, map, rep.nominal * (1.0 - rep.band), "black");
    hline(out, map, rep.nominal, "grey");
    polyline(out, map, t, rep.envelope_max, "#7b2d8b", 1.5);
    polyline(out, map, t, rep.envelope_min, "#7b2d8b", 1.5);
    out << "<line x1='" << map.px(trace.k_on * trace.delta_s) << "' y1='" << map.py(lo) << "' x2='"
        << map.px(trace.k_on * trace.delta_s) << "' y2='" << map.py(hi)
        << "' stroke='#888' stroke-width='1' stroke-dasharray='2 3'/>\n";
    out << "</svg>\n";
    return out.str();
}

std::string region_slice_plot(const StateSpace& ss, const SparsityPattern& pattern,
                              const ChebyshevResult& cheb,
                              const std::vector<ParameterRange>& ranges, int dim_x, int dim_y,
                              int grid) {
    const int y = pattern.size();
    if (dim_x < 0 || dim_x >= y || dim_y < 0 || dim_y >= y || dim_x == dim_y)
        throw DimensionError("region slice needs two distinct packed-gain dimensions");

    double cx = cheb.center(dim_x), cy = cheb.center(dim_y);
    double span = 3.0 * cheb.radius;
    Mapper map{cx - span, cx + span, cy - span, cy + span};

    std::ostringstream out;
    out << header();
    axes(out, map, "f[" + std::to_string(dim_x) + "]", "f[" + std::to_string(dim_y) + "]");

    Eigen::VectorXd f = cheb.center;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            f(dim_x) = map.x0 + (map.x1 - map.x0) * i / (grid - 1);
            f(dim_y) = map.y0 + (map.y1 - map.y0) * j / (grid - 1);
            GainMatrix g = GainMatrix::unpack(f, pattern);
            bool stable = assess_eigen(closed_loop(ss, g));
            out << "<circle cx='" << map.px(f(dim_x)) << "' cy='" << map.py(f(dim_y))
                << "' r='2' fill='" << (stable ? "#7fbf7f" : "#d46a6a") << "'/>\n";
        }
    }

    double pr = cheb.radius / (map.x1 - map.x0) * (kWidth - 2 * kPad);
    out << "<circle cx='" << map.px(cx) << "' cy='" << map.py(cy) << "' r='" << pr
        << "' fill='none' stroke='blue' stroke-width='1.5'/>\n";
    double w = ranges.at(dim_x).width();
    out << "<rect x='" << map.px(cx - w / 2) << "' y='" << map.py(cy + w / 2) << "' width='"
        << map.px(cx + w / 2) - map.px(cx - w / 2) << "' height='"
        << map.py(cy - w / 2) - map.py(cy + w / 2)
        << "' fill='none' stroke='black' stroke-width='1.5'/>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace derstab::svg
