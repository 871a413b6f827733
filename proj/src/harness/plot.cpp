#include "mtbandit/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mtbandit::harness {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const std::vector<SummaryRow>& rows, const std::string& title) {
    if (rows.empty()) throw ValidationError("nothing to plot");

    std::vector<std::string> order;
    std::map<std::string, std::vector<const SummaryRow*>> series;
    double t_max = 1.0, y_lo = 0.0, y_hi = 0.0;
    for (const auto& r : rows) {
        if (!series.count(r.algorithm)) order.push_back(r.algorithm);
        series[r.algorithm].push_back(&r);
        t_max = std::max(t_max, static_cast<double>(r.t));
        y_lo = std::min(y_lo, r.mean_avg_regret - r.std_avg_regret);
        y_hi = std::max(y_hi, r.mean_avg_regret + r.std_avg_regret);
    }
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    const double t_min = 1.0;
    const double t_span = std::max(t_max - t_min, 1.0);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double t) { return kLeft + (t - t_min) / t_span * pw; };
    auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";

    // Axes and ticks.
    o << "<g stroke=\"#444\" fill=\"none\">\n";
    o << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(kLeft + pw)
      << "\" y2=\"" << fixed(kTop + ph) << "\"/>\n";
    o << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
      << fixed(kTop + ph) << "\"/>\n";
    o << "</g>\n<g fill=\"#222\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double t = t_min + t_span * i / 4.0;
        const double y = y_lo + (y_hi - y_lo) * i / 4.0;
        o << "<text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(kTop + ph + 18) << "\" text-anchor=\"middle\">"
          << tick(std::round(t)) << "</text>\n";
        o << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(sy(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
          << "</text>\n";
    }
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 10)
      << "\" text-anchor=\"middle\">round t</text>\n";
    o << "<text x=\"16\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(kTop + ph / 2) << ")\">R_C(t) / t</text>\n";
    o << "</g>\n";

    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& pts = series[order[k]];
        const char* color = kPalette[k % std::size(kPalette)];
        std::ostringstream band, line;
        for (const auto* r : pts) band << fixed(sx(r->t)) << ',' << fixed(sy(r->mean_avg_regret + r->std_avg_regret)) << ' ';
        for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
            band << fixed(sx((*it)->t)) << ',' << fixed(sy((*it)->mean_avg_regret - (*it)->std_avg_regret)) << ' ';
        }
        for (const auto* r : pts) line << fixed(sx(r->t)) << ',' << fixed(sy(r->mean_avg_regret)) << ' ';
        std::string b = band.str(), l = line.str();
        b.pop_back();
        l.pop_back();
        o << "<g class=\"series\" data-name=\"" << escape(order[k]) << "\">\n";
        o << "<polygon points=\"" << b << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        o << "<polyline points=\"" << l << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "</g>\n";
    }

    o << "<g class=\"legend\">\n";
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double y = kTop + 10 + 20.0 * static_cast<double>(k);
        const double x = kLeft + pw + 16;
        o << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y - 6) << "\" width=\"18\" height=\"4\" fill=\""
          << kPalette[k % std::size(kPalette)] << "\"/>\n";
        o << "<text x=\"" << fixed(x + 24) << "\" y=\"" << fixed(y) << "\">" << escape(order[k]) << "</text>\n";
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

}  // namespace mtbandit::harness
