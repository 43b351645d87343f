#include "nmgle/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nmgle {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range nice_range(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.5;
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::vector<double> linear_ticks(const Range& r) {
    const double span = r.hi - r.lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    if (span / step > 10.0) step *= 2.0;
    if (span / step > 10.0) step *= 2.5;
    if (span / step > 10.0) step *= 2.0;
    std::vector<double> ticks;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-12 * span; v += step) {
        ticks.push_back(v);
    }
    return ticks;
}

std::vector<double> log_ticks(const Range& r) {
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(r.lo)); e <= static_cast<int>(std::ceil(r.hi)); ++e) {
        if (e >= r.lo - 1e-9 && e <= r.hi + 1e-9) ticks.push_back(e);
    }
    return ticks;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_plot(const std::vector<SvgSeries>& series, const SvgPlotOptions& opt) {
    const double ml = 70, mr = 20, mt = 36, mb = 50;
    const double pw = opt.width - ml - mr;
    const double ph = opt.height - mt - mb;

    // collect plottable points (log-log drops non-positive values)
    auto tx = [&](double v) { return opt.log_log ? std::log10(v) : v; };
    bool any = false;
    Range rx, ry;
    for (const SvgSeries& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (opt.log_log && (s.x[i] <= 0.0 || s.y[i] <= 0.0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            const double x = tx(s.x[i]);
            const double y = tx(s.y[i]);
            if (!any) {
                rx = {x, x};
                ry = {y, y};
                any = true;
            } else {
                rx.lo = std::min(rx.lo, x);
                rx.hi = std::max(rx.hi, x);
                ry.lo = std::min(ry.lo, y);
                ry.hi = std::max(ry.hi, y);
            }
        }
    }
    if (!any) {
        rx = {0.0, 1.0};
        ry = {0.0, 1.0};
    }
    rx = nice_range(rx.lo, rx.hi);
    ry = nice_range(ry.lo, ry.hi);

    auto px = [&](double v) { return ml + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double v) { return mt + ph - (tx(v) - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << opt.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << opt.title << "</text>\n";

    // frame
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    const std::vector<double> xticks = opt.log_log ? log_ticks(rx) : linear_ticks(rx);
    const std::vector<double> yticks = opt.log_log ? log_ticks(ry) : linear_ticks(ry);
    for (double t : xticks) {
        const double x = ml + (t - rx.lo) / (rx.hi - rx.lo) * pw;
        out << "<line x1=\"" << num(x) << "\" y1=\"" << mt << "\" x2=\"" << num(x) << "\" y2=\""
            << mt + ph << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << (opt.log_log ? "1e" + num(t) : num(t)) << "</text>\n";
    }
    for (double t : yticks) {
        const double y = mt + ph - (t - ry.lo) / (ry.hi - ry.lo) * ph;
        out << "<line x1=\"" << ml << "\" y1=\"" << num(y) << "\" x2=\"" << ml + pw << "\" y2=\""
            << num(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << (opt.log_log ? "1e" + num(t) : num(t)) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opt.height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << opt.x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << opt.y_label << "</text>\n";

    std::size_t color = 0;
    double legend_y = mt + 14;
    for (const SvgSeries& s : series) {
        const std::string stroke = s.color.empty() ? kPalette[color % 6] : s.color;
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (opt.log_log && (s.x[i] <= 0.0 || s.y[i] <= 0.0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
        }
        out << "\"/>\n";
        out << "<line x1=\"" << ml + pw - 130 << "\" y1=\"" << legend_y << "\" x2=\""
            << ml + pw - 110 << "\" y2=\"" << legend_y << "\" stroke=\"" << stroke
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << ml + pw - 104 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        legend_y += 16;
        ++color;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace nmgle
