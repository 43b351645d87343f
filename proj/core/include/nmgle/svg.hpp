#pragma once

#include <string>
#include <vector>

namespace nmgle {

/// One polyline of an SVG plot.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct SvgPlotOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_log = false;  ///< log-log axes; non-positive points are dropped
    int width = 720;
    int height = 480;
};

/// Static SVG line plot with axes, tick labels and a legend.
std::string svg_plot(const std::vector<SvgSeries>& series, const SvgPlotOptions& options);

}  // namespace nmgle
