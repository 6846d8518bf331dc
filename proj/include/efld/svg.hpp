#pragma once

#include <string>
#include <vector>

namespace efld {

// Hand-written SVG line charts: fixed 800x600 canvas, optional log-scale
// y axis, byte-deterministic output (fixed float formatting, no timestamps).

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

void write_line_svg(const std::string& path, const PlotSpec& spec,
                    const std::vector<Series>& series);

}  // namespace efld
