#pragma once

#include <string>
#include <vector>

namespace pistop {

/// Minimal self-contained SVG line/point plot of one (x, y) series with
/// labeled axes and ticks. No external assets.
std::string render_line_plot(const std::vector<double>& x, const std::vector<double>& y,
                             const std::string& x_label, const std::string& y_label,
                             const std::string& title);

}  // namespace pistop
