#pragma once

// Minimal static SVG line charts. One document holds vertically stacked
// panels; each panel draws its series as polylines over plain axes. This is
// an artifact emitter, not a plotting toolkit: no interactivity, no styling
// hooks, everything self-contained in the returned string.

#include <span>
#include <string>
#include <vector>

namespace annkin {

/// One polyline. A NaN y value breaks the line, leaving an explicit gap.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool y_log10 = false;  ///< plot log10(y); non-positive y become gaps
    std::vector<SvgSeries> series;
};

/// Complete `<svg>` document with the panels stacked top to bottom.
std::string render_svg(std::span<const SvgPanel> panels, int width = 760,
                       int panel_height = 300);

} // namespace annkin
