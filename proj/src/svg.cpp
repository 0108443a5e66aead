#include "annkin/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace annkin {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kTicks = 5;

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Range {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void include(double v) {
        min = std::min(min, v);
        max = std::max(max, v);
    }
    void finalize(double pad_frac) {
        if (!(min <= max)) {
            min = 0.0;
            max = 1.0;
        }
        if (min == max) {
            const double half = std::max(0.5, std::abs(min) * 0.5);
            min -= half;
            max += half;
        }
        const double pad = pad_frac * (max - min);
        min -= pad;
        max += pad;
    }
};

void render_panel(std::ostringstream& out, const SvgPanel& panel, int width,
                  int panel_height, int y0) {
    const double ml = 66, mr = 14, mt = 30, mb = 44;
    const double px0 = ml, px1 = width - mr;
    const double py0 = y0 + mt, py1 = y0 + panel_height - mb;

    // y values go through the panel transform once; non-finite results are gaps
    std::vector<std::vector<double>> ty(panel.series.size());
    Range xr, yr;
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
        const SvgSeries& s = panel.series[si];
        ty[si].resize(s.y.size());
        for (std::size_t i = 0; i < s.y.size() && i < s.x.size(); ++i) {
            double v = s.y[i];
            if (panel.y_log10) v = v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
            ty[si][i] = v;
            if (std::isfinite(s.x[i]) && std::isfinite(v)) {
                xr.include(s.x[i]);
                yr.include(v);
            }
        }
    }
    xr.finalize(0.0);
    yr.finalize(0.04);

    auto sx = [&](double x) { return px0 + (x - xr.min) / (xr.max - xr.min) * (px1 - px0); };
    auto sy = [&](double v) { return py1 - (v - yr.min) / (yr.max - yr.min) * (py1 - py0); };

    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!panel.title.empty())
        out << "<text x=\"" << fmt_px((px0 + px1) / 2) << "\" y=\"" << y0 + 18
            << "\" text-anchor=\"middle\" font-size=\"13\" font-weight=\"bold\">"
            << xml_escape(panel.title) << "</text>\n";

    for (int i = 0; i < kTicks; ++i) {
        const double fx = xr.min + (xr.max - xr.min) * i / (kTicks - 1);
        const double fy = yr.min + (yr.max - yr.min) * i / (kTicks - 1);
        const double gx = sx(fx), gy = sy(fy);
        out << "<line x1=\"" << fmt_px(gx) << "\" y1=\"" << fmt_px(py0) << "\" x2=\""
            << fmt_px(gx) << "\" y2=\"" << fmt_px(py1) << "\" stroke=\"#dddddd\"/>\n";
        out << "<line x1=\"" << fmt_px(px0) << "\" y1=\"" << fmt_px(gy) << "\" x2=\""
            << fmt_px(px1) << "\" y2=\"" << fmt_px(gy) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << fmt_px(gx) << "\" y=\"" << fmt_px(py1 + 16)
            << "\" text-anchor=\"middle\">" << fmt_tick(fx) << "</text>\n";
        const double label_v = panel.y_log10 ? std::pow(10.0, fy) : fy;
        out << "<text x=\"" << fmt_px(px0 - 6) << "\" y=\"" << fmt_px(gy + 4)
            << "\" text-anchor=\"end\">" << fmt_tick(label_v) << "</text>\n";
    }
    out << "<rect x=\"" << fmt_px(px0) << "\" y=\"" << fmt_px(py0) << "\" width=\""
        << fmt_px(px1 - px0) << "\" height=\"" << fmt_px(py1 - py0)
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    if (!panel.x_label.empty())
        out << "<text x=\"" << fmt_px((px0 + px1) / 2) << "\" y=\""
            << fmt_px(y0 + panel_height - 8) << "\" text-anchor=\"middle\">"
            << xml_escape(panel.x_label) << "</text>\n";
    if (!panel.y_label.empty())
        out << "<text x=\"16\" y=\"" << fmt_px((py0 + py1) / 2)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
            << fmt_px((py0 + py1) / 2) << ")\">" << xml_escape(panel.y_label) << "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
        const SvgSeries& s = panel.series[si];
        const std::size_t n = std::min(s.x.size(), ty[si].size());
        bool has_gaps = false;
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(s.x[i]) || !std::isfinite(ty[si][i])) has_gaps = true;
        // stride decimation would bridge gaps, so it only applies to gap-free data
        const std::size_t stride = has_gaps ? 1 : std::max<std::size_t>(1, n / 2400);

        std::string d;
        bool pen_up = true;
        auto add_point = [&](std::size_t idx) {
            if (!std::isfinite(s.x[idx]) || !std::isfinite(ty[si][idx])) {
                pen_up = true;
                return;
            }
            d += pen_up ? "M" : "L";
            d += fmt_px(sx(s.x[idx])) + " " + fmt_px(sy(ty[si][idx]));
            pen_up = false;
        };
        for (std::size_t i = 0; i < n; i += stride) add_point(i);
        if (n > 0 && (n - 1) % stride != 0) add_point(n - 1);
        if (!d.empty())
            out << "<path d=\"" << d << "\" fill=\"none\" stroke=\""
                << kPalette[si % std::size(kPalette)] << "\" stroke-width=\"1.4\"/>\n";
    }

    double ly = py0 + 14;
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
        if (panel.series[si].label.empty()) continue;
        const double lx = px1 - 150;
        out << "<line x1=\"" << fmt_px(lx) << "\" y1=\"" << fmt_px(ly - 4) << "\" x2=\""
            << fmt_px(lx + 22) << "\" y2=\"" << fmt_px(ly - 4) << "\" stroke=\""
            << kPalette[si % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt_px(lx + 28) << "\" y=\"" << fmt_px(ly) << "\">"
            << xml_escape(panel.series[si].label) << "</text>\n";
        ly += 16;
    }
    out << "</g>\n";
}

} // namespace

std::string render_svg(std::span<const SvgPanel> panels, int width, int panel_height) {
    const int height = panel_height * std::max<int>(1, static_cast<int>(panels.size()));
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        render_panel(out, panels[i], width, panel_height, static_cast<int>(i) * panel_height);
    out << "</svg>\n";
    return out.str();
}

} // namespace annkin
