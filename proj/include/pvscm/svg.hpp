#pragma once

// Minimal SVG line plotter: stacked panels with axes, ticks, polylines,
// point markers and a legend. Enough for cost curves and sweep plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace pvscm::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Marker {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<Marker> markers;  ///< drawn as crosses
};

struct Figure {
    double width = 720.0;
    double panel_height = 320.0;
    std::vector<Panel> panels;
};

namespace detail {

inline std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

/// "Nice" tick step covering span with about `target` intervals.
inline double nice_step(double span, int target = 5) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

}  // namespace detail

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#17becf"};
    return colors;
}

inline std::string render(const Figure& fig) {
    const double ml = 80, mr = 150, mt = 30, mb = 45;
    const double height = fig.panel_height * static_cast<double>(std::max<std::size_t>(1, fig.panels.size()));
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(fig.width) << "\" height=\""
      << detail::num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < fig.panels.size(); ++p) {
        const Panel& panel = fig.panels[p];
        const double top = static_cast<double>(p) * fig.panel_height;
        const double x0 = ml, x1 = fig.width - mr, y0 = top + fig.panel_height - mb, y1 = top + mt;

        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
        for (const auto& s : panel.series) {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
        if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        const double ystep = detail::nice_step(ymax - ymin);
        ymin = std::floor(ymin / ystep) * ystep;
        ymax = std::ceil(ymax / ystep) * ystep;
        const double xstep = detail::nice_step(xmax - xmin);

        auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
        auto sy = [&](double y) { return y0 - (y - ymin) / (ymax - ymin) * (y0 - y1); };

        o << "<g>\n";
        if (!panel.title.empty()) {
            o << "<text x=\"" << detail::num((x0 + x1) / 2) << "\" y=\"" << detail::num(top + 18)
              << "\" text-anchor=\"middle\" font-size=\"13\">" << detail::esc(panel.title) << "</text>\n";
        }
        o << "<line x1=\"" << detail::num(x0) << "\" y1=\"" << detail::num(y0) << "\" x2=\"" << detail::num(x1)
          << "\" y2=\"" << detail::num(y0) << "\" stroke=\"black\"/>\n";
        o << "<line x1=\"" << detail::num(x0) << "\" y1=\"" << detail::num(y0) << "\" x2=\"" << detail::num(x0)
          << "\" y2=\"" << detail::num(y1) << "\" stroke=\"black\"/>\n";
        for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-9 * xstep; t += xstep) {
            o << "<line x1=\"" << detail::num(sx(t)) << "\" y1=\"" << detail::num(y0) << "\" x2=\"" << detail::num(sx(t))
              << "\" y2=\"" << detail::num(y0 + 4) << "\" stroke=\"black\"/>"
              << "<text x=\"" << detail::num(sx(t)) << "\" y=\"" << detail::num(y0 + 16)
              << "\" text-anchor=\"middle\">" << detail::tick_label(t) << "</text>\n";
        }
        for (double t = ymin; t <= ymax + 1e-9 * ystep; t += ystep) {
            o << "<line x1=\"" << detail::num(x0 - 4) << "\" y1=\"" << detail::num(sy(t)) << "\" x2=\"" << detail::num(x1)
              << "\" y2=\"" << detail::num(sy(t)) << "\" stroke=\"#e0e0e0\"/>"
              << "<text x=\"" << detail::num(x0 - 6) << "\" y=\"" << detail::num(sy(t) + 4)
              << "\" text-anchor=\"end\">" << detail::tick_label(t) << "</text>\n";
        }
        o << "<text x=\"" << detail::num((x0 + x1) / 2) << "\" y=\"" << detail::num(y0 + 34)
          << "\" text-anchor=\"middle\">" << detail::esc(panel.x_label) << "</text>\n";
        o << "<text transform=\"translate(" << detail::num(18) << ',' << detail::num((y0 + y1) / 2)
          << ") rotate(-90)\" text-anchor=\"middle\">" << detail::esc(panel.y_label) << "</text>\n";

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const Series& s = panel.series[si];
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
            if (s.dashed) o << " stroke-dasharray=\"5,3\"";
            o << " points=\"";
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                o << detail::num(sx(s.x[i])) << ',' << detail::num(sy(s.y[i])) << ' ';
            }
            o << "\"/>\n";
            const double ly = y1 + 14.0 * static_cast<double>(si);
            o << "<line x1=\"" << detail::num(x1 + 10) << "\" y1=\"" << detail::num(ly) << "\" x2=\""
              << detail::num(x1 + 30) << "\" y2=\"" << detail::num(ly) << "\" stroke=\"" << s.color
              << "\" stroke-width=\"2\"/><text x=\"" << detail::num(x1 + 35) << "\" y=\"" << detail::num(ly + 4)
              << "\">" << detail::esc(s.label) << "</text>\n";
        }
        for (const auto& m : panel.markers) {
            const double cx = sx(m.x), cy = sy(m.y);
            o << "<path d=\"M" << detail::num(cx - 5) << ' ' << detail::num(cy - 5) << " L" << detail::num(cx + 5) << ' '
              << detail::num(cy + 5) << " M" << detail::num(cx - 5) << ' ' << detail::num(cy + 5) << " L"
              << detail::num(cx + 5) << ' ' << detail::num(cy - 5) << "\" stroke=\"black\" stroke-width=\"2\"/>";
            if (!m.label.empty()) {
                o << "<text x=\"" << detail::num(cx + 7) << "\" y=\"" << detail::num(cy - 7) << "\">"
                  << detail::esc(m.label) << "</text>";
            }
            o << '\n';
        }
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace pvscm::svg
