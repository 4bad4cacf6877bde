#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace svg {

namespace {

constexpr double kW = 420, kH = 320;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;

std::string esc(const std::string& s) {
    std::string r;
    for (char c : s) {
        if (c == '<') r += "&lt;";
        else if (c == '>') r += "&gt;";
        else if (c == '&') r += "&amp;";
        else r += c;
    }
    return r;
}

std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", x);
    return b;
}

std::string tick_label(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", v);
    return b;
}

struct Axis {
    bool log = true;
    double lo = 0, hi = 1;

    double map(double v) const { return log ? std::log10(v) : v; }
    void fit(std::vector<double> vals) {
        std::vector<double> ok;
        for (double v : vals)
            if (std::isfinite(v) && (!log || v > 0)) ok.push_back(map(v));
        if (ok.empty()) {
            lo = 0;
            hi = 1;
            return;
        }
        lo = *std::min_element(ok.begin(), ok.end());
        hi = *std::max_element(ok.begin(), ok.end());
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    // tick positions in data units
    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            int a = int(std::ceil(lo)), b = int(std::floor(hi));
            int step = std::max(1, (b - a + 1) / 6);
            for (int k = a; k <= b; k += step) t.push_back(std::pow(10.0, k));
            if (t.size() < 2) {
                // narrow range: label powers of two instead
                int p0 = int(std::ceil(lo / std::log10(2.0))), p1 = int(std::floor(hi / std::log10(2.0)));
                t.clear();
                for (int k = p0; k <= p1; ++k) t.push_back(std::pow(2.0, k));
            }
        } else {
            double span = hi - lo, raw = span / 5, mag = std::pow(10.0, std::floor(std::log10(raw)));
            double step = mag;
            for (double m : {1.0, 2.0, 5.0, 10.0})
                if (m * mag >= raw) {
                    step = m * mag;
                    break;
                }
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12; v += step) t.push_back(std::abs(v) < 1e-14 ? 0 : v);
        }
        return t;
    }
};

void panel_svg(std::ostringstream& os, const Panel& p, double ox, double oy) {
    Axis ax{p.logx}, ay{p.logy};
    std::vector<double> xs, ys;
    for (const auto& s : p.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    for (const auto& v : p.vlines) xs.push_back(v.first);
    ax.fit(xs);
    ay.fit(ys);
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto X = [&](double v) { return ox + kLeft + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto Y = [&](double v) { return oy + kTop + (1 - (ay.map(v) - ay.lo) / (ay.hi - ay.lo)) * ph; };

    os << "<rect x='" << num(ox + kLeft) << "' y='" << num(oy + kTop) << "' width='" << num(pw) << "' height='" << num(ph)
       << "' fill='white' stroke='#333'/>\n";
    os << "<text x='" << num(ox + kW / 2) << "' y='" << num(oy + 20) << "' text-anchor='middle' font-size='13'>"
       << esc(p.title) << "</text>\n";
    os << "<text x='" << num(ox + kLeft + pw / 2) << "' y='" << num(oy + kH - 10)
       << "' text-anchor='middle' font-size='11'>" << esc(p.xlabel) << "</text>\n";
    os << "<text x='" << num(ox + 14) << "' y='" << num(oy + kTop + ph / 2) << "' text-anchor='middle' font-size='11' "
       << "transform='rotate(-90 " << num(ox + 14) << ' ' << num(oy + kTop + ph / 2) << ")'>" << esc(p.ylabel)
       << "</text>\n";

    for (double t : ax.ticks()) {
        double x = X(t);
        os << "<line x1='" << num(x) << "' y1='" << num(oy + kTop) << "' x2='" << num(x) << "' y2='" << num(oy + kTop + ph)
           << "' stroke='#ddd'/>\n";
        os << "<text x='" << num(x) << "' y='" << num(oy + kTop + ph + 14) << "' text-anchor='middle' font-size='10'>"
           << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        double y = Y(t);
        os << "<line x1='" << num(ox + kLeft) << "' y1='" << num(y) << "' x2='" << num(ox + kLeft + pw) << "' y2='" << num(y)
           << "' stroke='#ddd'/>\n";
        os << "<text x='" << num(ox + kLeft - 4) << "' y='" << num(y + 3) << "' text-anchor='end' font-size='10'>"
           << tick_label(t) << "</text>\n";
    }
    for (const auto& [v, label] : p.vlines) {
        if (ax.log && v <= 0) continue;
        double x = X(v);
        os << "<line x1='" << num(x) << "' y1='" << num(oy + kTop) << "' x2='" << num(x) << "' y2='" << num(oy + kTop + ph)
           << "' stroke='#888' stroke-dasharray='2,3'/>\n";
        os << "<text x='" << num(x + 3) << "' y='" << num(oy + kTop + 12) << "' font-size='10' fill='#555'>" << esc(label)
           << "</text>\n";
    }

    std::size_t legend = 0;
    for (const auto& s : p.series) {
        std::string path;
        std::ostringstream dots;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((ax.log && s.x[i] <= 0) || (ay.log && s.y[i] <= 0)) continue;
            path += (path.empty() ? "M" : " L") + num(X(s.x[i])) + "," + num(Y(s.y[i]));
            if (s.markers)
                dots << "<circle cx='" << num(X(s.x[i])) << "' cy='" << num(Y(s.y[i])) << "' r='2.5' fill='" << s.color
                     << "'/>\n";
        }
        if (!path.empty())
            os << "<path d='" << path << "' fill='none' stroke='" << s.color << "' stroke-width='1.5'"
               << (s.dashed ? " stroke-dasharray='6,4'" : "") << "/>\n";
        os << dots.str();
        if (!s.label.empty()) {
            double ly = oy + kTop + 12 + 13 * double(legend++);
            double lx = ox + kLeft + pw - 120;
            os << "<line x1='" << num(lx) << "' y1='" << num(ly - 4) << "' x2='" << num(lx + 16) << "' y2='" << num(ly - 4)
               << "' stroke='" << s.color << "' stroke-width='2'" << (s.dashed ? " stroke-dasharray='4,3'" : "") << "/>\n";
            os << "<text x='" << num(lx + 20) << "' y='" << num(ly) << "' font-size='10'>" << esc(s.label) << "</text>\n";
        }
    }
}

}  // namespace

const std::string& palette(std::size_t i) {
    static const std::vector<std::string> c{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    return c[i % c.size()];
}

std::string render(const std::vector<Panel>& panels, std::size_t columns) {
    columns = std::max<std::size_t>(1, std::min(columns, panels.size()));
    const std::size_t rows = (panels.size() + columns - 1) / columns;
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(kW * columns) << "' height='" << num(kH * rows)
       << "' font-family='sans-serif'>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        panel_svg(os, panels[i], kW * double(i % columns), kH * double(i / columns));
    os << "</svg>\n";
    return os.str();
}

void write(const std::string& path, const std::vector<Panel>& panels, std::size_t columns) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << render(panels, columns);
}

}  // namespace svg
