#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fsbench/error.hpp"
#include "fsbench/random.hpp"
#include "fsbench/stats/comparison.hpp"

namespace fsbench {

inline constexpr double svg_width = 900.0;
inline constexpr double svg_height = 500.0;

inline std::string svg_num(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s == "-0.00" || s == "-0") s = s.substr(1);
    return s;
}

inline std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline constexpr const char* method_palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                                 "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

/// Palette slot keyed by the method-name hash; names are placed in sorted
/// order and a taken slot moves on to the next free one.
inline std::map<std::string, std::string> method_colors(std::vector<std::string> names) {
    constexpr std::size_t slots = sizeof method_palette / sizeof method_palette[0];
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::map<std::string, std::string> out;
    std::vector<bool> used(slots, false);
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::size_t slot = fnv1a(names[i]) % slots;
        if (i < slots) {
            while (used[slot]) slot = (slot + 1) % slots;
            used[slot] = true;
        }
        out[names[i]] = method_palette[slot];
    }
    return out;
}

class SvgDocument {
public:
    SvgDocument() {
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(svg_width, 0) << "\" height=\""
             << svg_num(svg_height, 0) << "\" viewBox=\"0 0 " << svg_num(svg_width, 0) << ' ' << svg_num(svg_height, 0)
             << "\" font-family=\"sans-serif\">\n"
             << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(svg_width, 0) << "\" height=\"" << svg_num(svg_height, 0)
             << "\" fill=\"white\"/>\n";
    }

    void open_group(const std::string& cls) { out_ << "<g class=\"" << xml_escape(cls) << "\">\n"; }
    void close_group() { out_ << "</g>\n"; }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0,
              const std::string& dash = "", const std::string& cls = "") {
        out_ << "<line" << cls_attr(cls) << " x1=\"" << svg_num(x1) << "\" y1=\"" << svg_num(y1) << "\" x2=\""
             << svg_num(x2) << "\" y2=\"" << svg_num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << svg_num(width, 1) << '"';
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
        out_ << "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width,
                  const std::string& cls) {
        if (pts.empty()) return;
        out_ << "<polyline" << cls_attr(cls) << " fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
             << svg_num(width, 1) << "\" points=\"" << points(pts) << "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill, double opacity,
                 const std::string& cls) {
        out_ << "<polygon" << cls_attr(cls) << " fill=\"" << fill << "\" fill-opacity=\"" << svg_num(opacity)
             << "\" stroke=\"none\" points=\"" << points(pts) << "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& fill, const std::string& cls = "") {
        out_ << "<circle" << cls_attr(cls) << " cx=\"" << svg_num(x) << "\" cy=\"" << svg_num(y) << "\" r=\""
             << svg_num(r, 1) << "\" fill=\"" << fill << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill, double opacity = 1.0) {
        out_ << "<rect x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" width=\"" << svg_num(w) << "\" height=\""
             << svg_num(h) << "\" fill=\"" << fill << "\" fill-opacity=\"" << svg_num(opacity) << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, const std::string& anchor = "start", double size = 12,
              const std::string& extra = "") {
        out_ << "<text x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" font-size=\"" << svg_num(size, 0)
             << "\" text-anchor=\"" << anchor << '"' << extra << '>' << xml_escape(s) << "</text>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    static std::string cls_attr(const std::string& cls) {
        return cls.empty() ? std::string() : " class=\"" + xml_escape(cls) + "\"";
    }

    static std::string points(const std::vector<std::pair<double, double>>& pts) {
        std::string s;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) s += ' ';
            s += svg_num(pts[i].first) + ',' + svg_num(pts[i].second);
        }
        return s;
    }

    std::ostringstream out_;
};

// ---- axes -----------------------------------------------------------------

struct AxisRange {
    double lo = 0.0, hi = 1.0;
};

/// 1/2/5 x 10^n ticks covering [lo, hi].
inline std::vector<double> nice_ticks(AxisRange& r, int target = 6) {
    if (!(r.hi > r.lo)) {
        const double pad = std::max(1e-9, std::abs(r.lo) * 0.1 + (r.lo == 0.0 ? 1.0 : 0.0));
        r.lo -= pad;
        r.hi += pad;
    }
    const double raw = (r.hi - r.lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (raw <= step) break;
    }
    r.lo = std::floor(r.lo / step + 1e-9) * step;
    r.hi = std::ceil(r.hi / step - 1e-9) * step;
    std::vector<double> ticks;
    for (double t = r.lo; t <= r.hi + step * 1e-6; t += step) ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ticks;
}

struct PlotFrame {
    double left = 80, right = 700, top = 50, bottom = 440;
    AxisRange x, y;
    bool log_y = false;  // y range holds log10 values

    double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * (right - left); }
    double py(double v) const {
        const double t = log_y ? std::log10(v) : v;
        return bottom - (t - y.lo) / (y.hi - y.lo) * (bottom - top);
    }
};

inline int tick_decimals(const std::vector<double>& ticks) {
    if (ticks.size() < 2) return 2;
    const double step = std::abs(ticks[1] - ticks[0]);
    return std::clamp(static_cast<int>(std::ceil(-std::log10(step) - 1e-9)), 0, 6);
}

inline void draw_axes(SvgDocument& svg, PlotFrame& f, const std::string& title, const std::string& x_label,
                      const std::string& y_label) {
    const auto xt = nice_ticks(f.x);
    std::vector<double> yt;
    if (f.log_y) {
        f.y.lo = std::floor(f.y.lo);
        f.y.hi = std::max(f.y.lo + 1.0, std::ceil(f.y.hi));
        for (double e = f.y.lo; e <= f.y.hi + 1e-9; e += 1.0) yt.push_back(e);
    } else {
        yt = nice_ticks(f.y);
    }
    svg.open_group("axes");
    svg.text(svg_width / 2, 28, title, "middle", 16);
    svg.line(f.left, f.bottom, f.right, f.bottom, "black");
    svg.line(f.left, f.top, f.left, f.bottom, "black");
    const int xd = tick_decimals(xt);
    for (double t : xt) {
        const double x = f.px(t);
        svg.line(x, f.bottom, x, f.bottom + 5, "black");
        svg.line(x, f.top, x, f.bottom, "#e0e0e0", 0.5);
        svg.text(x, f.bottom + 18, svg_num(t, xd), "middle", 11);
    }
    const int yd = tick_decimals(yt);
    for (double t : yt) {
        const double y = f.log_y ? f.bottom - (t - f.y.lo) / (f.y.hi - f.y.lo) * (f.bottom - f.top) : f.py(t);
        svg.line(f.left - 5, y, f.left, y, "black");
        svg.line(f.left, y, f.right, y, "#e0e0e0", 0.5);
        svg.text(f.left - 8, y + 4, f.log_y ? "1e" + svg_num(t, 0) : svg_num(t, yd), "end", 11);
    }
    svg.text((f.left + f.right) / 2, f.bottom + 40, x_label, "middle", 13);
    svg.text(20, (f.top + f.bottom) / 2, y_label, "middle", 13,
             " transform=\"rotate(-90 20 " + svg_num((f.top + f.bottom) / 2) + ")\"");
    svg.close_group();
}

inline void draw_legend(SvgDocument& svg, const std::vector<std::string>& names,
                        const std::map<std::string, std::string>& colors, const PlotFrame& f) {
    svg.open_group("legend");
    double y = f.top + 10;
    for (const auto& n : names) {
        svg.open_group("legend-item");
        svg.line(f.right + 20, y, f.right + 45, y, colors.at(n), 2.5);
        svg.text(f.right + 52, y + 4, n, "start", 12);
        svg.close_group();
        y += 20;
    }
    svg.close_group();
}

// ---- plot data ------------------------------------------------------------

struct Series {
    std::string name;
    std::vector<double> x, y;
    std::vector<bool> flagged;  // optional per-point marker (over-cap); empty = none
};

struct Band {
    std::string name;  // series the band belongs to
    std::vector<double> x, lo, hi;
};

struct SweepPlot {
    std::string title, y_label;
    std::vector<Series> lines;  // x in fraction units
    std::optional<Band> band;
};

/// One line per series, plus a shaded band (mean +- 1 std of the baseline).
inline std::string render_sweep(const SweepPlot& plot) {
    require(!plot.lines.empty(), "sweep plot: no data");
    PlotFrame f;
    f.x = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    f.y = f.x;
    auto extend = [&](double x, double y) {
        f.x.lo = std::min(f.x.lo, x * 100);
        f.x.hi = std::max(f.x.hi, x * 100);
        f.y.lo = std::min(f.y.lo, y);
        f.y.hi = std::max(f.y.hi, y);
    };
    for (const auto& s : plot.lines)
        for (std::size_t i = 0; i < s.x.size(); ++i) extend(s.x[i], s.y[i]);
    if (plot.band) {
        for (std::size_t i = 0; i < plot.band->x.size(); ++i) {
            extend(plot.band->x[i], plot.band->lo[i]);
            extend(plot.band->x[i], plot.band->hi[i]);
        }
    }
    std::vector<std::string> all;
    for (const auto& s : plot.lines) all.push_back(s.name);
    if (plot.band) all.push_back(plot.band->name);
    const auto colors = method_colors(all);
    SvgDocument svg;
    draw_axes(svg, f, plot.title, "selected features (%)", plot.y_label);
    if (plot.band) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < plot.band->x.size(); ++i) pts.emplace_back(f.px(plot.band->x[i] * 100), f.py(plot.band->hi[i]));
        for (std::size_t i = plot.band->x.size(); i-- > 0;) pts.emplace_back(f.px(plot.band->x[i] * 100), f.py(plot.band->lo[i]));
        svg.polygon(pts, colors.at(plot.band->name), 0.2, "band");
    }
    std::vector<std::string> names;
    for (const auto& s : plot.lines) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) pts.emplace_back(f.px(s.x[i] * 100), f.py(s.y[i]));
        svg.polyline(pts, colors.at(s.name), 2.0, "series");
        names.push_back(s.name);
    }
    draw_legend(svg, names, colors, f);
    return svg.finish();
}

struct ZPlot {
    std::string title;
    std::vector<Series> lines;  // non-finite z values are drawn as edge markers
};

inline std::string render_zscore(const ZPlot& plot) {
    require(!plot.lines.empty(), "Z-score plot: no data");
    PlotFrame f;
    f.x = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    f.y = {0.0, 0.0};
    for (const auto& s : plot.lines) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            f.x.lo = std::min(f.x.lo, s.x[i] * 100);
            f.x.hi = std::max(f.x.hi, s.x[i] * 100);
            if (std::isfinite(s.y[i])) {
                f.y.lo = std::min(f.y.lo, s.y[i]);
                f.y.hi = std::max(f.y.hi, s.y[i]);
            }
        }
    }
    SvgDocument svg;
    draw_axes(svg, f, plot.title, "selected features (%)", "Z-score vs random baseline");
    svg.line(f.left, f.py(0.0), f.right, f.py(0.0), "black", 1.5, "6,4", "zero-line");
    std::vector<std::string> names;
    for (const auto& s : plot.lines) names.push_back(s.name);
    const auto colors = method_colors(names);
    for (const auto& s : plot.lines) {
        std::vector<std::pair<double, double>> pts;
        const std::string color = colors.at(s.name);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.y[i])) {
                pts.emplace_back(f.px(s.x[i] * 100), f.py(s.y[i]));
            } else {
                svg.polyline(pts, color, 2.0, "series");
                pts.clear();
                svg.circle(f.px(s.x[i] * 100), s.y[i] > 0 ? f.top : f.bottom, 4, color, "degenerate");
            }
        }
        svg.polyline(pts, color, 2.0, "series");
    }
    draw_legend(svg, names, colors, f);
    return svg.finish();
}

struct RuntimePlot {
    std::string title, x_label;
    std::vector<Series> lines;  // y in seconds; flagged = over cap
};

/// log10 y-axis; over-cap points are marked with a cross.
inline std::string render_runtime(const RuntimePlot& plot) {
    require(!plot.lines.empty(), "runtime plot: no data");
    constexpr double floor_seconds = 1e-6;
    PlotFrame f;
    f.log_y = true;
    f.x = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    f.y = f.x;
    for (const auto& s : plot.lines) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            f.x.lo = std::min(f.x.lo, s.x[i]);
            f.x.hi = std::max(f.x.hi, s.x[i]);
            const double ly = std::log10(std::max(s.y[i], floor_seconds));
            f.y.lo = std::min(f.y.lo, ly);
            f.y.hi = std::max(f.y.hi, ly);
        }
    }
    SvgDocument svg;
    draw_axes(svg, f, plot.title, plot.x_label, "selector time (s, log scale)");
    std::vector<std::string> names;
    for (const auto& s : plot.lines) names.push_back(s.name);
    const auto colors = method_colors(names);
    for (const auto& s : plot.lines) {
        const std::string color = colors.at(s.name);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) pts.emplace_back(f.px(s.x[i]), f.py(std::max(s.y[i], floor_seconds)));
        svg.polyline(pts, color, 2.0, "series");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i < s.flagged.size() && s.flagged[i]) {
                svg.open_group("over-cap");
                svg.line(pts[i].first - 5, pts[i].second - 5, pts[i].first + 5, pts[i].second + 5, color, 2);
                svg.line(pts[i].first - 5, pts[i].second + 5, pts[i].first + 5, pts[i].second - 5, color, 2);
                svg.close_group();
            } else {
                svg.circle(pts[i].first, pts[i].second, 2.5, color);
            }
        }
    }
    draw_legend(svg, names, colors, f);
    return svg.finish();
}

/// Rank axis with rank 1 on the right; better half labelled on the right,
/// the rest on the left; one bar per non-significant clique.
inline std::string render_cd(const ComparisonReport& rep, const std::string& title) {
    const std::size_t m = rep.methods.size();
    require(m >= 2, "CD diagram: needs at least 2 methods");
    const double left = 160, right = 740, axis_y = 90;
    auto px = [&](double rank) { return right - (rank - 1.0) / static_cast<double>(m - 1) * (right - left); };

    const auto colors = method_colors(rep.methods);
    SvgDocument svg;
    svg.text(svg_width / 2, 28, title, "middle", 16);
    svg.open_group("axis");
    svg.line(left, axis_y, right, axis_y, "black", 1.5);
    for (std::size_t r = 1; r <= m; ++r) {
        const double x = px(static_cast<double>(r));
        svg.line(x, axis_y - 6, x, axis_y, "black");
        svg.text(x, axis_y - 10, std::to_string(r), "middle", 12);
    }
    svg.close_group();

    const std::size_t right_count = (m + 1) / 2;
    const double cliques_bottom = axis_y + 14 + 9.0 * static_cast<double>(rep.cliques.size());
    for (std::size_t pos = 0; pos < m; ++pos) {
        const std::size_t i = rep.ordering[pos];
        const double x = px(rep.average_ranks[i]);
        const bool on_right = pos < right_count;
        const double row = on_right ? static_cast<double>(pos) : static_cast<double>(m - 1 - pos);
        const double y = cliques_bottom + 20 + row * 26;
        const double end_x = on_right ? right + 20 : left - 20;
        svg.open_group("method");
        svg.line(x, axis_y, x, y, "black", 1);
        svg.line(x, y, end_x, y, "black", 1);
        svg.circle(x, axis_y, 3, colors.at(rep.methods[i]));
        svg.text(on_right ? end_x + 5 : end_x - 5, y + 4, rep.methods[i] + " (" + svg_num(rep.average_ranks[i]) + ")",
                 on_right ? "start" : "end", 12);
        svg.close_group();
    }
    for (std::size_t c = 0; c < rep.cliques.size(); ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i : rep.cliques[c]) {
            lo = std::min(lo, px(rep.average_ranks[i]));
            hi = std::max(hi, px(rep.average_ranks[i]));
        }
        const double y = axis_y + 14 + 9.0 * static_cast<double>(c);
        svg.line(lo - 4, y, hi + 4, y, "black", 4, "", "clique");
    }
    svg.text(svg_width / 2, svg_height - 16,
             "bars join methods with Holm-adjusted Wilcoxon p >= " + svg_num(rep.alpha, 3), "middle", 11);
    return svg.finish();
}

}  // namespace fsbench
