#include "thetafit/svg.hpp"

#include "thetafit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace thetafit {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

std::string fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
    void pad() {
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

// Largest of {1,2,5}*10^k not exceeding the raw spacing.
double nice_tick_spacing(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    if (norm >= 5.0) return 5.0 * mag;
    if (norm >= 2.0) return 2.0 * mag;
    return mag;
}

std::vector<double> ticks(const Extent& e) {
    std::vector<double> out;
    const double spacing = nice_tick_spacing(e.hi - e.lo);
    double t = std::ceil(e.lo / spacing) * spacing;
    for (; t <= e.hi + 1e-9 * spacing; t += spacing) {
        out.push_back(std::fabs(t) < 1e-12 * spacing ? 0.0 : t);
    }
    return out;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

SvgChart::SvgChart(std::string title, std::string x_label, std::string y_label, int width,
                   int height)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      width_(width),
      height_(height) {}

void SvgChart::add_line(const std::string& label, std::vector<std::array<double, 2>> points,
                        const std::string& color, double stroke_width, const std::string& dash) {
    lines_.push_back({label, std::move(points), color, stroke_width, dash});
}

void SvgChart::add_band(const std::string& label, std::vector<std::array<double, 2>> lower,
                        std::vector<std::array<double, 2>> upper, const std::string& color,
                        double opacity) {
    bands_.push_back({label, std::move(lower), std::move(upper), color, opacity});
}

void SvgChart::add_scatter(const std::string& label, std::vector<std::array<double, 2>> points,
                           const std::string& color, double radius) {
    scatters_.push_back({label, std::move(points), color, radius});
}

void SvgChart::add_bars(const std::string& label, std::vector<double> edges,
                        std::vector<double> heights, const std::string& color, double opacity) {
    if (edges.size() != heights.size() + 1) {
        throw DataError("histogram bars need one more edge than heights");
    }
    bars_.push_back({label, std::move(edges), std::move(heights), color, opacity});
}

std::string SvgChart::render() const {
    Extent ex;
    Extent ey;
    for (const auto& s : lines_) {
        for (const auto& p : s.points) {
            ex.include(p[0]);
            ey.include(p[1]);
        }
    }
    for (const auto& s : scatters_) {
        for (const auto& p : s.points) {
            ex.include(p[0]);
            ey.include(p[1]);
        }
    }
    for (const auto& b : bands_) {
        for (const auto& p : b.lower) {
            ex.include(p[0]);
            ey.include(p[1]);
        }
        for (const auto& p : b.upper) {
            ex.include(p[0]);
            ey.include(p[1]);
        }
    }
    for (const auto& b : bars_) {
        for (double e : b.edges) ex.include(e);
        for (double h : b.heights) ey.include(h);
        if (!b.heights.empty()) ey.include(0.0);
    }
    if (!ex.valid() || !ey.valid()) throw DataError("nothing to plot");
    ex.pad();
    ey.pad();

    const double plot_w = width_ - kMarginLeft - kMarginRight;
    const double plot_h = height_ - kMarginTop - kMarginBottom;
    const auto map_x = [&](double x) {
        return kMarginLeft + (x - ex.lo) / (ex.hi - ex.lo) * plot_w;
    };
    const auto map_y = [&](double y) {
        return kMarginTop + plot_h - (y - ey.lo) / (ey.hi - ey.lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n";
    svg << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title_) << "</text>\n";

    // Axis group: frame, ticks, grid lines, labels.
    svg << "<g class=\"axis\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : ticks(ex)) {
        const double px = map_x(t);
        svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
            << fmt(px) << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"#333\"/>\n";
        svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << kMarginTop << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << fmt(px) << "\" y=\"" << kMarginTop + plot_h + 18
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks(ey)) {
        const double py = map_y(t);
        svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(py) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << fmt(py) << "\" stroke=\"#333\"/>\n";
        svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(py) << "\" x2=\""
            << kMarginLeft + plot_w << "\" y2=\"" << fmt(py) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << height_ - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label_) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << kMarginTop + plot_h / 2 << ")\">" << escape(y_label_) << "</text>\n";
    svg << "</g>\n";

    for (const auto& b : bands_) {
        svg << "<polygon fill=\"" << b.color << "\" fill-opacity=\"" << fmt(b.opacity)
            << "\" stroke=\"none\" points=\"";
        for (const auto& p : b.upper) svg << fmt(map_x(p[0])) << ',' << fmt(map_y(p[1])) << ' ';
        for (auto it = b.lower.rbegin(); it != b.lower.rend(); ++it) {
            svg << fmt(map_x((*it)[0])) << ',' << fmt(map_y((*it)[1])) << ' ';
        }
        svg << "\"/>\n";
    }
    for (const auto& b : bars_) {
        svg << "<g fill=\"" << b.color << "\" fill-opacity=\"" << fmt(b.opacity) << "\">\n";
        for (std::size_t i = 0; i < b.heights.size(); ++i) {
            const double x0 = map_x(b.edges[i]);
            const double x1 = map_x(b.edges[i + 1]);
            const double y0 = map_y(b.heights[i]);
            const double y1 = map_y(0.0);
            svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(std::min(y0, y1)) << "\" width=\""
                << fmt(x1 - x0) << "\" height=\"" << fmt(std::fabs(y1 - y0)) << "\"/>\n";
        }
        svg << "</g>\n";
    }
    for (const auto& s : lines_) {
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
            << fmt(s.stroke_width) << "\"";
        if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
        svg << " points=\"";
        for (const auto& p : s.points) svg << fmt(map_x(p[0])) << ',' << fmt(map_y(p[1])) << ' ';
        svg << "\"/>\n";
    }
    for (const auto& s : scatters_) {
        svg << "<g fill=\"" << s.color << "\" fill-opacity=\"0.7\">\n";
        for (const auto& p : s.points) {
            svg << "<circle cx=\"" << fmt(map_x(p[0])) << "\" cy=\"" << fmt(map_y(p[1]))
                << "\" r=\"" << fmt(s.radius) << "\"/>\n";
        }
        svg << "</g>\n";
    }

    // Legend: colored swatch + label per named element, top-left corner.
    int row = 0;
    const auto legend_entry = [&](const std::string& color, const std::string& label) {
        if (label.empty()) return;
        const int y = kMarginTop + 14 + 16 * row++;
        svg << "<rect x=\"" << kMarginLeft + 8 << "\" y=\"" << y - 9
            << "\" width=\"12\" height=\"9\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << kMarginLeft + 25 << "\" y=\"" << y
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(label) << "</text>\n";
    };
    for (const auto& b : bands_) legend_entry(b.color, b.label);
    for (const auto& b : bars_) legend_entry(b.color, b.label);
    for (const auto& s : lines_) legend_entry(s.color, s.label);
    for (const auto& s : scatters_) legend_entry(s.color, s.label);

    svg << "</svg>\n";
    return svg.str();
}

void SvgChart::write(const std::filesystem::path& path) const {
    const std::string document = render();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << document;
}

HistogramBins histogram_bins(const std::vector<double>& s1, const std::vector<double>& s2,
                             int n_bins) {
    if (s1.empty() || s2.empty()) throw DataError("histogram needs nonempty samples");
    if (n_bins < 1) throw DataError("histogram needs at least one bin");
    Extent e;
    for (double v : s1) e.include(v);
    for (double v : s2) e.include(v);
    e.pad();

    HistogramBins bins;
    bins.edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i) {
        bins.edges[static_cast<std::size_t>(i)] = e.lo + (e.hi - e.lo) * i / n_bins;
    }
    bins.counts1.assign(static_cast<std::size_t>(n_bins), 0.0);
    bins.counts2.assign(static_cast<std::size_t>(n_bins), 0.0);
    const auto bin_of = [&](double v) {
        auto idx = static_cast<long>((v - e.lo) / (e.hi - e.lo) * n_bins);
        return static_cast<std::size_t>(std::clamp<long>(idx, 0, n_bins - 1));
    };
    for (double v : s1) bins.counts1[bin_of(v)] += 1.0;
    for (double v : s2) bins.counts2[bin_of(v)] += 1.0;
    return bins;
}

}  // namespace thetafit
