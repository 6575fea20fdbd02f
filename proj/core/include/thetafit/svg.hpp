#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace thetafit {

/// Minimal self-contained SVG line-chart writer: one fixed layout, linear
/// axes with nice-number ticks, polyline series, filled bands, scatter marks
/// and bar groups. Output depends only on the input data, so files diff
/// cleanly across runs.
class SvgChart {
public:
    SvgChart(std::string title, std::string x_label, std::string y_label, int width = 860,
             int height = 520);

    void add_line(const std::string& label, std::vector<std::array<double, 2>> points,
                  const std::string& color, double stroke_width = 1.6,
                  const std::string& dash = "");

    /// Filled region between two curves sharing x coordinates.
    void add_band(const std::string& label, std::vector<std::array<double, 2>> lower,
                  std::vector<std::array<double, 2>> upper, const std::string& color,
                  double opacity);

    void add_scatter(const std::string& label, std::vector<std::array<double, 2>> points,
                     const std::string& color, double radius = 2.0);

    /// Histogram-style bars: edges has one more entry than heights.
    void add_bars(const std::string& label, std::vector<double> edges, std::vector<double> heights,
                  const std::string& color, double opacity);

    /// Renders the document; throws DataError if no drawable data was added.
    std::string render() const;
    void write(const std::filesystem::path& path) const;

private:
    struct Line {
        std::string label;
        std::vector<std::array<double, 2>> points;
        std::string color;
        double stroke_width;
        std::string dash;
    };
    struct Band {
        std::string label;
        std::vector<std::array<double, 2>> lower;
        std::vector<std::array<double, 2>> upper;
        std::string color;
        double opacity;
    };
    struct Scatter {
        std::string label;
        std::vector<std::array<double, 2>> points;
        std::string color;
        double radius;
    };
    struct Bars {
        std::string label;
        std::vector<double> edges;
        std::vector<double> heights;
        std::string color;
        double opacity;
    };

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    int width_;
    int height_;
    std::vector<Line> lines_;
    std::vector<Band> bands_;
    std::vector<Scatter> scatters_;
    std::vector<Bars> bars_;
};

/// Equal-width histogram over [min, max] of both samples combined.
struct HistogramBins {
    std::vector<double> edges;
    std::vector<double> counts1;
    std::vector<double> counts2;
};
HistogramBins histogram_bins(const std::vector<double>& s1, const std::vector<double>& s2,
                             int n_bins);

}  // namespace thetafit
