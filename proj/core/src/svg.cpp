#include "spatseg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace spatseg {

namespace {

// Eight anchors of the matplotlib viridis ramp.
constexpr int kRamp[8][3] = {{68, 1, 84},    {70, 50, 127},  {54, 92, 141},  {39, 127, 142},
                             {31, 161, 135}, {74, 194, 109}, {159, 218, 58}, {253, 231, 37}};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string viridis_color(double t) {
    if (std::isnan(t)) return "#9e9e9e";
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 7.0;
    const int lo = std::min(6, static_cast<int>(pos));
    const double w = pos - lo;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround((1.0 - w) * kRamp[lo][0] + w * kRamp[lo + 1][0])),
                  static_cast<int>(std::lround((1.0 - w) * kRamp[lo][1] + w * kRamp[lo + 1][1])),
                  static_cast<int>(std::lround((1.0 - w) * kRamp[lo][2] + w * kRamp[lo + 1][2])));
    return buf;
}

std::string voronoi_svg(const VoronoiDiagram& vd, const Rect& domain, const Eigen::VectorXd& values,
                        std::span<const Point> sites, const SvgOptions& opts) {
    if (static_cast<std::size_t>(values.size()) != vd.size())
        throw std::invalid_argument("voronoi_svg: one value per cell required");
    if (!sites.empty() && sites.size() != vd.size())
        throw std::invalid_argument("voronoi_svg: sites must match the cells when provided");
    if (!(opts.width > 0.0)) throw std::invalid_argument("voronoi_svg: width must be positive");

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (std::isfinite(values[i])) {
            vmin = std::min(vmin, values[i]);
            vmax = std::max(vmax, values[i]);
        }
    const bool flat = !(vmax > vmin);

    const double margin = 0.04 * opts.width;
    const double title_h = opts.title.empty() ? 0.0 : 0.05 * opts.width;
    const double scale = (opts.width - 2.0 * margin) / domain.width();
    const double map_h = domain.height() * scale;
    const double height = map_h + 2.0 * margin + title_h;
    auto X = [&](double x) { return margin + (x - domain.xmin) * scale; };
    auto Y = [&](double y) { return title_h + margin + (domain.ymax - y) * scale; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(opts.width) + "\" height=\"" +
           fmt(height) + "\" viewBox=\"0 0 " + fmt(opts.width) + " " + fmt(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        svg += "<text x=\"" + fmt(opts.width / 2.0) + "\" y=\"" + fmt(0.6 * title_h) +
               "\" font-family=\"sans-serif\" font-size=\"" + fmt(0.45 * title_h) +
               "\" text-anchor=\"middle\">" + opts.title + "</text>\n";

    const std::string stroke = opts.draw_cell_borders ? "#333333" : "none";
    for (std::size_t i = 0; i < vd.size(); ++i) {
        const double v = values[static_cast<Eigen::Index>(i)];
        const double t = std::isfinite(v) ? (flat ? 0.5 : (v - vmin) / (vmax - vmin))
                                          : std::numeric_limits<double>::quiet_NaN();
        svg += "<polygon points=\"";
        for (const Point& p : vd.cells[i].v) svg += fmt(X(p.x)) + "," + fmt(Y(p.y)) + " ";
        svg += "\" fill=\"" + viridis_color(t) + "\" stroke=\"" + stroke + "\" stroke-width=\"0.6\"/>\n";
    }
    if (opts.draw_sites)
        for (const Point& s : sites)
            svg += "<circle cx=\"" + fmt(X(s.x)) + "\" cy=\"" + fmt(Y(s.y)) +
                   "\" r=\"1.6\" fill=\"black\"/>\n";
    return svg + "</svg>\n";
}

} // namespace spatseg
