#pragma once

#include "spatseg/geometry.hpp"
#include "spatseg/types.hpp"

#include <Eigen/Dense>
#include <span>
#include <string>

namespace spatseg {

struct SvgOptions {
    double width = 720.0; // pixels; height follows the domain aspect ratio
    bool draw_sites = true;
    bool draw_cell_borders = true;
    std::string title; // optional caption rendered above the map
};

// Renders the Voronoi cells filled by a fixed viridis-like color ramp over
// [min value, max value]; NaN-valued cells are drawn gray. `values` is
// aligned with the diagram's cells; pass the generator sites to overlay dots.
std::string voronoi_svg(const VoronoiDiagram& vd, const Rect& domain, const Eigen::VectorXd& values,
                        std::span<const Point> sites = {}, const SvgOptions& opts = {});

// Linear interpolation of the fixed viridis-like ramp; t in [0, 1] maps to
// "#rrggbb". Exposed for tests.
std::string viridis_color(double t);

} // namespace spatseg
