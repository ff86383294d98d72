#pragma once

#include "spatseg/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace spatseg {

// Default neighborhood radius r = sqrt(5 |D| / (n pi)): the disc of radius r
// holds 5 sites in expectation under a uniform design.
double recommended_radius(double domain_area, std::size_t n);

// Symmetric fixed-radius neighbor structure N_i = { j != i : ||s_j - s_i|| <= r }.
struct NeighborGraph {
    std::vector<std::vector<int>> neighbors; // per site, ascending site index
    std::vector<std::vector<double>> dist;   // aligned with `neighbors`
    std::vector<int> active;                 // sites with at least one neighbor, ascending
    double radius = 0.0;

    std::size_t size() const { return neighbors.size(); }
    bool is_active(int i) const { return !neighbors[static_cast<std::size_t>(i)].empty(); }
};

NeighborGraph build_neighbor_graph(const SiteSet& sites, double radius);

// Simple polygon, counter-clockwise vertex order.
struct Polygon {
    std::vector<Point> v;
    double area() const; // shoelace, >= 0 for CCW
};

struct VoronoiDiagram {
    std::vector<Polygon> cells;              // cell i contains site i; clipped to D
    std::vector<std::pair<int, int>> edges;  // adjacent cell pairs (i < j), lexicographic
    std::vector<std::vector<int>> adjacency; // per site, ascending

    std::size_t size() const { return cells.size(); }
};

// Voronoi tessellation of the domain rectangle. Cells are convex polygons
// covering D exactly; two cells are adjacent iff they share a boundary
// segment of positive length (point contact does not count).
// Throws degenerate_geometry when n >= 3 and all sites are collinear.
VoronoiDiagram voronoi_diagram(const SiteSet& sites);

// Index of the seed nearest to s; ties broken toward the lowest seed index.
int voronoi_assign(std::span<const Point> seeds, Point s);
std::vector<int> voronoi_assign(std::span<const Point> seeds, std::span<const Point> query);

} // namespace spatseg
