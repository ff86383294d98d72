#include "spatseg/geometry.hpp"

#include "spatseg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace spatseg {

double recommended_radius(double domain_area, std::size_t n) {
    if (!(domain_area > 0.0)) throw std::invalid_argument("recommended_radius: domain area must be positive");
    if (n == 0) throw std::invalid_argument("recommended_radius: n must be positive");
    return std::sqrt(5.0 * domain_area / (static_cast<double>(n) * std::numbers::pi));
}

NeighborGraph build_neighbor_graph(const SiteSet& sites, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("build_neighbor_graph: radius must be positive and finite");
    const std::size_t n = sites.size();
    NeighborGraph g;
    g.radius = radius;
    g.neighbors.assign(n, {});
    g.dist.assign(n, {});
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d2 = squared_distance(sites[i], sites[j]);
            if (d2 <= r2) {
                const double d = std::sqrt(d2);
                g.neighbors[i].push_back(static_cast<int>(j));
                g.dist[i].push_back(d);
                g.neighbors[j].push_back(static_cast<int>(i));
                g.dist[j].push_back(d);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!g.neighbors[i].empty()) g.active.push_back(static_cast<int>(i));
    return g;
}

double Polygon::area() const {
    double a = 0.0;
    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % m];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

namespace {

// A convex polygon whose edges remember which bisector (site index) or
// domain wall (-1) produced them. edge k runs from v[k] to v[(k+1)%m].
struct LabeledPoly {
    std::vector<Point> v;
    std::vector<int> label;
};

// Clip `poly` by the half-plane of points nearer to `si` than to `sj`
// (keep f(p) = (sj - si) . (p - mid) <= 0). New edges get label j.
void clip_halfplane(LabeledPoly& poly, Point si, Point sj, int j) {
    const double nx = sj.x - si.x, ny = sj.y - si.y;
    const double mx = 0.5 * (si.x + sj.x), my = 0.5 * (si.y + sj.y);
    const std::size_t m = poly.v.size();
    std::vector<double> f(m);
    bool any_out = false, any_in = false;
    for (std::size_t k = 0; k < m; ++k) {
        f[k] = nx * (poly.v[k].x - mx) + ny * (poly.v[k].y - my);
        if (f[k] > 0.0)
            any_out = true;
        else
            any_in = true;
    }
    if (!any_out) return; // fully kept
    if (!any_in) {        // fully removed; cannot happen for a site's own cell
        poly.v.clear();
        poly.label.clear();
        return;
    }
    std::vector<Point> nv;
    std::vector<int> nl;
    nv.reserve(m + 2);
    nl.reserve(m + 2);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t k1 = (k + 1) % m;
        const bool in0 = f[k] <= 0.0, in1 = f[k1] <= 0.0;
        if (in0) {
            nv.push_back(poly.v[k]);
            nl.push_back(poly.label[k]);
        }
        if (in0 != in1) {
            const double t = f[k] / (f[k] - f[k1]);
            Point c{poly.v[k].x + t * (poly.v[k1].x - poly.v[k].x),
                    poly.v[k].y + t * (poly.v[k1].y - poly.v[k].y)};
            nv.push_back(c);
            // Leaving the half-plane: the cut edge from c along the bisector
            // gets label j. Entering: c continues the original edge.
            nl.push_back(in0 ? j : poly.label[k]);
        }
    }
    poly.v = std::move(nv);
    poly.label = std::move(nl);
}

bool all_collinear(const std::vector<Point>& p) {
    if (p.size() < 3) return false;
    // cross products relative to the two extreme points of the first edge
    std::size_t b = 1;
    while (b < p.size() && p[b].x == p[0].x && p[b].y == p[0].y) ++b;
    if (b == p.size()) return true;
    const double ux = p[b].x - p[0].x, uy = p[b].y - p[0].y;
    const double scale = std::hypot(ux, uy);
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double cross = ux * (p[k].y - p[0].y) - uy * (p[k].x - p[0].x);
        if (std::abs(cross) > 1e-14 * scale * (std::abs(p[k].x - p[0].x) + std::abs(p[k].y - p[0].y) + scale))
            return false;
    }
    return true;
}

} // namespace

VoronoiDiagram voronoi_diagram(const SiteSet& sites) {
    const std::size_t n = sites.size();
    if (n >= 3 && all_collinear(sites.points()))
        throw degenerate_geometry("voronoi_diagram: all sites are collinear");
    const Rect& D = sites.domain();
    const double tol_len = 1e-9 * D.diameter();

    VoronoiDiagram vd;
    vd.cells.resize(n);
    vd.adjacency.assign(n, {});

    // Directed shared-boundary lengths, keyed by (i, j).
    std::map<std::pair<int, int>, double> boundary_len;

    // Process sites in order of distance from the current cell's generator,
    // stopping once a bisector cannot possibly intersect the shrinking cell.
    std::vector<std::size_t> order(n);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabeledPoly poly;
        poly.v = {{D.xmin, D.ymin}, {D.xmax, D.ymin}, {D.xmax, D.ymax}, {D.xmin, D.ymax}};
        poly.label = {-1, -1, -1, -1};

        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t j = 0; j < n; ++j) d2[j] = squared_distance(sites[i], sites[j]);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return d2[a] != d2[b] ? d2[a] < d2[b] : a < b;
        });

        double max_vd2 = 0.0; // squared distance to farthest cell vertex
        for (const Point& p : poly.v) max_vd2 = std::max(max_vd2, squared_distance(sites[i], p));
        for (std::size_t oi = 1; oi < n; ++oi) { // order[0] == i itself
            const std::size_t j = order[oi];
            // Bisector at distance sqrt(d2[j])/2 cannot cut the cell if the
            // whole cell is nearer than that.
            if (d2[j] > 4.0 * max_vd2) break;
            clip_halfplane(poly, sites[i], sites[j], static_cast<int>(j));
            max_vd2 = 0.0;
            for (const Point& p : poly.v) max_vd2 = std::max(max_vd2, squared_distance(sites[i], p));
        }
        if (poly.v.size() < 3)
            throw degenerate_geometry("voronoi_diagram: clipping produced a degenerate cell for site " +
                                      std::to_string(i));
        vd.cells[i].v = poly.v;
        for (std::size_t k = 0; k < poly.v.size(); ++k) {
            const int lab = poly.label[k];
            if (lab < 0) continue;
            const Point& a = poly.v[k];
            const Point& b = poly.v[(k + 1) % poly.v.size()];
            boundary_len[{static_cast<int>(i), lab}] += distance(a, b);
        }
    }

    for (const auto& [key, len] : boundary_len) {
        const auto [i, j] = key;
        if (i < j && len > tol_len) {
            auto rev = boundary_len.find({j, i});
            if (rev != boundary_len.end() && rev->second > tol_len) {
                vd.edges.emplace_back(i, j);
                vd.adjacency[i].push_back(j);
                vd.adjacency[j].push_back(i);
            }
        }
    }
    for (auto& a : vd.adjacency) std::sort(a.begin(), a.end());
    std::sort(vd.edges.begin(), vd.edges.end());
    return vd;
}

int voronoi_assign(std::span<const Point> seeds, Point s) {
    if (seeds.empty()) throw std::invalid_argument("voronoi_assign: no seeds");
    int best = 0;
    double bd = squared_distance(seeds[0], s);
    for (std::size_t k = 1; k < seeds.size(); ++k) {
        const double d = squared_distance(seeds[k], s);
        if (d < bd) { // strict: ties keep the lowest index
            bd = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

std::vector<int> voronoi_assign(std::span<const Point> seeds, std::span<const Point> query) {
    std::vector<int> lab(query.size());
    for (std::size_t i = 0; i < query.size(); ++i) lab[i] = voronoi_assign(seeds, query[i]);
    return lab;
}

} // namespace spatseg
