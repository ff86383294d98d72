#include "spatseg/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spatseg {

double Rect::distance_to(Point p) const {
    const double dx = std::max({xmin - p.x, 0.0, p.x - xmax});
    const double dy = std::max({ymin - p.y, 0.0, p.y - ymax});
    return std::hypot(dx, dy);
}

Rect Rect::bounding(std::span<const Point> pts) {
    if (pts.empty()) throw std::invalid_argument("bounding rectangle of an empty point set");
    Rect r{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const Point& p : pts) {
        r.xmin = std::min(r.xmin, p.x);
        r.xmax = std::max(r.xmax, p.x);
        r.ymin = std::min(r.ymin, p.y);
        r.ymax = std::max(r.ymax, p.y);
    }
    return r;
}

namespace {

void validate_sites(const std::vector<Point>& pts, const Rect& dom) {
    if (pts.empty()) throw std::invalid_argument("SiteSet: empty site list");
    if (!(dom.xmax > dom.xmin) || !(dom.ymax > dom.ymin))
        throw std::invalid_argument("SiteSet: domain rectangle has non-positive extent");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& p = pts[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("SiteSet: non-finite coordinate at site " + std::to_string(i));
        if (!dom.contains(p))
            throw std::invalid_argument("SiteSet: site " + std::to_string(i) + " lies outside the domain");
    }
    // Coincident sites break tessellation and pair-based estimators.
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pts[a].x != pts[b].x ? pts[a].x < pts[b].x : pts[a].y < pts[b].y;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (pts[order[k - 1]] == pts[order[k]])
            throw std::invalid_argument("SiteSet: duplicate sites " + std::to_string(order[k - 1]) +
                                        " and " + std::to_string(order[k]));
    }
}

} // namespace

SiteSet::SiteSet(std::vector<Point> pts, Rect domain) : pts_(std::move(pts)), dom_(domain) {
    validate_sites(pts_, dom_);
}

SiteSet::SiteSet(std::vector<Point> pts) : pts_(std::move(pts)) {
    if (pts_.empty()) throw std::invalid_argument("SiteSet: empty site list");
    dom_ = Rect::bounding(pts_);
    // A degenerate (zero-area) bounding box is widened a hair so the domain
    // stays a valid rectangle; site validation still applies.
    if (dom_.xmax == dom_.xmin) { dom_.xmin -= 0.5; dom_.xmax += 0.5; }
    if (dom_.ymax == dom_.ymin) { dom_.ymin -= 0.5; dom_.ymax += 0.5; }
    validate_sites(pts_, dom_);
}

SpatialDataset::SpatialDataset(SiteSet s, Eigen::VectorXd obs, std::optional<double> nug)
    : sites(std::move(s)), z(std::move(obs)), tau2(nug) {
    if (static_cast<std::size_t>(z.size()) != sites.size())
        throw std::invalid_argument("SpatialDataset: observation count does not match site count");
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (!std::isfinite(z[i]))
            throw std::invalid_argument("SpatialDataset: non-finite observation at row " + std::to_string(i));
    if (tau2 && (!std::isfinite(*tau2) || *tau2 < 0.0))
        throw std::invalid_argument("SpatialDataset: nugget must be finite and non-negative");
}

} // namespace spatseg
