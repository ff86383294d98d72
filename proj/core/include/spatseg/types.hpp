#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

namespace spatseg {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(Point a, Point b) {
    return std::sqrt(squared_distance(a, b));
}

// Axis-aligned rectangular domain D.
struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    double diameter() const { return std::hypot(width(), height()); }
    Point center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
    bool contains(Point p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    // Euclidean distance from p to the rectangle (0 inside).
    double distance_to(Point p) const;

    static Rect bounding(std::span<const Point> pts); // throws std::invalid_argument if empty

    friend bool operator==(const Rect&, const Rect&) = default;
};

// Distinct planar sites inside a rectangular domain. Construction validates
// that every site lies in D and that no two sites coincide.
class SiteSet {
  public:
    SiteSet(std::vector<Point> pts, Rect domain);
    explicit SiteSet(std::vector<Point> pts); // domain = bounding rectangle

    std::size_t size() const { return pts_.size(); }
    const Point& operator[](std::size_t i) const { return pts_[i]; }
    const std::vector<Point>& points() const { return pts_; }
    const Rect& domain() const { return dom_; }

  private:
    std::vector<Point> pts_;
    Rect dom_;
};

// One realization of irregularly spaced spatial data, optionally with a
// known measurement-error (nugget) variance.
struct SpatialDataset {
    SiteSet sites;
    Eigen::VectorXd z;
    std::optional<double> tau2; // known nugget if any

    SpatialDataset(SiteSet s, Eigen::VectorXd obs, std::optional<double> nug = std::nullopt);
};

} // namespace spatseg
