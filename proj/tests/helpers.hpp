#pragma once

// Shared test utilities and independent reference implementations ("oracles")
// used to cross-check the library: a merge-path solver for the 1-D total
// variation problem, a directional-derivative optimality certificate for the
// graph fused lasso, brute-force Delaunay adjacency, a dense Lagrange solve
// for ordinary kriging, and small statistical helpers.

#include <spatseg/types.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace testutil {

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    const double diff = std::fabs(a - b);
    return diff <= abs_floor + rel * std::max(std::fabs(a), std::fabs(b));
}

inline std::vector<spatseg::Point> random_points(int n, const spatseg::Rect& dom, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> ux(dom.xmin, dom.xmax), uy(dom.ymin, dom.ymax);
    std::vector<spatseg::Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pts.push_back({ux(eng), uy(eng)});
    return pts;
}

// ---------------------------------------------------------------------------
// Exact solver for min_x sum_i (x_i - y_i)^2 + rho sum_i |x_{i+1} - x_i| on a
// chain, via the merge-only solution path in rho: each fused group's value
// moves linearly in rho between merges, c_g(rho) = mean_g + rho (a_g - b_g) /
// (2 |g|) with a_g/b_g the +-1 signs toward the next/previous group (0 at the
// boundary). Groups only merge as rho grows, so tracking collisions up to the
// target rho yields the exact solution.
inline std::vector<double> tv_chain_exact(const std::vector<double>& y, double rho) {
    struct Group {
        double sum = 0.0;
        int count = 0;
        double value = 0.0; // at the current path position
        double slope = 0.0;
    };
    const int n = static_cast<int>(y.size());
    std::vector<Group> g;
    g.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g.push_back({y[i], 1, y[i], 0.0});
    double cur = 0.0;
    // The merged group's line passes through the collision point (the path is
    // continuous), so after every merge it suffices to refresh signs/slopes
    // from the current values and re-express value = mean + cur * slope.
    auto refresh = [&]() {
        const int m = static_cast<int>(g.size());
        for (int k = 0; k < m; ++k) {
            const double a = (k + 1 < m) ? (g[k + 1].value > g[k].value ? 1.0 : -1.0) : 0.0;
            const double b = (k > 0) ? (g[k].value > g[k - 1].value ? 1.0 : -1.0) : 0.0;
            g[k].slope = (a - b) / (2.0 * g[k].count);
        }
        for (auto& grp : g) grp.value = grp.sum / grp.count + cur * grp.slope;
    };
    while (g.size() > 1) {
        // Merge adjacent groups that coincide at the current position.
        for (std::size_t k = 0; k + 1 < g.size();) {
            if (std::fabs(g[k].value - g[k + 1].value) <= 1e-12 * (1.0 + std::fabs(g[k].value))) {
                g[k].sum += g[k + 1].sum;
                g[k].count += g[k + 1].count; // keep g[k].value: the common collision value
                g.erase(g.begin() + static_cast<std::ptrdiff_t>(k) + 1);
                k = k > 0 ? k - 1 : 0;
            } else {
                ++k;
            }
        }
        refresh();
        // Earliest future collision among adjacent groups.
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            const double gap = g[k + 1].value - g[k].value;
            const double closing = g[k].slope - g[k + 1].slope;
            if (closing != 0.0) {
                const double dt = gap / closing;
                if (dt > 0.0) best = std::min(best, cur + dt);
            }
        }
        if (best >= rho) break;
        cur = best;
        for (auto& grp : g) grp.value = grp.sum / grp.count + cur * grp.slope;
    }
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(n));
    for (const auto& grp : g)
        x.insert(x.end(), static_cast<std::size_t>(grp.count), grp.sum / grp.count + rho * grp.slope);
    return x;
}

// Fused-lasso objective f(b) = sum (b - xi)^2 + rho sum_e |b_j - b_i|.
inline double fusion_objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& xi, double rho,
                               const std::vector<std::pair<int, int>>& edges) {
    double f = (beta - xi).squaredNorm();
    for (const auto& [i, j] : edges) f += rho * std::fabs(beta[j] - beta[i]);
    return f;
}

// One-sided directional derivative of the objective at beta in direction d.
// For a convex function, beta is the global minimizer iff every directional
// derivative is non-negative; checking a rich set of directions certifies
// optimality up to tolerance.
inline double fusion_dirderiv(const Eigen::VectorXd& beta, const Eigen::VectorXd& xi, double rho,
                              const std::vector<std::pair<int, int>>& edges, const Eigen::VectorXd& d,
                              double fuse_tol) {
    double g = 2.0 * (beta - xi).dot(d);
    for (const auto& [i, j] : edges) {
        const double db = beta[j] - beta[i];
        const double dd = d[j] - d[i];
        if (std::fabs(db) <= fuse_tol)
            g += rho * std::fabs(dd);
        else
            g += rho * (db > 0.0 ? dd : -dd);
    }
    return g;
}

// Smallest directional derivative over coordinate moves, fused-group moves,
// and `extra` random directions (unit norm). Non-negative (up to tolerance)
// certifies global optimality of the convex objective.
inline double fusion_certificate(const Eigen::VectorXd& beta, const Eigen::VectorXd& xi, double rho,
                                 const std::vector<std::pair<int, int>>& edges, double fuse_tol,
                                 int extra = 200, unsigned seed = 1234) {
    const Eigen::Index n = beta.size();
    double worst = std::numeric_limits<double>::infinity();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.setZero();
        d[i] = 1.0;
        worst = std::min(worst, fusion_dirderiv(beta, xi, rho, edges, d, fuse_tol));
        d[i] = -1.0;
        worst = std::min(worst, fusion_dirderiv(beta, xi, rho, edges, d, fuse_tol));
    }
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    for (int k = 0; k < extra; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) d[i] = nd(eng);
        d.normalize();
        worst = std::min(worst, fusion_dirderiv(beta, xi, rho, edges, d, fuse_tol));
        worst = std::min(worst, fusion_dirderiv(beta, xi, rho, edges, -d, fuse_tol));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Brute-force Delaunay adjacency: pair (i, j) is an edge iff some triangle
// (i, j, k) has an empty circumcircle. For sites well inside a much larger
// clipping rectangle this equals the Voronoi cell adjacency.
inline std::set<std::pair<int, int>> brute_delaunay_edges(const std::vector<spatseg::Point>& p) {
    const int n = static_cast<int>(p.size());
    std::set<std::pair<int, int>> edges;
    auto in_circle = [&](int a, int b, int c, int d) {
        // > 0 iff p[d] lies inside the circumcircle of CCW triangle (a, b, c).
        const double ax = p[a].x - p[d].x, ay = p[a].y - p[d].y;
        const double bx = p[b].x - p[d].x, by = p[b].y - p[d].y;
        const double cx = p[c].x - p[d].x, cy = p[c].y - p[d].y;
        const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                           (bx * bx + by * by) * (ax * cy - cx * ay) +
                           (cx * cx + cy * cy) * (ax * by - bx * ay);
        return det;
    };
    auto orient = [&](int a, int b, int c) {
        return (p[b].x - p[a].x) * (p[c].y - p[a].y) - (p[b].y - p[a].y) * (p[c].x - p[a].x);
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                int a = i, b = j, c = k;
                const double o = orient(a, b, c);
                if (std::fabs(o) < 1e-12) continue; // skip degenerate triples
                if (o < 0.0) std::swap(b, c);
                bool empty = true;
                for (int d = 0; d < n && empty; ++d) {
                    if (d == i || d == j || d == k) continue;
                    if (in_circle(a, b, c, d) > 0.0) empty = false;
                }
                if (empty) {
                    edges.emplace(i, j);
                    edges.emplace(i, k);
                    edges.emplace(j, k);
                }
            }
    return edges;
}

// ---------------------------------------------------------------------------
// Dense ordinary-kriging reference: solve [Sigma 1; 1' 0] [w; m] = [c; 1] and
// evaluate mean = w'z, variance = C(s0,s0) - 2 w'c + w' Sigma w.
struct BruteKrige {
    Eigen::VectorXd weights;
    double mean = 0.0;
    double variance = 0.0;
};

inline BruteKrige brute_ordinary_krige(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& c,
                                       double c00, const Eigen::VectorXd& z) {
    const Eigen::Index n = sigma.rows();
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = sigma;
    kkt.block(0, n, n, 1).setOnes();
    kkt.block(n, 0, 1, n).setOnes();
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = c;
    rhs[n] = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    BruteKrige out;
    out.weights = sol.head(n);
    out.mean = out.weights.dot(z);
    out.variance = c00 - 2.0 * out.weights.dot(c) + out.weights.dot(sigma * out.weights);
    return out;
}

// Brute-force Rand index over all pairs.
inline double brute_rand(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    long agree = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            ++total;
            if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
        }
    return static_cast<double>(agree) / static_cast<double>(total);
}

} // namespace testutil
