#pragma once

#include "spatseg/types.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace spatseg {

struct SegmentationOptions {
    int min_count = 3;         // minimum active sites per segment
    double improve_tol = 1e-12; // strict-improvement threshold for a seed swap
    int max_cycles = 100;      // cap on full greedy sweeps
};

// Negative log likelihood of independent per-segment Gaussians, each with its
// segment's empirical mean and (population) variance:
//   f = sum_k n_k (log(v_k)/2 + log(2 pi)/2 + 1/2).
// Labels must lie in [0, K). Returns +inf when any segment has fewer than
// min_count members. Variances are floored at max(1e-30, 1e-15 * var(xi)).
double objective_fK(const Eigen::VectorXd& xi, const std::vector<int>& label, int K,
                    const SegmentationOptions& opts = {});

// Deterministic density-based k-means seeding followed by Lloyd iterations on
// the standardized (x, y, xi) features; final centroids snap to distinct data
// points. Returns K indices into pts, ascending. K == 1 returns the density peak.
std::vector<int> deterministic_kmeans_seeds(std::span<const Point> pts, const Eigen::VectorXd& xi, int K);

struct Segmentation {
    int K = 0;
    std::vector<int> seeds; // indices into the site list passed in
    std::vector<int> label; // per site, in [0, K): nearest seed (ties -> lowest seed slot)
    double objective = 0.0; // f_K at the returned seeds
    int cycles = 0;         // greedy sweeps performed
};

// Greedy seed search: starting from the deterministic k-means seeds, sweep the
// segments cyclically; for each segment try every member site as a replacement
// seed and keep the best strictly improving swap. Stops when a full sweep
// leaves the seeds unchanged. Should the start violate min_count, swaps that
// shrink the total member deficit are accepted first, so the search recovers
// feasibility whenever a feasible configuration is reachable.
Segmentation segment_greedy(std::span<const Point> pts, const Eigen::VectorXd& xi, int K,
                            const SegmentationOptions& opts = {});

struct BicEntry {
    int K = 0;
    double objective = 0.0;
    double bic = 0.0; // objective + 4 K log(n)
    Segmentation seg;
};

struct BicSelection {
    int best_K = 0;
    std::vector<BicEntry> entries; // K = 1 .. K_max in order
};

// Runs segment_greedy for K = 1..K_max and picks the K minimizing
// BIC(K) = f_K + 4 K log(n).
BicSelection select_K_by_bic(std::span<const Point> pts, const Eigen::VectorXd& xi, int K_max,
                             const SegmentationOptions& opts = {});

} // namespace spatseg
