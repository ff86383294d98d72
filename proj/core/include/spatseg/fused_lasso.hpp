#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

namespace spatseg {

// Graph fused lasso over an adjacency structure:
//   minimize_beta  sum_i (xi_i - beta_i)^2 + rho sum_{(j,k) in E} |beta_j - beta_k|.
// Solved by ADMM on the edge-difference splitting with residual balancing.
struct FusionProblem {
    Eigen::VectorXd xi;
    std::vector<std::pair<int, int>> edges; // undirected, vertex indices into xi
    double rho = 0.0;
};

struct AdmmOptions {
    double tol = 1e-8;   // absolute primal/dual residual tolerance (inf norm)
    int max_iter = 10000;
    double mu0 = 1.0;    // initial augmented-Lagrangian parameter
};

struct FusionResult {
    Eigen::VectorXd beta;
    Eigen::VectorXd dual;    // per-edge subgradient v in [-1, 1]
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double mu_final = 0.0;
    std::vector<int> component; // fused-component label per vertex
    int n_components = 0;
};

// Throws convergence_error (carrying the final residuals) if the iteration
// cap is reached before both residuals drop below tol. With rho == 0 returns
// beta = xi directly. Warm starts continue from *warm when provided.
FusionResult fused_lasso(const FusionProblem& problem, const AdmmOptions& opts = {},
                         const FusionResult* warm = nullptr);

// Connected components of the subgraph of edges with |beta_j - beta_k| <= fuse_tol.
// Labels are assigned in increasing order of the smallest vertex index.
std::pair<std::vector<int>, int> fused_components(const Eigen::VectorXd& beta,
                                                  std::span<const std::pair<int, int>> edges,
                                                  double fuse_tol);

// Default fuse tolerance: 1e-6 * (max xi - min xi).
double default_fuse_tol(const Eigen::VectorXd& xi);

// Smallest rho achieving full fusion (every connected component of the graph
// collapses to a single value), found by doubling + bisection to 1% accuracy.
double full_fusion_rho(const Eigen::VectorXd& xi, std::span<const std::pair<int, int>> edges,
                       const AdmmOptions& opts = {});

// 12 log-spaced values from 1e-3 * rho_max to rho_max (ascending).
std::vector<double> rho_grid(double rho_max, int count = 12);

struct PathEntry {
    double rho = 0.0;
    FusionResult result;
};

// Solution path over the rho grid, warm-starting each solve from the previous.
std::vector<PathEntry> fusion_path(const Eigen::VectorXd& xi, std::span<const std::pair<int, int>> edges,
                                   const AdmmOptions& opts = {}, int count = 12);

} // namespace spatseg
