#include "spatseg/fused_lasso.hpp"

#include "spatseg/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatseg {

namespace {

void validate_edges(Eigen::Index n, std::span<const std::pair<int, int>> edges) {
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw std::invalid_argument("fused_lasso: edge vertex out of range");
        if (a == b) throw std::invalid_argument("fused_lasso: self-loop edge");
        const auto key = std::minmax(a, b);
        if (!seen.insert(key).second)
            throw std::invalid_argument("fused_lasso: duplicate edge (" + std::to_string(key.first) + ", " +
                                        std::to_string(key.second) + ")");
    }
}

Eigen::VectorXd apply_D(std::span<const std::pair<int, int>> edges, const Eigen::VectorXd& beta) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t e = 0; e < edges.size(); ++e)
        out[static_cast<Eigen::Index>(e)] = beta[edges[e].first] - beta[edges[e].second];
    return out;
}

Eigen::VectorXd apply_Dt(std::span<const std::pair<int, int>> edges, Eigen::Index n,
                         const Eigen::VectorXd& y) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out[edges[e].first] += y[static_cast<Eigen::Index>(e)];
        out[edges[e].second] -= y[static_cast<Eigen::Index>(e)];
    }
    return out;
}

} // namespace

FusionResult fused_lasso(const FusionProblem& problem, const AdmmOptions& opts, const FusionResult* warm) {
    const Eigen::Index n = problem.xi.size();
    if (n == 0) throw std::invalid_argument("fused_lasso: empty problem");
    if (!(problem.rho >= 0.0) || !std::isfinite(problem.rho))
        throw std::invalid_argument("fused_lasso: rho must be finite and non-negative");
    if (!(opts.tol > 0.0) || opts.max_iter < 1)
        throw std::invalid_argument("fused_lasso: invalid solver options");
    validate_edges(n, problem.edges);
    const std::size_t E = problem.edges.size();
    const double fuse_tol = default_fuse_tol(problem.xi);

    FusionResult res;
    if (problem.rho == 0.0 || E == 0) {
        res.beta = problem.xi;
        res.dual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(E));
        res.mu_final = opts.mu0;
        std::tie(res.component, res.n_components) = fused_components(res.beta, problem.edges, fuse_tol);
        return res;
    }

    // Graph Laplacian L = D'D (sparse), system matrix 2I + mu L.
    Eigen::SparseMatrix<double> Lap(n, n);
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(4 * E + static_cast<std::size_t>(n));
        for (const auto& [a, b] : problem.edges) {
            trip.emplace_back(a, a, 1.0);
            trip.emplace_back(b, b, 1.0);
            trip.emplace_back(a, b, -1.0);
            trip.emplace_back(b, a, -1.0);
        }
        Lap.setFromTriplets(trip.begin(), trip.end());
    }
    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();

    double mu = opts.mu0;
    Eigen::SparseMatrix<double> sys = 2.0 * I + mu * Lap;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol;
    chol.analyzePattern(sys);
    chol.factorize(sys);
    if (chol.info() != Eigen::Success) throw numerical_error("fused_lasso: factorization failed");

    const double rho = problem.rho;
    Eigen::VectorXd beta = warm ? warm->beta : problem.xi;
    Eigen::VectorXd u = apply_D(problem.edges, beta);
    Eigen::VectorXd w = warm ? Eigen::VectorXd(warm->dual * (rho / mu))
                             : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(E));

    double rprim = 0.0, rdual = 0.0;
    int it = 0;
    bool converged = false;
    for (it = 1; it <= opts.max_iter; ++it) {
        // beta step: (2I + mu D'D) beta = 2 xi + mu D'(u - w)
        const Eigen::VectorXd rhs = 2.0 * problem.xi + mu * apply_Dt(problem.edges, n, u - w);
        beta = chol.solve(rhs);
        // u step: soft threshold
        const Eigen::VectorXd Db = apply_D(problem.edges, beta);
        const Eigen::VectorXd t = Db + w;
        const double thr = rho / mu;
        Eigen::VectorXd u_new(t.size());
        for (Eigen::Index e = 0; e < t.size(); ++e) {
            const double v = t[e];
            u_new[e] = (v > thr) ? v - thr : (v < -thr ? v + thr : 0.0);
        }
        // scaled dual step
        w += Db - u_new;
        rprim = (Db - u_new).lpNorm<Eigen::Infinity>();
        rdual = mu * apply_Dt(problem.edges, n, u_new - u).lpNorm<Eigen::Infinity>();
        u = std::move(u_new);
        if (rprim <= opts.tol && rdual <= opts.tol) {
            converged = true;
            break;
        }
        // Residual balancing keeps the two residuals within a decade of each
        // other; w is rescaled because it is the dual scaled by 1/mu.
        if (it % 10 == 0) {
            if (rprim > 10.0 * rdual && mu < 1e8) {
                mu *= 2.0;
                w *= 0.5;
            } else if (rdual > 10.0 * rprim && mu > 1e-8) {
                mu *= 0.5;
                w *= 2.0;
            } else {
                continue;
            }
            sys = 2.0 * I + mu * Lap;
            chol.factorize(sys);
            if (chol.info() != Eigen::Success) throw numerical_error("fused_lasso: refactorization failed");
        }
    }
    if (!converged)
        throw convergence_error("fused_lasso: ADMM hit the iteration cap (" + std::to_string(opts.max_iter) +
                                "); primal residual " + std::to_string(rprim) + ", dual residual " +
                                std::to_string(rdual) + ", tol " + std::to_string(opts.tol));

    res.beta = beta;
    res.dual.resize(static_cast<Eigen::Index>(E));
    for (Eigen::Index e = 0; e < res.dual.size(); ++e)
        res.dual[e] = std::clamp(mu * w[e] / rho, -1.0, 1.0);
    res.iterations = it;
    res.primal_residual = rprim;
    res.dual_residual = rdual;
    res.mu_final = mu;
    std::tie(res.component, res.n_components) = fused_components(beta, problem.edges, fuse_tol);
    return res;
}

double default_fuse_tol(const Eigen::VectorXd& xi) {
    if (xi.size() == 0) return 0.0;
    return 1e-6 * (xi.maxCoeff() - xi.minCoeff());
}

std::pair<std::vector<int>, int> fused_components(const Eigen::VectorXd& beta,
                                                  std::span<const std::pair<int, int>> edges,
                                                  double fuse_tol) {
    const std::size_t n = static_cast<std::size_t>(beta.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : edges) {
        if (std::abs(beta[a] - beta[b]) <= fuse_tol) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
    }
    std::vector<int> label(n, -1);
    int next = 0;
    std::vector<int> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != -1) continue;
        label[i] = next;
        stack.assign(1, static_cast<int>(i));
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int nb : adj[static_cast<std::size_t>(v)]) {
                if (label[static_cast<std::size_t>(nb)] == -1) {
                    label[static_cast<std::size_t>(nb)] = next;
                    stack.push_back(nb);
                }
            }
        }
        ++next;
    }
    return {std::move(label), next};
}

namespace {

// Full fusion means: within every connected component of the *graph*, beta
// is constant (within fuse_tol).
bool fully_fused(const Eigen::VectorXd& beta, std::span<const std::pair<int, int>> edges, double fuse_tol) {
    const int graph_comps = fused_components(Eigen::VectorXd::Zero(beta.size()), edges, 1.0).second;
    const int fused_comps = fused_components(beta, edges, fuse_tol).second;
    return fused_comps == graph_comps;
}

} // namespace

double full_fusion_rho(const Eigen::VectorXd& xi, std::span<const std::pair<int, int>> edges,
                       const AdmmOptions& opts) {
    if (xi.size() == 0) throw std::invalid_argument("full_fusion_rho: empty field");
    const double fuse_tol = default_fuse_tol(xi);
    FusionProblem prob{xi, {edges.begin(), edges.end()}, 0.0};

    FusionResult at_zero = fused_lasso(prob, opts);
    if (fully_fused(at_zero.beta, edges, fuse_tol)) return 0.0;

    // Sum of absolute deviations bounds the full-fusion rho for connected
    // graphs; double from there if needed (disconnected cases).
    double hi = 2.0 * (xi.array() - xi.mean()).abs().sum();
    if (hi <= 0.0) hi = 1.0;
    FusionResult warm = at_zero;
    auto fused_at = [&](double rho, const FusionResult* w0) {
        prob.rho = rho;
        warm = fused_lasso(prob, opts, w0);
        return fully_fused(warm.beta, edges, fuse_tol);
    };
    int guard = 0;
    while (!fused_at(hi, &warm)) {
        hi *= 2.0;
        if (++guard > 60) throw convergence_error("full_fusion_rho: no fusing rho found");
    }
    double lo = 0.0;
    while (hi - lo > 0.01 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (fused_at(mid, &warm))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::vector<double> rho_grid(double rho_max, int count) {
    if (!(rho_max > 0.0)) throw std::invalid_argument("rho_grid: rho_max must be positive");
    if (count < 2) throw std::invalid_argument("rho_grid: need at least two grid points");
    std::vector<double> g(static_cast<std::size_t>(count));
    const double lo = std::log(1e-3 * rho_max), hi = std::log(rho_max);
    for (int i = 0; i < count; ++i)
        g[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (count - 1));
    return g;
}

std::vector<PathEntry> fusion_path(const Eigen::VectorXd& xi, std::span<const std::pair<int, int>> edges,
                                   const AdmmOptions& opts, int count) {
    std::vector<PathEntry> path;
    const double rmax = full_fusion_rho(xi, edges, opts);
    if (rmax == 0.0) {
        FusionProblem prob{xi, {edges.begin(), edges.end()}, 0.0};
        path.push_back({0.0, fused_lasso(prob, opts)});
        return path;
    }
    FusionProblem prob{xi, {edges.begin(), edges.end()}, 0.0};
    const FusionResult* warm = nullptr;
    for (double rho : rho_grid(rmax, count)) {
        prob.rho = rho;
        PathEntry entry;
        entry.rho = rho;
        entry.result = fused_lasso(prob, opts, warm);
        path.push_back(std::move(entry));
        warm = &path.back().result;
    }
    return path;
}

} // namespace spatseg
