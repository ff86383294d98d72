#include "spatseg/indices.hpp"

#include "spatseg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spatseg {

IndexConstants index_constants(double tau2) {
    if (!(tau2 >= 0.0) || !std::isfinite(tau2))
        throw std::invalid_argument("index_constants: tau2 must be finite and non-negative");
    const double g34 = std::tgamma(0.75);
    const double rpi = 1.0 / std::sqrt(std::numbers::pi);
    IndexConstants c;
    c.tau2 = tau2;
    if (tau2 == 0.0) {
        c.C1 = 0.0;
        c.C2 = std::numeric_limits<double>::infinity();
        c.C3 = 0.0; // C3 = 2(pi^-1/2 - pi^-1 g34^2)/C2 -> 0 as C2 -> inf
        return c;
    }
    c.C1 = std::numbers::sqrt2 * rpi * g34 * std::pow(tau2, 0.25);
    c.C2 = std::pow(2.0, -1.5) * rpi * g34 * std::pow(tau2, -0.75);
    c.C3 = 2.0 * (rpi - g34 * g34 / std::numbers::pi) / c.C2;
    return c;
}

LocalIndexField local_indices(const SpatialDataset& data, const NeighborGraph& graph,
                              const IndexConstants& consts, bool literal_eq7) {
    if (graph.size() != data.sites.size())
        throw std::invalid_argument("local_indices: graph and dataset sizes differ");
    if (graph.active.empty())
        throw degenerate_geometry("local_indices: no site has a neighbor within the radius");
    LocalIndexField f;
    f.consts = consts;
    f.active = graph.active;
    f.xi.resize(static_cast<Eigen::Index>(f.active.size()));
    f.n_neighbors.resize(f.active.size());
    for (std::size_t a = 0; a < f.active.size(); ++a) {
        const int i = f.active[a];
        const auto& nbr = graph.neighbors[static_cast<std::size_t>(i)];
        const auto& dist = graph.dist[static_cast<std::size_t>(i)];
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < nbr.size(); ++k) {
            const double d = dist[k];
            const double root = std::sqrt(std::abs(data.z[nbr[k]] - data.z[i]));
            num += d * (root - consts.C1);
            den += d * d;
        }
        if (literal_eq7) den *= static_cast<double>(nbr.size());
        f.xi[static_cast<Eigen::Index>(a)] = num / den;
        f.n_neighbors[a] = static_cast<int>(nbr.size());
    }
    return f;
}

LagClassEstimate robust_variogram(std::span<const std::pair<int, int>> pairs, const SpatialDataset& data) {
    if (pairs.empty()) throw std::invalid_argument("robust_variogram: empty pair list");
    const double m = static_cast<double>(pairs.size());
    double root_sum = 0.0, d_sum = 0.0;
    double d_lo = std::numeric_limits<double>::infinity(), d_hi = 0.0;
    const int n = static_cast<int>(data.sites.size());
    for (const auto& [i, j] : pairs) {
        if (i < 0 || j < 0 || i >= n || j >= n || i == j)
            throw std::invalid_argument("robust_variogram: invalid site pair (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ")");
        const double d = distance(data.sites[static_cast<std::size_t>(i)], data.sites[static_cast<std::size_t>(j)]);
        root_sum += std::sqrt(std::abs(data.z[i] - data.z[j]));
        d_sum += d;
        d_lo = std::min(d_lo, d);
        d_hi = std::max(d_hi, d);
    }
    LagClassEstimate e;
    e.m = pairs.size();
    e.d_mean = d_sum / m;
    e.d_lo = d_lo;
    e.d_hi = d_hi;
    const double mean_root = root_sum / m;
    const double bias = 2.0 * (0.457 + 0.494 / m + 0.045 / (m * m));
    e.gamma_hat = std::pow(mean_root, 4) / bias;
    return e;
}

NuggetEstimate estimate_nugget(const SpatialDataset& data, std::size_t m_target) {
    const std::size_t n = data.sites.size();
    if (m_target == 0) throw std::invalid_argument("estimate_nugget: m_target must be positive");
    const std::size_t total_pairs = n * (n - 1) / 2;
    if (total_pairs < 2 * m_target)
        throw std::invalid_argument("estimate_nugget: need at least " + std::to_string(2 * m_target) +
                                    " site pairs, have " + std::to_string(total_pairs));

    // The 2 m_target nearest pairs, deterministically ordered by (distance, i, j).
    struct PairRec {
        double d;
        int i, j;
    };
    std::vector<PairRec> recs;
    recs.reserve(total_pairs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            recs.push_back({distance(data.sites[i], data.sites[j]), static_cast<int>(i), static_cast<int>(j)});
    const auto cmp = [](const PairRec& a, const PairRec& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    };
    std::nth_element(recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(2 * m_target) - 1, recs.end(), cmp);
    std::sort(recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(2 * m_target), cmp);

    std::vector<std::pair<int, int>> p1, p2;
    p1.reserve(m_target);
    p2.reserve(m_target);
    for (std::size_t k = 0; k < m_target; ++k) p1.emplace_back(recs[k].i, recs[k].j);
    for (std::size_t k = m_target; k < 2 * m_target; ++k) p2.emplace_back(recs[k].i, recs[k].j);

    NuggetEstimate est;
    est.lag1 = robust_variogram(p1, data);
    est.lag2 = robust_variogram(p2, data);
    // Order statistics d*_1, d*_2 bound the classes: (0, d*_1] and (d*_1, d*_2].
    est.lag1.d_lo = 0.0;
    est.lag1.d_hi = recs[m_target - 1].d;
    est.lag2.d_lo = recs[m_target - 1].d;
    est.lag2.d_hi = recs[2 * m_target - 1].d;

    const double d1 = est.lag1.d_mean, d2 = est.lag2.d_mean;
    if (!(d2 > d1))
        throw degenerate_geometry("estimate_nugget: lag classes have non-increasing mean distances (d1 = " +
                                  std::to_string(d1) + ", d2 = " + std::to_string(d2) + ")");
    const double slope = std::max(0.0, (est.lag2.gamma_hat - est.lag1.gamma_hat) / (d2 - d1));
    est.tau2 = std::max(0.0, est.lag1.gamma_hat - d1 * slope);
    return est;
}

} // namespace spatseg
