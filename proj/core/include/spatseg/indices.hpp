#pragma once

#include "spatseg/geometry.hpp"
#include "spatseg/types.hpp"

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

namespace spatseg {

// Constants of the half-power moment expansion used by the local index:
//   C1 = 2^(1/2) pi^(-1/2) Gamma(3/4) (tau^2)^(1/4)
//   C2 = 2^(-3/2) pi^(-1/2) Gamma(3/4) (tau^2)^(-3/4)
//   C3 = 2 (pi^(-1/2) - pi^(-1) Gamma(3/4)^2) / C2
// Identity: C1 = 4 tau^2 C2. With tau2 == 0, C1 = 0 and C2, C3 are +inf;
// the index then remains valid up to a multiplicative constant.
struct IndexConstants {
    double tau2 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
};

IndexConstants index_constants(double tau2);

// Local spatial-dependence index per active site:
//   xi_i = sum_j w_ij (|z_j - z_i|^(1/2) - C1) / d_ij / sum_j w_ij,  w_ij = d_ij^2
//        = sum_j d_ij (|z_j - z_i|^(1/2) - C1) / sum_j d_ij^2.
// Default normalization is the weighted mean above; `literal_eq7` divides
// additionally by |N_i| (the printed form), kept for reproduction purposes.
// Under the smooth-field expansion E(xi_i) ~ C2 sigma_i^2 / alpha_i, so the
// field tracks the local variance-to-range ratio.
struct LocalIndexField {
    std::vector<int> active;      // original site indices, ascending
    Eigen::VectorXd xi;           // aligned with `active`
    std::vector<int> n_neighbors; // aligned with `active`
    IndexConstants consts;
};

LocalIndexField local_indices(const SpatialDataset& data, const NeighborGraph& graph,
                              const IndexConstants& consts, bool literal_eq7 = false);

// Cressie-Hawkins robust semivariogram estimate for one lag class:
//   gamma_hat = (m^(-1) sum |z_i - z_j|^(1/2))^4 / (2 (0.457 + 0.494/m + 0.045/m^2)).
struct LagClassEstimate {
    double gamma_hat = 0.0;
    double d_mean = 0.0; // mean pair distance in the class
    std::size_t m = 0;   // number of pairs
    double d_lo = 0.0;   // class bounds (d_lo, d_hi]
    double d_hi = 0.0;
};

LagClassEstimate robust_variogram(std::span<const std::pair<int, int>> pairs, const SpatialDataset& data);

// Nugget estimate from the two nearest lag classes (m_target pairs each):
//   tau2_hat = max(0, gamma1 - d1 * max(0, (gamma2 - gamma1) / (d2 - d1))),
// i.e. a line through the first two robust variogram points, extrapolated to
// distance zero, clamped to be non-negative.
struct NuggetEstimate {
    double tau2 = 0.0;
    LagClassEstimate lag1, lag2;
};

NuggetEstimate estimate_nugget(const SpatialDataset& data, std::size_t m_target = 250);

} // namespace spatseg
