#pragma once

#include "spatseg/covariance.hpp"
#include "spatseg/types.hpp"

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <variant>

namespace spatseg {

enum class Design { uniform, clustered };

// Stationary Matern field y ~ N(0, sigma2 R(alpha, nu)).
struct StationaryScenario {
    MaternParams matern{1.0, 1.0, 0.5};
};

// Smoothly nonstationary field with the locally anisotropic Matern-type
// correlation; larger lambda is closer to stationary.
struct NonstatScenario {
    double lambda = 20.0;
};

// Four mutually independent stationary Matern blocks on the quadrants of D,
// alphas assigned row-major from the lower-left quadrant.
struct FourBlockScenario {
    std::array<double, 4> alpha{1.0, 1.0 / 3.0, 0.5, 2.0 / 3.0};
    double sigma2 = 1.0;
    double nu = 0.5;
};

// Two-region blended process (weights decay away from each region at rate a).
struct BlendedScenario {
    BlendedParams params;
};

using ScenarioFamily = std::variant<StationaryScenario, NonstatScenario, FourBlockScenario, BlendedScenario>;

struct Scenario {
    Rect domain{0.0, 0.0, 1.0, 1.0};
    Design design = Design::uniform;
    std::size_t n = 100;
    ScenarioFamily family = StationaryScenario{};
    double tau2 = 0.0;
    std::uint64_t seed = 1;
};

// BlendedParams whose regions are the left and right halves of D.
BlendedParams make_blended_params(const Rect& domain, double alpha1, double alpha2, double a);

// Uniform: i.i.d. uniform on D. Clustered: 50/50 mixture of two isotropic
// Gaussian clumps centered at D.center -+ (width/4, height/4) with
// sd = sqrt(|D|)/8, truncated to D by rejection. Deterministic per seed.
SiteSet sample_locations(Design design, std::size_t n, const Rect& domain, std::uint64_t seed);

// Draws y ~ N(0, Sigma_scenario) by dense Cholesky at the given sites and
// adds i.i.d. N(0, tau2) noise. Dense simulation is capped at n = 5000
// (std::invalid_argument above). Reproducible given scenario.seed.
Eigen::VectorXd simulate_field(const Scenario& scenario, const SiteSet& sites);

// sample_locations + simulate_field; the scenario's tau2 is recorded on the
// dataset as the known nugget.
SpatialDataset simulate_dataset(const Scenario& scenario);

} // namespace spatseg
