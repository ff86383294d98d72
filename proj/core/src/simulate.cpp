#include "spatseg/simulate.hpp"

#include "spatseg/errors.hpp"
#include "spatseg/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spatseg {

namespace {

constexpr std::size_t kDenseCap = 5000;

// Substream indices: 0 sampling, 1..4 field blocks, 9 measurement noise.
constexpr std::uint64_t kStreamLocations = 0;
constexpr std::uint64_t kStreamField = 1;
constexpr std::uint64_t kStreamNoise = 9;

Eigen::VectorXd chol_draw(const Eigen::MatrixXd& sigma, GaussianStream& g) {
    const JitteredLLT f = jittered_llt(sigma);
    return Eigen::MatrixXd(f.llt.matrixL()) * g.vector(sigma.rows());
}

} // namespace

BlendedParams make_blended_params(const Rect& domain, double alpha1, double alpha2, double a) {
    BlendedParams p;
    p.alpha1 = alpha1;
    p.alpha2 = alpha2;
    p.a = a;
    const double xm = 0.5 * (domain.xmin + domain.xmax);
    p.region1 = Rect{domain.xmin, domain.ymin, xm, domain.ymax};
    p.region2 = Rect{xm, domain.ymin, domain.xmax, domain.ymax};
    return p;
}

SiteSet sample_locations(Design design, std::size_t n, const Rect& domain, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_locations: n must be at least 1");
    if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
        throw std::invalid_argument("sample_locations: degenerate domain");
    auto rng = substream(seed, kStreamLocations);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Point> pts;
    pts.reserve(n);
    if (design == Design::uniform) {
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({domain.xmin + domain.width() * unif(rng),
                           domain.ymin + domain.height() * unif(rng)});
    } else {
        const Point c = domain.center();
        const double ox = 0.25 * domain.width(), oy = 0.25 * domain.height();
        const Point c1{c.x - ox, c.y - oy}, c2{c.x + ox, c.y + oy};
        const double sd = std::sqrt(domain.area()) / 8.0;
        for (std::size_t i = 0; i < n; ++i) {
            Point p;
            do { // truncate the mixture to D by rejection
                const Point ck = unif(rng) < 0.5 ? c1 : c2;
                p = {ck.x + sd * gauss(rng), ck.y + sd * gauss(rng)};
            } while (!domain.contains(p));
            pts.push_back(p);
        }
    }
    return SiteSet(std::move(pts), domain);
}

Eigen::VectorXd simulate_field(const Scenario& scenario, const SiteSet& sites) {
    const std::size_t n = sites.size();
    if (n > kDenseCap)
        throw std::invalid_argument("simulate_field: dense Cholesky simulation is capped at n = " +
                                    std::to_string(kDenseCap) + " (got " + std::to_string(n) + ")");
    if (!(scenario.tau2 >= 0.0))
        throw std::invalid_argument("simulate_field: tau2 must be non-negative");

    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (const auto* st = std::get_if<StationaryScenario>(&scenario.family)) {
        const CovarianceModel model(st->matern, 0.0);
        auto rng = substream(scenario.seed, kStreamField);
        GaussianStream g(rng);
        y = chol_draw(build_cov_matrix(sites.points(), model), g);
    } else if (const auto* ns = std::get_if<NonstatScenario>(&scenario.family)) {
        const CovarianceModel model(NonstatMaternParams{ns->lambda}, 0.0);
        auto rng = substream(scenario.seed, kStreamField);
        GaussianStream g(rng);
        y = chol_draw(build_cov_matrix(sites.points(), model), g);
    } else if (const auto* bl = std::get_if<BlendedScenario>(&scenario.family)) {
        const CovarianceModel model(bl->params, 0.0);
        auto rng = substream(scenario.seed, kStreamField);
        GaussianStream g(rng);
        y = chol_draw(build_cov_matrix(sites.points(), model), g);
    } else {
        const auto& fb = std::get<FourBlockScenario>(scenario.family);
        const Point c = scenario.domain.center();
        for (int b = 0; b < 4; ++b) {
            const int bx = b % 2, by = b / 2;
            std::vector<int> members;
            std::vector<Point> pts;
            for (std::size_t i = 0; i < n; ++i) {
                const Point s = sites[i];
                if ((s.x >= c.x) == (bx == 1) && (s.y >= c.y) == (by == 1)) {
                    members.push_back(static_cast<int>(i));
                    pts.push_back(s);
                }
            }
            if (members.empty()) continue;
            const CovarianceModel model(MaternParams{fb.sigma2, fb.alpha[static_cast<std::size_t>(b)], fb.nu},
                                        0.0);
            auto rng = substream(scenario.seed, kStreamField + static_cast<std::uint64_t>(b));
            GaussianStream g(rng);
            const Eigen::VectorXd yb = chol_draw(build_cov_matrix(pts, model), g);
            for (std::size_t i = 0; i < members.size(); ++i)
                y[members[i]] = yb[static_cast<Eigen::Index>(i)];
        }
    }

    if (scenario.tau2 > 0.0) {
        auto rng = substream(scenario.seed, kStreamNoise);
        GaussianStream g(rng);
        y += std::sqrt(scenario.tau2) * g.vector(static_cast<Eigen::Index>(n));
    }
    return y;
}

SpatialDataset simulate_dataset(const Scenario& scenario) {
    SiteSet sites = sample_locations(scenario.design, scenario.n, scenario.domain, scenario.seed);
    Eigen::VectorXd z = simulate_field(scenario, sites);
    return SpatialDataset{std::move(sites), std::move(z), scenario.tau2};
}

} // namespace spatseg
