#include <doctest.h>

#include "helpers.hpp"

#include <spatseg/covariance.hpp>
#include <spatseg/geometry.hpp>
#include <spatseg/indices.hpp>
#include <spatseg/simulate.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace spatseg;

namespace {

// E |N(0, v)|^(1/2) = v^(1/4) 2^(1/4) Gamma(3/4) / sqrt(pi).
constexpr double kGamma34 = 1.2254167024651776;

double expected_half_moment(double v) {
    return std::pow(v, 0.25) * std::pow(2.0, 0.25) * kGamma34 / std::sqrt(std::numbers::pi);
}

// Exact E(xi_i) from the Gaussian model: increments z_i - z_j are normal with
// variance 2 (sigma2 + tau2) - 2 C(d_ij), so every term of the index has a
// closed-form mean.
double exact_mean_index(const SiteSet&, const NeighborGraph& g, const MaternParams& mp,
                        double tau2, const IndexConstants& consts) {
    double acc = 0.0;
    int cnt = 0;
    for (int i : g.active) {
        const auto& nb = g.neighbors[static_cast<std::size_t>(i)];
        const auto& dist = g.dist[static_cast<std::size_t>(i)];
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const double d = dist[k];
            const double v = 2.0 * (mp.sigma2 + tau2) - 2.0 * matern_cov(d, mp);
            num += d * (expected_half_moment(v) - consts.C1);
            den += d * d;
        }
        acc += num / den;
        ++cnt;
    }
    return acc / cnt;
}

} // namespace

TEST_SUITE("indices") {

TEST_CASE("index constants reference values") {
    const auto c = index_constants(1.0);
    CHECK(c.C1 == doctest::Approx(0.977741067446924).epsilon(1e-12));
    CHECK(c.C2 == doctest::Approx(0.244435266861731).epsilon(1e-12));
    CHECK(c.C3 == doctest::Approx(0.705305639144062).epsilon(1e-12));
    // scaling in tau2
    const auto s = index_constants(0.04);
    CHECK(s.C1 == doctest::Approx(0.977741067446924 * std::pow(0.04, 0.25)).epsilon(1e-12));
    CHECK(s.C2 == doctest::Approx(0.244435266861731 * std::pow(0.04, -0.75)).epsilon(1e-12));
    CHECK(s.C3 == doctest::Approx(0.705305639144062 * std::pow(0.04, 0.75)).epsilon(1e-12));
}

TEST_CASE("identity C1 = 4 tau2 C2") {
    for (double t2 : {0.3, 1.0, 2.7}) {
        const auto c = index_constants(t2);
        CHECK(c.C1 == doctest::Approx(4.0 * t2 * c.C2).epsilon(1e-13));
    }
}

TEST_CASE("zero nugget limits") {
    const auto c = index_constants(0.0);
    CHECK(c.C1 == 0.0);
    CHECK(c.C3 == 0.0);
    CHECK(std::isinf(c.C2));
    CHECK_THROWS_AS(index_constants(-0.1), std::invalid_argument);
}

TEST_CASE("local index hand-computed values") {
    const SiteSet sites({{0, 0}, {1, 0}, {2, 0}, {9, 0}}, Rect{0, 0, 10, 1});
    Eigen::VectorXd z(4);
    z << 0.0, 1.0, 4.0, 7.0;
    const auto graph = build_neighbor_graph(sites, 1.0);
    SpatialDataset data{sites, z, 0.0};

    const auto f = local_indices(data, graph, index_constants(0.0));
    REQUIRE(f.active == std::vector<int>{0, 1, 2});
    CHECK(f.n_neighbors == std::vector<int>{1, 2, 1});
    CHECK(f.xi[0] == doctest::Approx(1.0).epsilon(1e-14));                          // |1-0|^(1/2)
    CHECK(f.xi[1] == doctest::Approx((1.0 + std::sqrt(3.0)) / 2.0).epsilon(1e-14)); // mean of 1, 3^(1/2)
    CHECK(f.xi[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    // literal normalization divides by the neighbour count again
    const auto lit = local_indices(data, graph, index_constants(0.0), true);
    CHECK(lit.xi[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lit.xi[1] == doctest::Approx((1.0 + std::sqrt(3.0)) / 4.0).epsilon(1e-14));

    // nonzero nugget shifts every half-moment by C1
    const auto c = index_constants(0.04);
    const auto f2 = local_indices(data, graph, c);
    CHECK(f2.xi[1] == doctest::Approx(((1.0 - c.C1) + (std::sqrt(3.0) - c.C1)) / 2.0).epsilon(1e-13));
}

TEST_CASE("mean index matches its exact Gaussian expectation") {
    // 20 simulated fields on a fixed design; the Monte-Carlo mean of xi-bar
    // must sit within 10% of the closed-form expectation.
    Scenario sc;
    sc.domain = Rect{-2.5, -2.5, 2.5, 2.5};
    sc.n = 400;
    sc.family = StationaryScenario{MaternParams{1.0, 2.0 / 3.0, 0.5}};
    sc.tau2 = 0.01;
    sc.seed = 77;
    const SiteSet sites = sample_locations(Design::uniform, sc.n, sc.domain, sc.seed);
    const auto graph = build_neighbor_graph(sites, recommended_radius(sc.domain.area(), sc.n));
    const auto consts = index_constants(sc.tau2);

    const double exact = exact_mean_index(sites, graph, MaternParams{1.0, 2.0 / 3.0, 0.5}, sc.tau2, consts);
    double mc = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
        Scenario s = sc;
        s.seed = 1000 + static_cast<std::uint64_t>(r);
        const Eigen::VectorXd z = simulate_field(s, sites);
        const auto f = local_indices({sites, z, sc.tau2}, graph, consts);
        mc += f.xi.mean();
    }
    mc /= reps;
    CHECK(mc == doctest::Approx(exact).epsilon(0.10));
}

TEST_CASE("expansion tracks C2 sigma2 / alpha at a large nugget") {
    // With tau2 = 1 the half-moment linearization is accurate; the exact mean
    // index must match C2 sigma2 / alpha within 25% on a dense design.
    const Rect dom{-2.5, -2.5, 2.5, 2.5};
    const SiteSet sites = sample_locations(Design::uniform, 1000, dom, 5);
    const auto graph = build_neighbor_graph(sites, recommended_radius(dom.area(), 1000));
    const MaternParams mp{1.0, 2.0 / 3.0, 0.5};
    const auto consts = index_constants(1.0);
    const double exact = exact_mean_index(sites, graph, mp, 1.0, consts);
    const double approx = consts.C2 * mp.sigma2 / mp.alpha;
    CHECK(exact == doctest::Approx(approx).epsilon(0.25));
}

TEST_CASE("mean index grows with the variance-to-range ratio") {
    const Rect dom{-2.5, -2.5, 2.5, 2.5};
    const SiteSet sites = sample_locations(Design::uniform, 300, dom, 9);
    const auto graph = build_neighbor_graph(sites, recommended_radius(dom.area(), 300));
    Scenario lo;
    lo.domain = dom;
    lo.family = StationaryScenario{MaternParams{1.0, 1.0, 0.5}};
    lo.seed = 3;
    const Eigen::VectorXd z = simulate_field(lo, sites);
    const auto consts = index_constants(0.0);
    const auto f1 = local_indices({sites, z, 0.0}, graph, consts);
    // doubling z quadruples sigma2; xi scales by 2^(1/2)
    const auto f2 = local_indices({sites, Eigen::VectorXd(2.0 * z), 0.0}, graph, consts);
    CHECK(f2.xi.mean() == doctest::Approx(std::sqrt(2.0) * f1.xi.mean()).epsilon(1e-12));
    CHECK(f2.xi.mean() > f1.xi.mean());
}

TEST_CASE("robust variogram reference values") {
    // one pair with |dz| = 1
    {
        const SiteSet s({{0, 0}, {1, 0}}, Rect{0, 0, 1, 1});
        Eigen::VectorXd z(2);
        z << 0.0, 1.0;
        const std::vector<std::pair<int, int>> pairs{{0, 1}};
        const auto est = robust_variogram(pairs, {s, z, std::nullopt});
        CHECK(est.gamma_hat == doctest::Approx(0.50200803212851406).epsilon(1e-13));
        CHECK(est.m == 1);
        CHECK(est.d_mean == doctest::Approx(1.0));
    }
    // 250 pairs, every |dz| = 1: the bias denominator at m = 250
    {
        std::vector<Point> pts;
        Eigen::VectorXd z(251);
        for (int i = 0; i < 251; ++i) {
            pts.push_back({0.01 * i, 0.0});
            z[i] = i % 2;
        }
        const SiteSet s(pts, Rect{-1, -1, 4, 1});
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < 250; ++i) pairs.emplace_back(i, i + 1);
        const auto est = robust_variogram(pairs, {s, z, std::nullopt});
        CHECK(est.gamma_hat == doctest::Approx(1.0893798709442170).epsilon(1e-13));
        CHECK(est.m == 250);
    }
}

TEST_CASE("nugget estimate small cases") {
    const SiteSet s({{0, 0}, {1, 0}, {3, 0}}, Rect{0, 0, 4, 1});
    Eigen::VectorXd z(3);
    z << 0.0, 1.0, 0.0;
    const SpatialDataset data{s, z, std::nullopt};
    // classes: {pair (0,1), d=1, |dz|=1} and {pair (1,2), d=2, |dz|=1}; the
    // fitted line is flat, so the intercept equals gamma_1.
    const auto est = estimate_nugget(data, 1);
    CHECK(est.tau2 == doctest::Approx(0.50200803212851406).epsilon(1e-13));
    CHECK(est.lag1.d_mean == doctest::Approx(1.0));
    CHECK(est.lag2.d_mean == doctest::Approx(2.0));
    CHECK(est.lag1.d_hi == doctest::Approx(1.0));
    CHECK(est.lag2.d_hi == doctest::Approx(2.0));
    // not enough pairs for two classes of 2
    CHECK_THROWS_AS(estimate_nugget(data, 2), std::invalid_argument);
}

TEST_CASE("nugget estimate recovers a pure-noise variance") {
    // z is i.i.d. N(0, tau2): the variogram is flat at tau2, so the
    // extrapolated intercept must land near tau2.
    const Rect dom{0, 0, 1, 1};
    const SiteSet sites = sample_locations(Design::uniform, 400, dom, 21);
    std::mt19937_64 eng(99);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.64));
    Eigen::VectorXd z(400);
    for (int i = 0; i < 400; ++i) z[i] = nd(eng);
    const auto est = estimate_nugget({sites, z, std::nullopt}, 250);
    CHECK(est.tau2 == doctest::Approx(0.64).epsilon(0.20));
    // scale equivariance: scaling z by c scales the estimate by c^2
    const auto est2 = estimate_nugget({sites, Eigen::VectorXd(2.0 * z), std::nullopt}, 250);
    CHECK(est2.tau2 == doctest::Approx(4.0 * est.tau2).epsilon(1e-12));
}

TEST_CASE("nugget estimate shrinks toward zero without noise") {
    // A smooth (noise-free) field has a variogram vanishing at the origin;
    // the estimate must come out far below the marginal variance.
    Scenario sc;
    sc.domain = Rect{0, 0, 1, 1};
    sc.n = 300;
    sc.family = StationaryScenario{MaternParams{1.0, 0.5, 1.5}};
    sc.seed = 4;
    const auto data = simulate_dataset(sc);
    const auto est = estimate_nugget({data.sites, data.z, std::nullopt}, 250);
    CHECK(est.tau2 < 0.05);
}

} // TEST_SUITE
