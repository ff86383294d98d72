#include <doctest.h>

#include "helpers.hpp"

#include <spatseg/errors.hpp>
#include <spatseg/fused_lasso.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace spatseg;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

std::vector<std::pair<int, int>> chain_edges(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return e;
}

std::vector<std::pair<int, int>> grid_edges(int nx, int ny) {
    std::vector<std::pair<int, int>> e;
    auto id = [nx](int x, int y) { return y * nx + x; };
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            if (x + 1 < nx) e.emplace_back(id(x, y), id(x + 1, y));
            if (y + 1 < ny) e.emplace_back(id(x, y), id(x, y + 1));
        }
    return e;
}

} // namespace

TEST_SUITE("fusedlasso") {

TEST_CASE("closed-form small problems") {
    AdmmOptions tight;
    tight.tol = 1e-11;
    // pair, not fused: {0, 4}, rho = 1 -> {1/2, 7/2}
    {
        const auto r = fused_lasso({vec({0, 4}), {{0, 1}}, 1.0});
        CHECK(r.beta[0] == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(r.beta[1] == doctest::Approx(3.5).epsilon(1e-7));
        CHECK(r.n_components == 2);
        // The edge difference is beta_first - beta_second, so the active edge
        // sits at the lower bound of the subgradient interval.
        CHECK(r.dual[0] == doctest::Approx(-1.0).epsilon(1e-6));
    }
    // pair, fused: {0, 1}, rho = 2 -> both 1/2, interior subgradient -1/2
    {
        const auto r = fused_lasso({vec({0, 1}), {{0, 1}}, 2.0}, tight);
        CHECK(r.beta[0] == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(r.beta[1] == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(r.n_components == 1);
        CHECK(r.dual[0] == doctest::Approx(-0.5).epsilon(1e-6));
    }
    // chain of three: {0, 3, 1}, rho = 1 -> {1/2, 2, 3/2}
    {
        const auto r = fused_lasso({vec({0, 3, 1}), chain_edges(3), 1.0});
        CHECK(r.beta[0] == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(r.beta[1] == doctest::Approx(2.0).epsilon(1e-7));
        CHECK(r.beta[2] == doctest::Approx(1.5).epsilon(1e-7));
    }
    // chain of three, fully fused: {0, 3, 1}, rho = 4 -> all 4/3
    {
        const auto r = fused_lasso({vec({0, 3, 1}), chain_edges(3), 4.0}, tight);
        for (int i = 0; i < 3; ++i) CHECK(r.beta[i] == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
        CHECK(r.n_components == 1);
    }
    // triangle: {0, 1, 5}, rho = 3/2 -> {5/4, 5/4, 7/2}
    {
        const auto r = fused_lasso({vec({0, 1, 5}), {{0, 1}, {1, 2}, {0, 2}}, 1.5}, tight);
        CHECK(r.beta[0] == doctest::Approx(1.25).epsilon(1e-7));
        CHECK(r.beta[1] == doctest::Approx(1.25).epsilon(1e-7));
        CHECK(r.beta[2] == doctest::Approx(3.5).epsilon(1e-7));
        CHECK(r.n_components == 2);
    }
}

TEST_CASE("rho = 0 or empty edges return the input") {
    const auto xi = vec({3, -1, 2});
    const auto a = fused_lasso({xi, chain_edges(3), 0.0});
    CHECK((a.beta - xi).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
    const auto b = fused_lasso({xi, {}, 5.0});
    CHECK((b.beta - xi).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
}

TEST_CASE("matches the exact chain solver") {
    std::mt19937_64 eng(2024);
    std::normal_distribution<double> nd;
    for (int n : {20, 80, 200}) {
        std::vector<double> y(static_cast<std::size_t>(n));
        Eigen::VectorXd xi(n);
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = nd(eng) + (i > n / 2 ? 1.5 : 0.0);
            xi[i] = y[static_cast<std::size_t>(i)];
        }
        for (double rho : {0.05, 0.4, 2.0, 12.0}) {
            CAPTURE(n);
            CAPTURE(rho);
            const auto r = fused_lasso({xi, chain_edges(n), rho});
            const auto exact = testutil::tv_chain_exact(y, rho);
            for (int i = 0; i < n; ++i) CHECK(r.beta[i] == doctest::Approx(exact[static_cast<std::size_t>(i)]).epsilon(5e-6));
        }
    }
}

TEST_CASE("optimality certificate on grid graphs") {
    std::mt19937_64 eng(7);
    std::normal_distribution<double> nd;
    const auto edges = grid_edges(6, 5);
    Eigen::VectorXd xi(30);
    for (int i = 0; i < 30; ++i) xi[i] = nd(eng) + (i % 6 >= 3 ? 2.0 : 0.0);
    for (double rho : {0.1, 0.8, 4.0}) {
        CAPTURE(rho);
        const auto r = fused_lasso({xi, edges, rho});
        // convexity: non-negative one-sided directional derivatives certify a
        // global minimum; fuse classification uses a tolerance above the
        // solver error so nearly-fused edges count as fused
        const double worst = testutil::fusion_certificate(r.beta, xi, rho, edges, 1e-5, 300);
        CHECK(worst > -5e-5);
        // reported duals are feasible subgradients
        CHECK(r.dual.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9);
        CHECK(r.primal_residual <= 1e-8);
        CHECK(r.dual_residual <= 1e-8);
    }
}

TEST_CASE("objective never exceeds obvious candidates") {
    std::mt19937_64 eng(13);
    std::normal_distribution<double> nd;
    const auto edges = grid_edges(5, 4);
    Eigen::VectorXd xi(20);
    for (int i = 0; i < 20; ++i) xi[i] = nd(eng);
    const double rho = 1.3;
    const auto r = fused_lasso({xi, edges, rho});
    const double fstar = testutil::fusion_objective(r.beta, xi, rho, edges);
    CHECK(fstar <= testutil::fusion_objective(xi, xi, rho, edges) + 1e-9);
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(20, xi.mean());
    CHECK(fstar <= testutil::fusion_objective(flat, xi, rho, edges) + 1e-9);
}

TEST_CASE("disconnected components solve independently") {
    // two separate pairs in one problem == two independent pair problems
    const auto joint = fused_lasso({vec({0, 4, 10, 11}), {{0, 1}, {2, 3}}, 1.0});
    const auto a = fused_lasso({vec({0, 4}), {{0, 1}}, 1.0});
    const auto b = fused_lasso({vec({10, 11}), {{0, 1}}, 1.0});
    CHECK(joint.beta[0] == doctest::Approx(a.beta[0]).epsilon(1e-8));
    CHECK(joint.beta[1] == doctest::Approx(a.beta[1]).epsilon(1e-8));
    CHECK(joint.beta[2] == doctest::Approx(b.beta[0]).epsilon(1e-8));
    CHECK(joint.beta[3] == doctest::Approx(b.beta[1]).epsilon(1e-8));
}

TEST_CASE("edge validation") {
    const auto xi = vec({1, 2, 3});
    CHECK_THROWS_AS(fused_lasso({xi, {{0, 3}}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fused_lasso({xi, {{-1, 0}}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fused_lasso({xi, {{1, 1}}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fused_lasso({xi, {{0, 1}, {1, 0}}, 1.0}), std::invalid_argument);
}

TEST_CASE("iteration cap raises convergence_error") {
    AdmmOptions o;
    o.max_iter = 3;
    o.tol = 1e-14;
    std::mt19937_64 eng(5);
    std::normal_distribution<double> nd;
    Eigen::VectorXd xi(12);
    for (int i = 0; i < 12; ++i) xi[i] = nd(eng);
    CHECK_THROWS_AS(fused_lasso({xi, chain_edges(12), 0.7}, o), convergence_error);
}

TEST_CASE("fused components and tolerances") {
    const auto beta = vec({1.0, 1.0 + 1e-9, 5.0, 5.0, 2.0});
    const std::vector<std::pair<int, int>> edges{{0, 1}, {2, 3}, {1, 2}, {3, 4}};
    const auto [label, k] = fused_components(beta, edges, 1e-6);
    CHECK(k == 3);
    CHECK(label == std::vector<int>{0, 0, 1, 1, 2});
    // labels are ordered by smallest vertex index
    CHECK(label[0] == 0);
    const auto [l2, k2] = fused_components(beta, edges, 10.0);
    CHECK(k2 == 1);
    CHECK(default_fuse_tol(vec({0, 2})) == doctest::Approx(2e-6).epsilon(1e-12));
}

TEST_CASE("full fusion rho and the path") {
    std::mt19937_64 eng(11);
    std::normal_distribution<double> nd;
    Eigen::VectorXd xi(16);
    for (int i = 0; i < 16; ++i) xi[i] = nd(eng) + (i >= 8 ? 3.0 : 0.0);
    const auto edges = grid_edges(4, 4);
    const double rmax = full_fusion_rho(xi, edges);
    CHECK(rmax > 0.0);
    {
        const auto full = fused_lasso({xi, edges, rmax});
        CHECK(full.n_components == 1);
        const auto half = fused_lasso({xi, edges, 0.4 * rmax});
        CHECK(half.n_components > 1);
    }
    // constant input is already fused
    CHECK(full_fusion_rho(Eigen::VectorXd::Constant(6, 2.0), chain_edges(6)) == doctest::Approx(0.0));

    const auto grid = rho_grid(rmax, 12);
    REQUIRE(grid.size() == 12);
    CHECK(grid.front() == doctest::Approx(1e-3 * rmax).epsilon(1e-12));
    CHECK(grid.back() == doctest::Approx(rmax).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] > grid[i - 1]);
        // log spacing: constant ratio
        if (i > 1) CHECK(grid[i] / grid[i - 1] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-9));
    }

    const auto path = fusion_path(xi, edges, {}, 10);
    REQUIRE(path.size() == 10);
    for (std::size_t i = 1; i < path.size(); ++i) CHECK(path[i].rho > path[i - 1].rho);
    CHECK(path.back().result.n_components == 1);
    // every entry agrees with a cold solve
    const auto cold = fused_lasso({xi, edges, path[4].rho});
    CHECK((path[4].result.beta - cold.beta).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("warm start reproduces the cold solution") {
    std::mt19937_64 eng(3);
    std::normal_distribution<double> nd;
    Eigen::VectorXd xi(25);
    for (int i = 0; i < 25; ++i) xi[i] = nd(eng);
    const auto edges = grid_edges(5, 5);
    const auto first = fused_lasso({xi, edges, 0.3});
    const auto warm = fused_lasso({xi, edges, 0.9}, {}, &first);
    const auto cold = fused_lasso({xi, edges, 0.9});
    CHECK((warm.beta - cold.beta).lpNorm<Eigen::Infinity>() < 1e-6);
}

} // TEST_SUITE
