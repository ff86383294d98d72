// Micro-benchmarks of the numerical kernels. Built only when google-benchmark
// is available (see benchmarks/CMakeLists.txt).

#include <benchmark/benchmark.h>

#include <spatseg/covariance.hpp>
#include <spatseg/fused_lasso.hpp>
#include <spatseg/geometry.hpp>
#include <spatseg/indices.hpp>
#include <spatseg/kriging.hpp>
#include <spatseg/segmentation.hpp>
#include <spatseg/simulate.hpp>
#include <spatseg/special.hpp>

#include <random>
#include <utility>
#include <vector>

using namespace spatseg;

namespace {

SpatialDataset bench_dataset(std::size_t n) {
    Scenario sc;
    sc.n = n;
    sc.seed = 42;
    sc.tau2 = 0.01;
    sc.family = StationaryScenario{MaternParams{1.0, 0.2, 0.5}};
    return simulate_dataset(sc);
}

} // namespace

static void BM_BesselK(benchmark::State& state) {
    const double nu = static_cast<double>(state.range(0)) / 10.0;
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bessel_k(nu, x));
        x = x > 40.0 ? 0.1 : x + 0.05;
    }
}
BENCHMARK(BM_BesselK)->Arg(5)->Arg(15)->Arg(27);

static void BM_MaternCov(benchmark::State& state) {
    const MaternParams p{1.0, 0.2, static_cast<double>(state.range(0)) / 10.0};
    double h = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(matern_cov(h, p));
        h = h > 2.0 ? 1e-3 : h + 1e-3;
    }
}
BENCHMARK(BM_MaternCov)->Arg(5)->Arg(13);

static void BM_CovBuildCholesky(benchmark::State& state) {
    const auto data = bench_dataset(static_cast<std::size_t>(state.range(0)));
    const CovarianceModel model(ExponentialParams{1.0, 0.2}, 0.01);
    for (auto _ : state) {
        auto m = build_cov_matrix(data.sites.points(), model);
        benchmark::DoNotOptimize(jittered_llt(std::move(m)).llt.matrixL()(0, 0));
    }
}
BENCHMARK(BM_CovBuildCholesky)->Arg(200)->Arg(500);

static void BM_NeighborGraph(benchmark::State& state) {
    const auto data = bench_dataset(static_cast<std::size_t>(state.range(0)));
    const double r = recommended_radius(data.sites.domain().area(), data.sites.size());
    for (auto _ : state) benchmark::DoNotOptimize(build_neighbor_graph(data.sites, r).active.size());
}
BENCHMARK(BM_NeighborGraph)->Arg(500)->Arg(2000);

static void BM_LocalIndices(benchmark::State& state) {
    const auto data = bench_dataset(static_cast<std::size_t>(state.range(0)));
    const double r = recommended_radius(data.sites.domain().area(), data.sites.size());
    const auto graph = build_neighbor_graph(data.sites, r);
    const auto consts = index_constants(0.01);
    for (auto _ : state) benchmark::DoNotOptimize(local_indices(data, graph, consts).xi.sum());
}
BENCHMARK(BM_LocalIndices)->Arg(500)->Arg(2000);

static void BM_FusedLassoGrid(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    std::vector<std::pair<int, int>> edges;
    Eigen::VectorXd xi(side * side);
    std::mt19937_64 eng(7);
    std::normal_distribution<double> nd;
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int i = r * side + c;
            xi[i] = nd(eng) + (c >= side / 2 ? 2.0 : 0.0);
            if (c + 1 < side) edges.push_back({i, i + 1});
            if (r + 1 < side) edges.push_back({i, i + side});
        }
    AdmmOptions opts;
    opts.tol = 1e-6;
    for (auto _ : state)
        benchmark::DoNotOptimize(fused_lasso({xi, edges, 1.0}, opts).beta.sum());
}
BENCHMARK(BM_FusedLassoGrid)->Arg(16)->Arg(24);

static void BM_GreedySegmentation(benchmark::State& state) {
    const auto data = bench_dataset(static_cast<std::size_t>(state.range(0)));
    const double r = recommended_radius(data.sites.domain().area(), data.sites.size());
    const auto graph = build_neighbor_graph(data.sites, r);
    const auto field = local_indices(data, graph, index_constants(0.01));
    std::vector<Point> pts;
    for (int i : field.active) pts.push_back(data.sites[static_cast<std::size_t>(i)]);
    for (auto _ : state) benchmark::DoNotOptimize(segment_greedy(pts, field.xi, 4).objective);
}
BENCHMARK(BM_GreedySegmentation)->Arg(200)->Arg(500);

static void BM_KrigingPredict(benchmark::State& state) {
    const auto data = bench_dataset(static_cast<std::size_t>(state.range(0)));
    const CovarianceModel model(ExponentialParams{1.0, 0.2}, 0.01);
    const KrigingSystem sys(data.sites, data.z, model);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sys.predict({0.2 + 0.6 * t, 0.3 + 0.4 * t}).mean);
        t = t > 1.0 ? 0.0 : t + 1e-3;
    }
}
BENCHMARK(BM_KrigingPredict)->Arg(200)->Arg(500);

BENCHMARK_MAIN();
