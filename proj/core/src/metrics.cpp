#include "spatseg/metrics.hpp"

#include "spatseg/errors.hpp"
#include "spatseg/geometry.hpp"
#include "spatseg/indices.hpp"
#include "spatseg/parallel.hpp"
#include "spatseg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatseg {

double rand_index(std::span<const int> truth, std::span<const int> estimate) {
    if (truth.size() != estimate.size()) throw std::invalid_argument("rand_index: length mismatch");
    const std::size_t n = truth.size();
    if (n < 2) throw std::invalid_argument("rand_index: need at least 2 points");
    long agree = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_t = truth[i] == truth[j];
            const bool same_e = estimate[i] == estimate[j];
            agree += (same_t == same_e);
            ++total;
        }
    return static_cast<double>(agree) / static_cast<double>(total);
}

double ks_uniform_statistic(std::vector<double> p_values) {
    if (p_values.empty()) throw std::invalid_argument("ks_uniform_statistic: empty sample");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("ks_uniform_statistic: values must lie in [0, 1]");
    std::sort(p_values.begin(), p_values.end());
    const double n = static_cast<double>(p_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p_values.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - p_values[i];
        const double lo = p_values[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

double ks_critical_001(std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks_critical_001: empty sample");
    const double sn = std::sqrt(static_cast<double>(n));
    return 1.6276236115189502 / (sn + 0.12 + 0.11 / sn);
}

std::vector<int> true_region_labels(const Scenario& scenario, const SiteSet& sites) {
    std::vector<int> lab(sites.size(), 0);
    if (const auto* bl = std::get_if<BlendedScenario>(&scenario.family)) {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const auto [w1, w2] = blend_weights(sites[i], bl->params);
            lab[i] = w1 >= w2 ? 0 : 1;
        }
    } else if (std::holds_alternative<FourBlockScenario>(scenario.family)) {
        const Point c = scenario.domain.center();
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const int bx = sites[i].x >= c.x ? 1 : 0;
            const int by = sites[i].y >= c.y ? 1 : 0;
            lab[i] = bx + 2 * by;
        }
    }
    return lab;
}

namespace {

std::uint64_t replicate_seed(std::uint64_t study_seed, int r) {
    return splitmix64(splitmix64(study_seed) + static_cast<std::uint64_t>(r));
}

double binomial_se(double p, int n) {
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

} // namespace

RejectionResult rejection_study(const RejectionCell& cell, int replicates, std::uint64_t seed,
                                const PipelineConfig& cfg) {
    if (replicates < 1) throw std::invalid_argument("rejection_study: need at least one replicate");
    RejectionResult res;
    res.name = cell.name;
    res.replicates = replicates;
    res.p_values.assign(static_cast<std::size_t>(replicates), 0.0);
    auto one = [&](int r) {
        try {
            Scenario sc = cell.scenario;
            sc.seed = replicate_seed(seed, r);
            const SpatialDataset data = simulate_dataset(sc);
            const std::uint64_t mc_seed = splitmix64(sc.seed ^ 0x9e3779b97f4a7c15ULL);
            const TestReport rep = stationarity_test(data, cell.M, mc_seed, cfg);
            res.p_values[static_cast<std::size_t>(r)] = rep.p_value;
        } catch (const std::exception& e) {
            throw numerical_error("rejection_study cell '" + cell.name + "', replicate " +
                                  std::to_string(r + 1) + ": " + e.what());
        }
    };
    parallel_for_index(replicates, cfg.threads, one);
    long rejections = 0;
    for (double p : res.p_values)
        if (p < cell.level) ++rejections;
    res.rate = static_cast<double>(rejections) / static_cast<double>(replicates);
    res.se = binomial_se(res.rate, replicates);
    return res;
}

SegmentationStudyResult segmentation_study(const SegmentationCell& cell, int replicates,
                                           std::uint64_t seed, const PipelineConfig& cfg) {
    if (replicates < 1) throw std::invalid_argument("segmentation_study: need at least one replicate");
    SegmentationStudyResult res;
    res.name = cell.name;
    res.replicates = replicates;
    res.chosen_K.assign(static_cast<std::size_t>(replicates), 0);
    res.rand.assign(static_cast<std::size_t>(replicates), 0.0);
    auto one = [&](int r) {
        try {
            Scenario sc = cell.scenario;
            sc.seed = replicate_seed(seed, r);
            const SpatialDataset data = simulate_dataset(sc);
            const double radius = cfg.radius > 0.0
                                      ? cfg.radius
                                      : recommended_radius(data.sites.domain().area(), data.sites.size());
            const NeighborGraph graph = build_neighbor_graph(data.sites, radius);
            const LocalIndexField field =
                local_indices(data, graph, index_constants(sc.tau2), cfg.literal_normalization);
            std::vector<Point> active_pts;
            active_pts.reserve(field.active.size());
            for (int i : field.active) active_pts.push_back(data.sites[static_cast<std::size_t>(i)]);
            const BicSelection sel = select_K_by_bic(active_pts, field.xi, cell.K_max, cfg.seg);
            res.chosen_K[static_cast<std::size_t>(r)] = sel.best_K;

            const std::vector<int> truth_all = true_region_labels(sc, data.sites);
            std::vector<int> truth;
            truth.reserve(field.active.size());
            for (int i : field.active) truth.push_back(truth_all[static_cast<std::size_t>(i)]);
            const auto& est = sel.entries[static_cast<std::size_t>(sel.best_K - 1)].seg.label;
            res.rand[static_cast<std::size_t>(r)] = rand_index(truth, est);
        } catch (const std::exception& e) {
            throw numerical_error("segmentation_study cell '" + cell.name + "', replicate " +
                                  std::to_string(r + 1) + ": " + e.what());
        }
    };
    parallel_for_index(replicates, cfg.threads, one);

    long hits = 0;
    double sum = 0.0;
    for (int r = 0; r < replicates; ++r) {
        hits += res.chosen_K[static_cast<std::size_t>(r)] == cell.true_K;
        sum += res.rand[static_cast<std::size_t>(r)];
    }
    res.prop_true_K = static_cast<double>(hits) / static_cast<double>(replicates);
    res.se_true_K = binomial_se(res.prop_true_K, replicates);
    res.mean_rand = sum / static_cast<double>(replicates);
    double ss = 0.0;
    for (double v : res.rand) ss += (v - res.mean_rand) * (v - res.mean_rand);
    res.se_rand = replicates > 1
                      ? std::sqrt(ss / (static_cast<double>(replicates) - 1.0) / static_cast<double>(replicates))
                      : 0.0;
    return res;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

std::string to_csv(std::span<const RejectionResult> rows) {
    std::string out = "cell,replicates,rejection_rate,se\n";
    for (const auto& r : rows)
        out += r.name + "," + std::to_string(r.replicates) + "," + fmt(r.rate) + "," + fmt(r.se) + "\n";
    return out;
}

std::string to_markdown(std::span<const RejectionResult> rows) {
    std::string out = "| cell | replicates | rejection rate | se |\n|---|---|---|---|\n";
    for (const auto& r : rows)
        out += "| " + r.name + " | " + std::to_string(r.replicates) + " | " + fmt(r.rate) + " | " +
               fmt(r.se) + " |\n";
    return out;
}

std::string to_csv(std::span<const SegmentationStudyResult> rows) {
    std::string out = "cell,replicates,prop_true_K,se_K,mean_rand,se_rand\n";
    for (const auto& r : rows)
        out += r.name + "," + std::to_string(r.replicates) + "," + fmt(r.prop_true_K) + "," +
               fmt(r.se_true_K) + "," + fmt(r.mean_rand) + "," + fmt(r.se_rand) + "\n";
    return out;
}

std::string to_markdown(std::span<const SegmentationStudyResult> rows) {
    std::string out =
        "| cell | replicates | P(K = true) | se | mean Rand | se |\n|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
        out += "| " + r.name + " | " + std::to_string(r.replicates) + " | " + fmt(r.prop_true_K) +
               " | " + fmt(r.se_true_K) + " | " + fmt(r.mean_rand) + " | " + fmt(r.se_rand) + " |\n";
    return out;
}

} // namespace spatseg
