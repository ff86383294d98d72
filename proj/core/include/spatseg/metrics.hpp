#pragma once

#include "spatseg/segmentation.hpp"
#include "spatseg/simulate.hpp"
#include "spatseg/stat_test.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spatseg {

// Rand index: fraction of the n(n-1)/2 point pairs on which the two
// labelings agree (both together or both apart). Invariant to label
// permutations; 1 for identical partitions.
double rand_index(std::span<const int> truth, std::span<const int> estimate);

// One-sample Kolmogorov-Smirnov statistic against Uniform(0, 1).
double ks_uniform_statistic(std::vector<double> p_values);

// Critical value of the KS statistic at level 0.01 (asymptotic Kolmogorov
// quantile 1.6276236115189502 with the Stephens small-sample correction
// sqrt(n) + 0.12 + 0.11/sqrt(n)).
double ks_critical_001(std::size_t n);

// True generating-region label per site: blended scenarios label by the
// dominant blend weight, four-block scenarios by quadrant; stationary and
// smoothly nonstationary scenarios have a single region (all zeros).
std::vector<int> true_region_labels(const Scenario& scenario, const SiteSet& sites);

// --- Replicate studies (empirical size/power, K selection, Rand) ---------

struct RejectionCell {
    std::string name;
    Scenario scenario; // per-replicate seeds are derived from the study seed
    int M = 99;        // Monte-Carlo null size inside each test
    double level = 0.05;
};

struct RejectionResult {
    std::string name;
    int replicates = 0;
    double rate = 0.0; // fraction of replicates with p < level
    double se = 0.0;   // binomial standard error
    std::vector<double> p_values;
};

RejectionResult rejection_study(const RejectionCell& cell, int replicates, std::uint64_t seed,
                                const PipelineConfig& cfg = {});

struct SegmentationCell {
    std::string name;
    Scenario scenario;
    int K_max = 4;
    int true_K = 2;
};

struct SegmentationStudyResult {
    std::string name;
    int replicates = 0;
    std::vector<int> chosen_K;
    std::vector<double> rand; // vs the true generating regions, active sites
    double prop_true_K = 0.0;
    double se_true_K = 0.0;
    double mean_rand = 0.0;
    double se_rand = 0.0;
};

SegmentationStudyResult segmentation_study(const SegmentationCell& cell, int replicates,
                                           std::uint64_t seed, const PipelineConfig& cfg = {});

// Table emitters.
std::string to_csv(std::span<const RejectionResult> rows);
std::string to_markdown(std::span<const RejectionResult> rows);
std::string to_csv(std::span<const SegmentationStudyResult> rows);
std::string to_markdown(std::span<const SegmentationStudyResult> rows);

} // namespace spatseg
