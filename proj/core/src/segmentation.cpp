#include "spatseg/segmentation.hpp"

#include "spatseg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double population_variance(const Eigen::VectorXd& v) {
    if (v.size() == 0) return 0.0;
    const double m = v.mean();
    return (v.array() - m).square().sum() / static_cast<double>(v.size());
}

// Accumulator-based f_K over precentered values; shared by objective_fK and
// the greedy candidate loop.
double fk_from_moments(const std::vector<long>& cnt, const std::vector<double>& sum,
                       const std::vector<double>& sumsq, double var_floor, int min_count) {
    constexpr double half_log_2pi = 0.5 * 1.8378770664093455;
    double f = 0.0;
    for (std::size_t k = 0; k < cnt.size(); ++k) {
        if (cnt[k] < min_count) return kInf;
        const double n = static_cast<double>(cnt[k]);
        const double mean = sum[k] / n;
        double v = sumsq[k] / n - mean * mean;
        if (v < var_floor) v = var_floor;
        f += n * (0.5 * std::log(v) + half_log_2pi + 0.5);
    }
    return f;
}

// Search-internal ranking that stays comparable when the minimum-count
// constraint is violated: configurations are ordered first by the total
// member deficit, then by the likelihood term over the nonempty segments.
// This lets the greedy walk out of an infeasible start instead of freezing
// on an inf-vs-inf comparison.
struct FkRank {
    long deficit = 0; // sum over segments of max(0, min_count - n_k)
    double f = 0.0;   // likelihood term (over nonempty segments only)

    bool better_than(const FkRank& o, double tol) const {
        if (deficit != o.deficit) return deficit < o.deficit;
        return f < o.f - tol;
    }
};

FkRank fk_rank_from_moments(const std::vector<long>& cnt, const std::vector<double>& sum,
                            const std::vector<double>& sumsq, double var_floor, int min_count) {
    constexpr double half_log_2pi = 0.5 * 1.8378770664093455;
    FkRank r;
    for (std::size_t k = 0; k < cnt.size(); ++k) {
        if (cnt[k] < min_count) r.deficit += min_count - cnt[k];
        if (cnt[k] == 0) continue;
        const double n = static_cast<double>(cnt[k]);
        const double mean = sum[k] / n;
        double v = sumsq[k] / n - mean * mean;
        if (v < var_floor) v = var_floor;
        r.f += n * (0.5 * std::log(v) + half_log_2pi + 0.5);
    }
    return r;
}

} // namespace

double objective_fK(const Eigen::VectorXd& xi, const std::vector<int>& label, int K,
                    const SegmentationOptions& opts) {
    if (K < 1) throw std::invalid_argument("objective_fK: K must be >= 1");
    if (static_cast<std::size_t>(xi.size()) != label.size())
        throw std::invalid_argument("objective_fK: xi and label sizes differ");
    const double gmean = xi.size() ? xi.mean() : 0.0;
    const double gvar = population_variance(xi);
    const double floor = std::max(1e-30, 1e-15 * gvar);
    std::vector<long> cnt(static_cast<std::size_t>(K), 0);
    std::vector<double> sum(static_cast<std::size_t>(K), 0.0), sumsq(static_cast<std::size_t>(K), 0.0);
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
        const int k = label[static_cast<std::size_t>(i)];
        if (k < 0 || k >= K) throw std::invalid_argument("objective_fK: label out of range");
        const double c = xi[i] - gmean;
        cnt[static_cast<std::size_t>(k)] += 1;
        sum[static_cast<std::size_t>(k)] += c;
        sumsq[static_cast<std::size_t>(k)] += c * c;
    }
    return fk_from_moments(cnt, sum, sumsq, floor, opts.min_count);
}

std::vector<int> deterministic_kmeans_seeds(std::span<const Point> pts, const Eigen::VectorXd& xi, int K) {
    const std::size_t n = pts.size();
    if (static_cast<std::size_t>(xi.size()) != n)
        throw std::invalid_argument("deterministic_kmeans_seeds: pts and xi sizes differ");
    if (K < 1) throw std::invalid_argument("deterministic_kmeans_seeds: K must be >= 1");
    if (static_cast<std::size_t>(K) > n)
        throw std::invalid_argument("deterministic_kmeans_seeds: K exceeds number of sites");

    // Features: raw coordinates plus the standardized index, so the cluster
    // metric keeps the map geometry while putting the index on a unit scale.
    Eigen::MatrixXd F(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        F(static_cast<Eigen::Index>(i), 0) = pts[i].x;
        F(static_cast<Eigen::Index>(i), 1) = pts[i].y;
        F(static_cast<Eigen::Index>(i), 2) = xi[static_cast<Eigen::Index>(i)];
    }
    {
        const double m = F.col(2).mean();
        const double sd = std::sqrt((F.col(2).array() - m).square().sum() / static_cast<double>(n));
        if (sd > 0.0)
            F.col(2) = (F.col(2).array() - m) / sd;
        else
            F.col(2).setZero();
    }

    // Gaussian kernel density with per-dimension Scott bandwidths (invariant
    // to per-dimension rescaling of the features).
    const double scott = std::pow(static_cast<double>(n), -1.0 / 7.0);
    Eigen::Vector3d inv2h2 = Eigen::Vector3d::Zero();
    for (int c = 0; c < 3; ++c) {
        const double m = F.col(c).mean();
        const double sd = std::sqrt((F.col(c).array() - m).square().sum() / static_cast<double>(n));
        const double h = sd * scott;
        if (h > 0.0) inv2h2[c] = 1.0 / (2.0 * h * h);
    }
    Eigen::VectorXd density = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Eigen::RowVector3d diff =
                F.row(static_cast<Eigen::Index>(i)) - F.row(static_cast<Eigen::Index>(j));
            d += std::exp(-(diff.array().square() * inv2h2.transpose().array()).sum());
        }
        density[static_cast<Eigen::Index>(i)] = d;
    }

    std::vector<int> seeds;
    seeds.reserve(static_cast<std::size_t>(K));
    {
        Eigen::Index peak = 0;
        density.maxCoeff(&peak); // first maximal entry -> lowest index on ties
        seeds.push_back(static_cast<int>(peak));
    }
    std::vector<char> taken(n, 0);
    taken[static_cast<std::size_t>(seeds[0])] = 1;
    while (static_cast<int>(seeds.size()) < K) {
        int best = -1;
        double best_score = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double mind = kInf;
            for (int s : seeds)
                mind = std::min(
                    mind, (F.row(static_cast<Eigen::Index>(i)) - F.row(static_cast<Eigen::Index>(s))).norm());
            const double score = density[static_cast<Eigen::Index>(i)] * mind;
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) throw degenerate_geometry("deterministic_kmeans_seeds: ran out of distinct sites");
        seeds.push_back(best);
        taken[static_cast<std::size_t>(best)] = 1;
    }
    if (K == 1) return seeds;

    // Lloyd iterations in feature space.
    Eigen::MatrixXd centroid(K, 3);
    for (int k = 0; k < K; ++k) centroid.row(k) = F.row(seeds[static_cast<std::size_t>(k)]);
    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int bk = 0;
            double bd = (F.row(static_cast<Eigen::Index>(i)) - centroid.row(0)).squaredNorm();
            for (int k = 1; k < K; ++k) {
                const double d = (F.row(static_cast<Eigen::Index>(i)) - centroid.row(k)).squaredNorm();
                if (d < bd) {
                    bd = d;
                    bk = k;
                }
            }
            if (assign[i] != bk) {
                assign[i] = bk;
                changed = true;
            }
        }
        if (!changed) break;
        for (int k = 0; k < K; ++k) {
            Eigen::RowVector3d acc = Eigen::RowVector3d::Zero();
            long cnt = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == k) {
                    acc += F.row(static_cast<Eigen::Index>(i));
                    ++cnt;
                }
            if (cnt > 0) centroid.row(k) = acc / static_cast<double>(cnt);
        }
    }

    // Snap centroids to distinct data points (nearest untaken feature vector).
    std::fill(taken.begin(), taken.end(), 0);
    std::vector<int> snapped(static_cast<std::size_t>(K), -1);
    for (int k = 0; k < K; ++k) {
        int best = -1;
        double bd = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double d = (F.row(static_cast<Eigen::Index>(i)) - centroid.row(k)).squaredNorm();
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        snapped[static_cast<std::size_t>(k)] = best;
        taken[static_cast<std::size_t>(best)] = 1;
    }
    std::sort(snapped.begin(), snapped.end());
    return snapped;
}

namespace {

std::vector<int> assign_to_seeds(std::span<const Point> pts, const std::vector<int>& seeds) {
    std::vector<int> label(pts.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int bk = 0;
        double bd = squared_distance(pts[i], pts[static_cast<std::size_t>(seeds[0])]);
        for (std::size_t k = 1; k < seeds.size(); ++k) {
            const double d = squared_distance(pts[i], pts[static_cast<std::size_t>(seeds[k])]);
            if (d < bd) {
                bd = d;
                bk = static_cast<int>(k);
            }
        }
        label[i] = bk;
    }
    return label;
}

} // namespace

Segmentation segment_greedy(std::span<const Point> pts, const Eigen::VectorXd& xi, int K,
                            const SegmentationOptions& opts) {
    const std::size_t n = pts.size();
    if (static_cast<std::size_t>(xi.size()) != n)
        throw std::invalid_argument("segment_greedy: pts and xi sizes differ");
    if (K < 1) throw std::invalid_argument("segment_greedy: K must be >= 1");
    if (static_cast<std::size_t>(K) > n) throw std::invalid_argument("segment_greedy: K exceeds number of sites");

    Segmentation out;
    out.K = K;
    out.seeds = deterministic_kmeans_seeds(pts, xi, K);
    out.label.assign(n, 0);
    if (K == 1) {
        out.objective = objective_fK(xi, out.label, 1, opts);
        return out;
    }

    const double gmean = xi.mean();
    Eigen::VectorXd xc = xi.array() - gmean;
    const double floor = std::max(1e-30, 1e-15 * population_variance(xi));

    auto rank_of_labels = [&](const std::vector<int>& lab) {
        std::vector<long> cnt(static_cast<std::size_t>(K), 0);
        std::vector<double> sum(static_cast<std::size_t>(K), 0.0), sumsq(static_cast<std::size_t>(K), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const int k = lab[i];
            cnt[static_cast<std::size_t>(k)] += 1;
            sum[static_cast<std::size_t>(k)] += xc[static_cast<Eigen::Index>(i)];
            sumsq[static_cast<std::size_t>(k)] += xc[static_cast<Eigen::Index>(i)] * xc[static_cast<Eigen::Index>(i)];
        }
        return fk_rank_from_moments(cnt, sum, sumsq, floor, opts.min_count);
    };

    out.label = assign_to_seeds(pts, out.seeds);
    FkRank r_cur = rank_of_labels(out.label);

    std::vector<double> other_d2(n);
    std::vector<int> other_k(n);
    std::vector<long> cnt(static_cast<std::size_t>(K));
    std::vector<double> sum(static_cast<std::size_t>(K)), sumsq(static_cast<std::size_t>(K));

    bool improved = true;
    while (improved && out.cycles < opts.max_cycles) {
        improved = false;
        ++out.cycles;
        for (int k = 0; k < K; ++k) {
            // Distance to the best seed other than slot k, for every site.
            for (std::size_t i = 0; i < n; ++i) {
                double bd = kInf;
                int bk = -1;
                for (int j = 0; j < K; ++j) {
                    if (j == k) continue;
                    const double d = squared_distance(pts[i], pts[static_cast<std::size_t>(out.seeds[static_cast<std::size_t>(j)])]);
                    // Mirror assign_to_seeds tie-breaking: lower slot wins ties.
                    if (d < bd || (d == bd && j < bk)) {
                        bd = d;
                        bk = j;
                    }
                }
                other_d2[i] = bd;
                other_k[i] = bk;
            }
            int best_c = -1;
            FkRank best_r = r_cur;
            for (std::size_t c = 0; c < n; ++c) {
                if (out.label[c] != k) continue; // candidates are the segment's own members
                if (static_cast<int>(c) == out.seeds[static_cast<std::size_t>(k)]) continue;
                std::fill(cnt.begin(), cnt.end(), 0L);
                std::fill(sum.begin(), sum.end(), 0.0);
                std::fill(sumsq.begin(), sumsq.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    const double dc = squared_distance(pts[i], pts[c]);
                    // Slot k wins ties against higher slots, loses to lower ones.
                    const int lab = (dc < other_d2[i] || (dc == other_d2[i] && k < other_k[i]))
                                        ? k
                                        : other_k[i];
                    cnt[static_cast<std::size_t>(lab)] += 1;
                    sum[static_cast<std::size_t>(lab)] += xc[static_cast<Eigen::Index>(i)];
                    sumsq[static_cast<std::size_t>(lab)] +=
                        xc[static_cast<Eigen::Index>(i)] * xc[static_cast<Eigen::Index>(i)];
                }
                const FkRank r_try = fk_rank_from_moments(cnt, sum, sumsq, floor, opts.min_count);
                if (r_try.better_than(best_r, opts.improve_tol)) {
                    best_r = r_try;
                    best_c = static_cast<int>(c);
                }
            }
            if (best_c >= 0) {
                out.seeds[static_cast<std::size_t>(k)] = best_c;
                out.label = assign_to_seeds(pts, out.seeds);
                r_cur = rank_of_labels(out.label);
                improved = true;
            }
        }
    }
    out.objective = r_cur.deficit > 0 ? kInf : r_cur.f;
    return out;
}

BicSelection select_K_by_bic(std::span<const Point> pts, const Eigen::VectorXd& xi, int K_max,
                             const SegmentationOptions& opts) {
    if (K_max < 1) throw std::invalid_argument("select_K_by_bic: K_max must be >= 1");
    BicSelection sel;
    const double logn = std::log(static_cast<double>(pts.size()));
    double best = kInf;
    for (int K = 1; K <= K_max; ++K) {
        if (static_cast<std::size_t>(K) > pts.size()) break;
        BicEntry e;
        e.K = K;
        e.seg = segment_greedy(pts, xi, K, opts);
        e.objective = e.seg.objective;
        e.bic = e.objective + 4.0 * K * logn;
        if (e.bic < best) {
            best = e.bic;
            sel.best_K = K;
        }
        sel.entries.push_back(std::move(e));
    }
    if (sel.entries.empty() || !std::isfinite(best))
        throw numerical_error("select_K_by_bic: no K produced a finite criterion");
    return sel;
}

} // namespace spatseg
