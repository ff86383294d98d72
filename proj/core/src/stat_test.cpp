#include "spatseg/stat_test.hpp"

#include "spatseg/covariance.hpp"
#include "spatseg/errors.hpp"
#include "spatseg/geometry.hpp"
#include "spatseg/nelder_mead.hpp"
#include "spatseg/parallel.hpp"
#include "spatseg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GroupStats group_stats(const Eigen::VectorXd& xi, const std::vector<int>& label, int k) {
    GroupStats g;
    double s = 0.0;
    for (Eigen::Index i = 0; i < xi.size(); ++i)
        if (label[static_cast<std::size_t>(i)] == k) {
            ++g.n;
            s += xi[i];
        }
    if (g.n == 0) return g;
    g.mean = s / static_cast<double>(g.n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < xi.size(); ++i)
        if (label[static_cast<std::size_t>(i)] == k) {
            const double d = xi[i] - g.mean;
            ss += d * d;
        }
    g.var = ss / static_cast<double>(g.n);
    return g;
}

} // namespace

double t_statistic(const Eigen::VectorXd& xi, const std::vector<int>& label) {
    if (static_cast<std::size_t>(xi.size()) != label.size())
        throw std::invalid_argument("t_statistic: xi and label sizes differ");
    for (int l : label)
        if (l != 0 && l != 1) throw std::invalid_argument("t_statistic: labels must be 0 or 1");
    const GroupStats g1 = group_stats(xi, label, 0);
    const GroupStats g2 = group_stats(xi, label, 1);
    if (g1.n < 2 || g2.n < 2) throw std::invalid_argument("t_statistic: each group needs at least 2 members");
    if (g1.var == 0.0 && g2.var == 0.0) {
        if (g1.mean == g2.mean)
            throw numerical_error("t_statistic: both group variances are zero with equal means");
        throw numerical_error("t_statistic: both group variances are zero with unequal means");
    }
    const double se = std::sqrt(g1.var / static_cast<double>(g1.n - 1) + g2.var / static_cast<double>(g2.n - 1));
    return std::abs(g1.mean - g2.mean) / se;
}

namespace {

// Profile objective (1/2) log|Omega| + (n/2) log(z' Omega^-1 z) for
// Omega = R(alpha, nu) + tau2 I, evaluated from precomputed distances.
struct ProfileObjective {
    const Eigen::MatrixXd& dist;
    const Eigen::VectorXd& z;
    double tau2;
    double alpha_lo, alpha_hi, nu_lo, nu_hi;
    bool fix_nu;
    double fixed_nu;

    // x = (log alpha) when fix_nu, else (log alpha, log nu).
    double operator()(const Eigen::VectorXd& x) const {
        const double alpha = std::exp(x[0]);
        const double nu = fix_nu ? fixed_nu : std::exp(x[1]);
        if (alpha < alpha_lo || alpha > alpha_hi || nu < nu_lo || nu > nu_hi) return kInf;
        const Eigen::Index n = z.size();
        Eigen::MatrixXd omega(n, n);
        const MaternParams p{1.0, alpha, nu};
        for (Eigen::Index j = 0; j < n; ++j) {
            omega(j, j) = 1.0 + tau2;
            for (Eigen::Index i = j + 1; i < n; ++i) {
                const double c = matern_cov(dist(i, j), p);
                omega(i, j) = c;
                omega(j, i) = c;
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(omega);
        if (llt.info() != Eigen::Success) return kInf;
        const Eigen::VectorXd y = llt.matrixL().solve(z);
        const double q = y.squaredNorm();
        if (!(q > 0.0) || !std::isfinite(q)) return kInf;
        double half_logdet = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) half_logdet += std::log(llt.matrixL()(i, i));
        return half_logdet + 0.5 * static_cast<double>(n) * std::log(q);
    }
};

} // namespace

MaternFit fit_matern_ml(const SpatialDataset& data, double tau2, const FitOptions& opts) {
    const Eigen::Index n = data.z.size();
    if (n < 10) throw std::invalid_argument("fit_matern_ml: need at least 10 observations");
    if (!(tau2 >= 0.0) || !std::isfinite(tau2))
        throw std::invalid_argument("fit_matern_ml: tau2 must be finite and non-negative");
    const double diam = data.sites.domain().diameter();
    const double alo = opts.alpha_lo > 0.0 ? opts.alpha_lo : 1e-3 * diam;
    const double ahi = opts.alpha_hi > 0.0 ? opts.alpha_hi : 10.0 * diam;
    if (!(alo < ahi) || !(opts.nu_lo < opts.nu_hi))
        throw std::invalid_argument("fit_matern_ml: empty parameter box");

    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        dist(j, j) = 0.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double d = distance(data.sites[static_cast<std::size_t>(i)],
                                      data.sites[static_cast<std::size_t>(j)]);
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    const ProfileObjective obj{dist, data.z, tau2, alo, ahi, opts.nu_lo, opts.nu_hi,
                               opts.fix_nu, opts.fixed_nu};

    const int dim = opts.fix_nu ? 1 : 2;
    std::vector<double> alpha_starts{0.05 * diam, 0.2 * diam, 0.8 * diam};
    for (double& a : alpha_starts) a = std::clamp(a, alo, ahi);
    std::vector<double> nu_starts{0.1, 0.5, 2.0};
    for (double& v : nu_starts) v = std::clamp(v, opts.nu_lo, opts.nu_hi);

    int evals = 0;
    bool have_best = false;
    Eigen::VectorXd best_x(dim);
    double best_f = kInf;
    NelderMeadOptions probe_opts;
    probe_opts.max_evals = opts.probe_evals;
    probe_opts.xtol = 1e-3;
    const Eigen::VectorXd probe_step = Eigen::VectorXd::Constant(dim, 0.3);
    for (double a0 : alpha_starts) {
        for (std::size_t iv = 0; iv < (opts.fix_nu ? std::size_t{1} : nu_starts.size()); ++iv) {
            Eigen::VectorXd x0(dim);
            x0[0] = std::log(a0);
            if (!opts.fix_nu) x0[1] = std::log(nu_starts[iv]);
            if (!std::isfinite(obj(x0))) {
                ++evals;
                continue;
            }
            NelderMeadResult r = nelder_mead(obj, x0, probe_step, probe_opts);
            evals += r.evals;
            if (!have_best || r.f < best_f) {
                have_best = true;
                best_f = r.f;
                best_x = r.x;
            }
        }
    }
    if (!have_best || !std::isfinite(best_f))
        throw numerical_error("fit_matern_ml: every start failed to produce a finite objective");

    NelderMeadOptions polish_opts;
    polish_opts.max_evals = opts.polish_evals;
    polish_opts.xtol = opts.xtol;
    NelderMeadResult polish = nelder_mead(obj, best_x, Eigen::VectorXd::Constant(dim, 0.05), polish_opts);
    evals += polish.evals;
    if (polish.f > best_f) { // optimum never worse than its initialization
        polish.x = best_x;
        polish.f = best_f;
    }
    if (!polish.converged)
        throw convergence_error(
            "fit_matern_ml: optimizer exhausted its budget; best so far alpha=" +
            std::to_string(std::exp(polish.x[0])) +
            ", nu=" + std::to_string(opts.fix_nu ? opts.fixed_nu : std::exp(polish.x[1])) +
            ", objective=" + std::to_string(polish.f));

    MaternFit fit;
    fit.alpha = std::exp(polish.x[0]);
    fit.nu = opts.fix_nu ? opts.fixed_nu : std::exp(polish.x[1]);
    fit.tau2 = tau2;
    fit.profile_objective = polish.f;
    fit.evals = evals;

    // sigma2_hat = z' Omega^-1 z / n at the optimum.
    Eigen::MatrixXd omega(n, n);
    const MaternParams p{1.0, fit.alpha, fit.nu};
    for (Eigen::Index j = 0; j < n; ++j) {
        omega(j, j) = 1.0 + tau2;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double c = matern_cov(dist(i, j), p);
            omega(i, j) = c;
            omega(j, i) = c;
        }
    }
    JitteredLLT jl = jittered_llt(std::move(omega));
    const Eigen::VectorXd y = jl.llt.matrixL().solve(data.z);
    const double q = y.squaredNorm();
    fit.sigma2 = q / static_cast<double>(n);
    double half_logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) half_logdet += std::log(jl.llt.matrixL()(i, i));
    const double nd = static_cast<double>(n);
    fit.nll = half_logdet + 0.5 * nd * std::log(fit.sigma2) + 0.5 * nd +
              0.5 * nd * std::log(2.0 * std::numbers::pi);
    return fit;
}

namespace {

// Geometry-dependent state shared by every Monte-Carlo replicate.
struct Pipeline {
    const SiteSet& sites;
    NeighborGraph graph;
    IndexConstants consts;
    std::vector<Point> active_pts;
    SegmentationOptions seg;
    bool literal = false;

    Pipeline(const SiteSet& s, double radius, double tau2, const PipelineConfig& cfg)
        : sites(s),
          graph(build_neighbor_graph(s, radius)),
          consts(index_constants(tau2)),
          seg(cfg.seg),
          literal(cfg.literal_normalization) {
        active_pts.reserve(graph.active.size());
        for (int i : graph.active) active_pts.push_back(s[static_cast<std::size_t>(i)]);
    }

    struct Outcome {
        double T = 0.0;
        LocalIndexField field;
        Segmentation seg2;
    };

    Outcome run(const Eigen::VectorXd& z) const {
        Outcome out;
        SpatialDataset d{sites, z, consts.tau2};
        out.field = local_indices(d, graph, consts, literal);
        out.seg2 = segment_greedy(active_pts, out.field.xi, 2, seg);
        out.T = t_statistic(out.field.xi, out.seg2.label);
        return out;
    }
};

} // namespace

std::vector<double> mc_null_distribution(const SpatialDataset& data, const MaternFit& fit, int M,
                                         std::uint64_t seed, const PipelineConfig& cfg) {
    if (M < 1) throw std::invalid_argument("mc_null_distribution: M must be at least 1");
    const std::size_t n = data.sites.size();
    const double radius =
        cfg.radius > 0.0 ? cfg.radius : recommended_radius(data.sites.domain().area(), n);
    const Pipeline pipe(data.sites, radius, fit.tau2, cfg);

    const CovarianceModel model(MaternParams{fit.sigma2, fit.alpha, fit.nu}, fit.tau2);
    const Eigen::MatrixXd sigma = build_cov_matrix(data.sites.points(), model);
    const JitteredLLT jl = jittered_llt(sigma);
    const Eigen::MatrixXd L = jl.llt.matrixL();

    std::vector<double> T(static_cast<std::size_t>(M));
    auto one = [&](int m) {
        try {
            auto rng = substream(seed, static_cast<std::uint64_t>(m) + 1);
            GaussianStream g(rng);
            const Eigen::VectorXd z = L * g.vector(static_cast<Eigen::Index>(n));
            T[static_cast<std::size_t>(m)] = pipe.run(z).T;
        } catch (const std::exception& e) {
            throw numerical_error("mc_null_distribution: replicate " + std::to_string(m + 1) +
                                  " failed: " + e.what());
        }
    };
    parallel_for_index(M, cfg.threads, one);
    return T;
}

double mc_pvalue(double T, std::span<const double> null_T) {
    if (null_T.empty()) throw std::invalid_argument("mc_pvalue: empty null sample");
    long count = 0;
    for (double t : null_T)
        if (t > T) ++count;
    return (1.0 + static_cast<double>(count)) / (static_cast<double>(null_T.size()) + 1.0);
}

TestReport stationarity_test(const SpatialDataset& data, int M, std::uint64_t seed,
                             const PipelineConfig& cfg) {
    if (M < 1) throw std::invalid_argument("stationarity_test: M must be at least 1");
    TestReport rep;
    rep.M = M;
    if (data.tau2.has_value()) {
        rep.tau2 = *data.tau2;
        rep.tau2_estimated = false;
    } else {
        rep.tau2 = estimate_nugget(data, cfg.nugget_pairs).tau2;
        rep.tau2_estimated = true;
    }
    rep.radius = cfg.radius > 0.0 ? cfg.radius
                                  : recommended_radius(data.sites.domain().area(), data.sites.size());

    const Pipeline pipe(data.sites, rep.radius, rep.tau2, cfg);
    const Pipeline::Outcome obs = pipe.run(data.z);
    rep.T = obs.T;
    rep.active_sites = obs.field.active;
    rep.segment = obs.seg2.label;
    rep.seeds = {obs.field.active[static_cast<std::size_t>(obs.seg2.seeds[0])],
                 obs.field.active[static_cast<std::size_t>(obs.seg2.seeds[1])]};
    rep.group1 = group_stats(obs.field.xi, obs.seg2.label, 0);
    rep.group2 = group_stats(obs.field.xi, obs.seg2.label, 1);

    rep.fit = fit_matern_ml(data, rep.tau2, cfg.fit);
    rep.null_T = mc_null_distribution(data, rep.fit, M, seed, cfg);
    rep.p_value = mc_pvalue(rep.T, rep.null_T);
    rep.stationary = rep.p_value >= rep.level;
    return rep;
}

} // namespace spatseg
