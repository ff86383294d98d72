#include "spatseg/kriging.hpp"

#include "spatseg/errors.hpp"
#include "spatseg/geometry.hpp"
#include "spatseg/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spatseg {

KrigingSystem::KrigingSystem(SiteSet train, Eigen::VectorXd z, CovarianceModel model)
    : train_(std::move(train)), z_(std::move(z)), model_(std::move(model)),
      factor_(jittered_llt(build_cov_matrix(train_.points(), model_))) {
    if (static_cast<std::size_t>(z_.size()) != train_.size())
        throw std::invalid_argument("KrigingSystem: sites and values sizes differ");
    const Eigen::Index n = z_.size();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    sinv_z_ = factor_.llt.solve(z_);
    sinv_one_ = factor_.llt.solve(ones);
    one_sinv_one_ = ones.dot(sinv_one_);
    if (!(one_sinv_one_ > 0.0) || !std::isfinite(one_sinv_one_))
        throw numerical_error("KrigingSystem: 1' Sigma^-1 1 is not positive (singular system)");
}

Eigen::VectorXd KrigingSystem::cross_cov(Point s0) const {
    const Eigen::Index n = z_.size();
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i)
        c[i] = model_.cov(train_[static_cast<std::size_t>(i)], s0);
    return c;
}

Prediction KrigingSystem::predict(Point s0) const {
    const Eigen::VectorXd c = cross_cov(s0);
    const Eigen::VectorXd sinv_c = factor_.llt.solve(c);
    const double lagrange = (1.0 - sinv_c.dot(Eigen::VectorXd::Ones(c.size()))) / one_sinv_one_;
    Prediction p;
    p.mean = c.dot(sinv_z_) + lagrange * z_.dot(sinv_one_);
    const double var = model_.variance_at(s0) - c.dot(sinv_c) +
                       (1.0 - c.dot(sinv_one_)) * (1.0 - c.dot(sinv_one_)) / one_sinv_one_;
    p.variance = std::max(0.0, var);
    return p;
}

Eigen::VectorXd KrigingSystem::weights(Point s0) const {
    const Eigen::VectorXd c = cross_cov(s0);
    const Eigen::VectorXd sinv_c = factor_.llt.solve(c);
    const double lagrange = (1.0 - sinv_c.dot(Eigen::VectorXd::Ones(c.size()))) / one_sinv_one_;
    return sinv_c + lagrange * sinv_one_;
}

Prediction ordinary_krige(const KrigingSystem& system, Point s0) { return system.predict(s0); }

PiecewiseKriging::PiecewiseKriging(std::vector<Point> seeds, std::vector<KrigingSystem> systems)
    : seeds_(std::move(seeds)), systems_(std::move(systems)) {
    if (seeds_.empty() || seeds_.size() != systems_.size())
        throw std::invalid_argument("PiecewiseKriging: seeds and systems must match and be nonempty");
}

Prediction PiecewiseKriging::predict(Point s0) const {
    const int k = voronoi_assign(seeds_, s0);
    Prediction p = systems_[static_cast<std::size_t>(k)].predict(s0);
    p.region = k;
    return p;
}

namespace {

std::vector<std::vector<int>> region_members(const SpatialDataset& data, std::span<const Point> seeds) {
    if (seeds.empty()) throw std::invalid_argument("piecewise kriging: no subregion seeds");
    std::vector<std::vector<int>> members(seeds.size());
    const std::vector<int> lab = voronoi_assign(seeds, std::span<const Point>(data.sites.points()));
    for (std::size_t i = 0; i < lab.size(); ++i)
        members[static_cast<std::size_t>(lab[i])].push_back(static_cast<int>(i));
    return members;
}

} // namespace

std::vector<MaternFit> fit_piecewise_exponential(const SpatialDataset& data, std::span<const Point> seeds,
                                                 double tau2, const FitOptions& opts) {
    const auto members = region_members(data, seeds);
    std::vector<MaternFit> fits;
    fits.reserve(seeds.size());
    FitOptions fo = opts;
    fo.fix_nu = true;
    fo.fixed_nu = 0.5;
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (members[k].size() < 10)
            throw std::invalid_argument("fit_piecewise_exponential: subregion " + std::to_string(k) +
                                        " has only " + std::to_string(members[k].size()) +
                                        " training sites (need at least 10)");
        std::vector<Point> pts;
        Eigen::VectorXd z(static_cast<Eigen::Index>(members[k].size()));
        pts.reserve(members[k].size());
        for (std::size_t i = 0; i < members[k].size(); ++i) {
            pts.push_back(data.sites[static_cast<std::size_t>(members[k][i])]);
            z[static_cast<Eigen::Index>(i)] = data.z[members[k][i]];
        }
        // Keep the global domain so the alpha search box does not shrink with
        // the subregion.
        SpatialDataset sub{SiteSet(std::move(pts), data.sites.domain()), std::move(z), tau2};
        fits.push_back(fit_matern_ml(sub, tau2, fo));
    }
    return fits;
}

PiecewiseKriging piecewise_krige(const SpatialDataset& data, std::span<const Point> seeds,
                                 std::span<const MaternFit> fits) {
    const auto members = region_members(data, seeds);
    if (fits.size() != seeds.size())
        throw std::invalid_argument("piecewise_krige: one fit per subregion required");
    std::vector<KrigingSystem> systems;
    systems.reserve(seeds.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        std::vector<Point> pts;
        Eigen::VectorXd z(static_cast<Eigen::Index>(members[k].size()));
        pts.reserve(members[k].size());
        for (std::size_t i = 0; i < members[k].size(); ++i) {
            pts.push_back(data.sites[static_cast<std::size_t>(members[k][i])]);
            z[static_cast<Eigen::Index>(i)] = data.z[members[k][i]];
        }
        CovarianceModel model(ExponentialParams{fits[k].sigma2, fits[k].alpha}, fits[k].tau2);
        systems.emplace_back(SiteSet(std::move(pts), data.sites.domain()), std::move(z), std::move(model));
    }
    return PiecewiseKriging({seeds.begin(), seeds.end()}, std::move(systems));
}

double rmspe(std::span<const double> predictions, std::span<const double> truths) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("rmspe: prediction and truth lengths differ");
    if (predictions.empty()) throw std::invalid_argument("rmspe: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - truths[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(predictions.size()));
}

double gaussian_crps(double mean, double sd, double z) {
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian_crps: sd must be positive");
    const double w = (z - mean) / sd;
    return sd * (w * (2.0 * norm_cdf(w) - 1.0) + 2.0 * norm_pdf(w) - 1.0 / std::sqrt(std::numbers::pi));
}

} // namespace spatseg
