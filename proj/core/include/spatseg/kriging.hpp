#pragma once

#include "spatseg/covariance.hpp"
#include "spatseg/stat_test.hpp"
#include "spatseg/types.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace spatseg {

struct Prediction {
    double mean = 0.0;
    double variance = 0.0; // predictive variance of y(s0), data units squared
    int region = -1;       // subregion label in piecewise mode, -1 otherwise
};

// Ordinary kriging with nugget:
//   y_hat(s0) = (c + 1 (1 - 1' Sigma^-1 c) / (1' Sigma^-1 1))' Sigma^-1 z,
// where Sigma = cov(y) + tau2 I over the training sites and c(s0) excludes
// the nugget (the target is the smooth process y, not the noisy z). The
// factorization is computed once and shared across prediction points.
class KrigingSystem {
  public:
    KrigingSystem(SiteSet train, Eigen::VectorXd z, CovarianceModel model);

    Prediction predict(Point s0) const;
    // Lagrange-adjusted weight vector lambda with lambda' 1 = 1.
    Eigen::VectorXd weights(Point s0) const;

    std::size_t size() const { return train_.size(); }
    const SiteSet& train() const { return train_; }
    const Eigen::VectorXd& z() const { return z_; }
    const CovarianceModel& model() const { return model_; }

  private:
    Eigen::VectorXd cross_cov(Point s0) const;

    SiteSet train_;
    Eigen::VectorXd z_;
    CovarianceModel model_;
    JitteredLLT factor_;
    Eigen::VectorXd sinv_z_;   // Sigma^-1 z
    Eigen::VectorXd sinv_one_; // Sigma^-1 1
    double one_sinv_one_ = 0.0;
};

Prediction ordinary_krige(const KrigingSystem& system, Point s0);

// Piecewise-stationary kriging: the domain is partitioned into the Voronoi
// cells of `seeds`, and prediction at s0 uses only the training data and the
// fitted exponential model of the cell containing s0.
class PiecewiseKriging {
  public:
    PiecewiseKriging(std::vector<Point> seeds, std::vector<KrigingSystem> systems);

    Prediction predict(Point s0) const; // region = containing cell index
    std::size_t regions() const { return systems_.size(); }
    const std::vector<Point>& seeds() const { return seeds_; }
    const KrigingSystem& system(std::size_t k) const { return systems_[k]; }

  private:
    std::vector<Point> seeds_;
    std::vector<KrigingSystem> systems_;
};

// Independent exponential (nu = 1/2) profile-ML fits per subregion, with the
// global tau2 held fixed in every fit. Throws std::invalid_argument if any
// subregion holds fewer than 10 training sites.
std::vector<MaternFit> fit_piecewise_exponential(const SpatialDataset& data, std::span<const Point> seeds,
                                                 double tau2, const FitOptions& opts = {});

// Assembles the per-region kriging systems from per-region fits (exponential
// models with the fit's sigma2/alpha plus its tau2 nugget).
PiecewiseKriging piecewise_krige(const SpatialDataset& data, std::span<const Point> seeds,
                                 std::span<const MaternFit> fits);

// Root mean squared prediction error.
double rmspe(std::span<const double> predictions, std::span<const double> truths);

// Closed-form continuous ranked probability score of a Gaussian predictive
// distribution: sd [w (2 Phi(w) - 1) + 2 phi(w) - 1/sqrt(pi)], w = (z - mean)/sd.
double gaussian_crps(double mean, double sd, double z);

} // namespace spatseg
