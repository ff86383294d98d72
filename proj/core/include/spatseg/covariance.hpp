#pragma once

#include "spatseg/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <span>
#include <variant>

namespace spatseg {

// Stationary isotropic exponential: C(h) = sigma2 exp(-h / alpha).
struct ExponentialParams {
    double sigma2 = 1.0;
    double alpha = 1.0;
};

// Stationary isotropic Matern with smoothness nu and range alpha:
// C(h) = sigma2 * 2^(1-nu)/Gamma(nu) * (sqrt(2 nu) h / alpha)^nu K_nu(sqrt(2 nu) h / alpha).
struct MaternParams {
    double sigma2 = 1.0;
    double alpha = 1.0;
    double nu = 0.5;
};

// Nonstationary Matern-type model driven by a spatially varying anisotropy
//   Sigma(s) = A(s) diag(1, 1/2) A(s)',  A(s) = [[L, -q], [q, L]],
//   L = log(s_x / lambda + 3/4),  q = ||s||^2 / lambda^2,
// with unit variance and correlation
//   |S1|^(1/4) |S2|^(1/4) |(S1+S2)/2|^(-1/2) exp(-sqrt(Q)),
//   Q = 2 (s1-s2)' (S1+S2)^(-1) (s1-s2).
// Larger lambda means a weaker departure from stationarity.
struct NonstatMaternParams {
    double lambda = 20.0;
};

// Bivariate exponential cross-covariance for a pair process (eta_1, eta_2):
// cov(eta_k(s), eta_k'(s*)) =
//   (2 a_k a_k' / (a_k^2 + a_k'^2))^(1/2) exp(-(a_k^2 + a_k'^2)^(1/2) h / (2^(1/2) a_k a_k')).
struct BivariateExpParams {
    double alpha1 = 0.1;
    double alpha2 = 0.1;
};

// Two-region blended process y(s) = w1(s) eta1(s) + w2(s) eta2(s) with
// w_k(s; a) proportional to exp(-d(s, region_k)/a) and (eta1, eta2) the
// bivariate exponential pair above. Stationary iff alpha1 == alpha2.
struct BlendedParams {
    double alpha1 = 0.1;
    double alpha2 = 0.5;
    double a = 0.01;
    Rect region1{0.0, 0.0, 0.5, 1.0};
    Rect region2{0.5, 0.0, 1.0, 1.0};
};

double exp_cov(double h, const ExponentialParams& p);
// Semivariogram gamma(h) = sigma2 (1 - exp(-h / alpha)) of the exponential model.
double exp_semivariogram(double h, const ExponentialParams& p);
double matern_cov(double h, const MaternParams& p);
// Throws std::domain_error when log(s_x/lambda + 3/4) is undefined or the
// local anisotropy matrix is singular at either location.
double nonstat_matern_cov(Point s1, Point s2, const NonstatMaternParams& p);
double bivariate_exp_cov(double h, int k, int kprime, const BivariateExpParams& p);
// Blend weights (w1, w2) at s.
std::pair<double, double> blend_weights(Point s, const BlendedParams& p);
double blended_cov(Point s1, Point s2, const BlendedParams& p);

// A tagged covariance model for observed data z = y + e: a family for the
// smooth process y plus a nugget variance tau2 for the measurement error e.
class CovarianceModel {
  public:
    using Family = std::variant<ExponentialParams, MaternParams, NonstatMaternParams, BlendedParams>;

    CovarianceModel(Family family, double tau2 = 0.0);

    // Covariance of the smooth process y between two locations (no nugget).
    double cov(Point a, Point b) const;
    // Marginal variance of y at s (= cov(s, s)).
    double variance_at(Point s) const;
    double tau2() const { return tau2_; }
    const Family& family() const { return family_; }
    const char* family_name() const;

  private:
    Family family_;
    double tau2_ = 0.0;
};

// Dense covariance matrix of z at the given points: cov(y) + tau2 I.
Eigen::MatrixXd build_cov_matrix(std::span<const Point> pts, const CovarianceModel& model);

// Cholesky with an escalating diagonal jitter ladder: on failure adds
// eps * mean(diag) with eps = 1e-12, 1e-11, ..., 1e-8 (at most 5 attempts),
// then throws numerical_error with a condition report.
struct JitteredLLT {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0; // absolute value added to the diagonal (0 if none)
    int attempts = 1;    // factorization attempts performed
};
JitteredLLT jittered_llt(Eigen::MatrixXd a);

} // namespace spatseg
