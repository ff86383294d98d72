#include "spatseg/covariance.hpp"

#include "spatseg/errors.hpp"
#include "spatseg/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spatseg {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

} // namespace

double exp_cov(double h, const ExponentialParams& p) {
    require_positive(p.sigma2, "exp_cov: sigma2");
    require_positive(p.alpha, "exp_cov: alpha");
    if (h < 0.0) throw std::invalid_argument("exp_cov: negative distance");
    return p.sigma2 * std::exp(-h / p.alpha);
}

double exp_semivariogram(double h, const ExponentialParams& p) {
    require_positive(p.sigma2, "exp_semivariogram: sigma2");
    require_positive(p.alpha, "exp_semivariogram: alpha");
    if (h < 0.0) throw std::invalid_argument("exp_semivariogram: negative distance");
    return p.sigma2 * (1.0 - std::exp(-h / p.alpha));
}

double matern_cov(double h, const MaternParams& p) {
    require_positive(p.sigma2, "matern_cov: sigma2");
    require_positive(p.alpha, "matern_cov: alpha");
    require_positive(p.nu, "matern_cov: nu");
    if (h < 0.0) throw std::invalid_argument("matern_cov: negative distance");
    if (h == 0.0) return p.sigma2;
    const double t = std::sqrt(2.0 * p.nu) * h / p.alpha;
    if (t > 700.0) return 0.0; // K_nu(t) underflows; correlation is numerically zero
    // t^nu K_nu(t) -> 2^(nu-1) Gamma(nu) as t -> 0; both factors stay
    // representable for the supported parameter ranges.
    const double v = std::pow(2.0, 1.0 - p.nu) / std::tgamma(p.nu) * std::pow(t, p.nu) * bessel_k(p.nu, t);
    return p.sigma2 * v;
}

namespace {

struct Sigma2x2 {
    // symmetric 2x2 matrix [[a, b], [b, c]]
    double a, b, c;
    double det() const { return a * c - b * b; }
};

Sigma2x2 local_anisotropy(Point s, double lambda) {
    const double arg = s.x / lambda + 0.75;
    if (!(arg > 0.0))
        throw std::domain_error("nonstat_matern_cov: log argument " + std::to_string(arg) +
                                " is non-positive at s = (" + std::to_string(s.x) + ", " +
                                std::to_string(s.y) + ")");
    const double L = std::log(arg);
    const double q = (s.x * s.x + s.y * s.y) / (lambda * lambda);
    if (L == 0.0 && q == 0.0)
        throw std::domain_error("nonstat_matern_cov: singular anisotropy matrix at s = (" +
                                std::to_string(s.x) + ", " + std::to_string(s.y) + ")");
    // A diag(1, 1/2) A' with A = [[L, -q], [q, L]]
    return {L * L + 0.5 * q * q, L * q - 0.5 * q * L, q * q + 0.5 * L * L};
}

} // namespace

double nonstat_matern_cov(Point s1, Point s2, const NonstatMaternParams& p) {
    require_positive(p.lambda, "nonstat_matern_cov: lambda");
    const Sigma2x2 S1 = local_anisotropy(s1, p.lambda);
    const Sigma2x2 S2 = local_anisotropy(s2, p.lambda);
    const Sigma2x2 M{0.5 * (S1.a + S2.a), 0.5 * (S1.b + S2.b), 0.5 * (S1.c + S2.c)};
    const double detM = M.det();
    if (!(detM > 0.0)) throw numerical_error("nonstat_matern_cov: averaged anisotropy is singular");
    const double dx = s1.x - s2.x, dy = s1.y - s2.y;
    // Q = 2 d' ((S1+S2)/2)^(-1) d / 2 ... i.e. with (S1+S2) = 2M:
    // Q = 2 d' (2M)^(-1) d = d' M^(-1) d
    const double quad = (M.c * dx * dx - 2.0 * M.b * dx * dy + M.a * dy * dy) / detM;
    const double pref = std::pow(S1.det(), 0.25) * std::pow(S2.det(), 0.25) / std::sqrt(detM);
    return pref * std::exp(-std::sqrt(quad));
}

double bivariate_exp_cov(double h, int k, int kprime, const BivariateExpParams& p) {
    require_positive(p.alpha1, "bivariate_exp_cov: alpha1");
    require_positive(p.alpha2, "bivariate_exp_cov: alpha2");
    if (h < 0.0) throw std::invalid_argument("bivariate_exp_cov: negative distance");
    if ((k != 1 && k != 2) || (kprime != 1 && kprime != 2))
        throw std::invalid_argument("bivariate_exp_cov: component indices must be 1 or 2");
    const double ak = (k == 1) ? p.alpha1 : p.alpha2;
    const double akp = (kprime == 1) ? p.alpha1 : p.alpha2;
    const double s = ak * ak + akp * akp;
    const double pref = std::sqrt(2.0 * ak * akp / s);
    const double rate = std::sqrt(s) / (std::numbers::sqrt2 * ak * akp);
    return pref * std::exp(-rate * h);
}

std::pair<double, double> blend_weights(Point s, const BlendedParams& p) {
    require_positive(p.a, "blend_weights: a");
    const double d1 = p.region1.distance_to(s);
    const double d2 = p.region2.distance_to(s);
    // Normalize via the smaller distance to avoid 0/0 underflow far away.
    const double dmin = std::min(d1, d2);
    const double e1 = std::exp(-(d1 - dmin) / p.a);
    const double e2 = std::exp(-(d2 - dmin) / p.a);
    return {e1 / (e1 + e2), e2 / (e1 + e2)};
}

double blended_cov(Point s1, Point s2, const BlendedParams& p) {
    const BivariateExpParams bp{p.alpha1, p.alpha2};
    const auto [w11, w12] = blend_weights(s1, p);
    const auto [w21, w22] = blend_weights(s2, p);
    const double h = distance(s1, s2);
    return w11 * w21 * bivariate_exp_cov(h, 1, 1, bp) + w11 * w22 * bivariate_exp_cov(h, 1, 2, bp) +
           w12 * w21 * bivariate_exp_cov(h, 2, 1, bp) + w12 * w22 * bivariate_exp_cov(h, 2, 2, bp);
}

CovarianceModel::CovarianceModel(Family family, double tau2) : family_(std::move(family)), tau2_(tau2) {
    if (!(tau2_ >= 0.0) || !std::isfinite(tau2_))
        throw std::invalid_argument("CovarianceModel: tau2 must be finite and non-negative");
}

double CovarianceModel::cov(Point a, Point b) const {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExponentialParams>)
                return exp_cov(distance(a, b), p);
            else if constexpr (std::is_same_v<T, MaternParams>)
                return matern_cov(distance(a, b), p);
            else if constexpr (std::is_same_v<T, NonstatMaternParams>)
                return nonstat_matern_cov(a, b, p);
            else
                return blended_cov(a, b, p);
        },
        family_);
}

double CovarianceModel::variance_at(Point s) const { return cov(s, s); }

const char* CovarianceModel::family_name() const {
    struct Visitor {
        const char* operator()(const ExponentialParams&) const { return "exponential"; }
        const char* operator()(const MaternParams&) const { return "matern"; }
        const char* operator()(const NonstatMaternParams&) const { return "nonstat_matern"; }
        const char* operator()(const BlendedParams&) const { return "blended"; }
    };
    return std::visit(Visitor{}, family_);
}

Eigen::MatrixXd build_cov_matrix(std::span<const Point> pts, const CovarianceModel& model) {
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    if (n == 0) throw std::invalid_argument("build_cov_matrix: empty point list");
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double c = model.cov(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
            S(i, j) = c;
            S(j, i) = c;
        }
        S(i, i) += model.tau2();
    }
    return S;
}

JitteredLLT jittered_llt(Eigen::MatrixXd a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw std::invalid_argument("jittered_llt: matrix must be square and non-empty");
    const double mean_diag = a.diagonal().mean();
    JitteredLLT out;
    out.llt.compute(a);
    out.attempts = 1;
    if (out.llt.info() == Eigen::Success) return out;
    double eps = 1e-12;
    for (int k = 0; k < 5; ++k) {
        a.diagonal().array() += eps * mean_diag - out.jitter;
        out.jitter = eps * mean_diag;
        out.llt.compute(a);
        ++out.attempts;
        if (out.llt.info() == Eigen::Success) return out;
        eps *= 10.0;
    }
    throw numerical_error("jittered_llt: matrix not positive definite after jitter " +
                          std::to_string(out.jitter) + " (mean diagonal " + std::to_string(mean_diag) +
                          ", size " + std::to_string(a.rows()) + ")");
}

} // namespace spatseg
