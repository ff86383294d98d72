#include "spatseg/special.hpp"

#include "spatseg/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spatseg {

namespace {

// Taylor coefficients of 1/Gamma(z) = sum_k c[k-1] z^k (Abramowitz & Stegun 6.1.34).
constexpr double kInvGammaCoef[26] = {
    1.0000000000000000e+00,  5.7721566490153286e-01, -6.5587807152025388e-01,
    -4.2002635034095236e-02, 1.6653861138229149e-01, -4.2197734555544337e-02,
    -9.6219715278769736e-03, 7.2189432466630995e-03, -1.1651675918590651e-03,
    -2.1524167411495097e-04, 1.2805028238811619e-04, -2.0134854780788239e-05,
    -1.2504934821426707e-06, 1.1330272319816959e-06, -2.0563384169776071e-07,
    6.1160951044814158e-09,  5.0020076444692229e-09, -1.1812745704870201e-09,
    1.0434267116911005e-10,  7.7822634399050712e-12, -3.6968056186422057e-12,
    5.1003702874544760e-13,  -2.0583260535665068e-14, -5.3481225394230180e-15,
    1.2267786282382608e-15,  -1.1812593016974588e-16};

// For |mu| <= 1/2 computes, without cancellation,
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// via the even/odd split of the 1/Gamma(1+x) = sum c[k] x^k series.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    const double mu2 = mu * mu;
    double g1 = 0.0, g2 = 0.0, p = 1.0;
    for (int j = 0; 2 * j + 1 < 26; ++j) {
        g2 += kInvGammaCoef[2 * j] * p;       // odd-index c_{2j+1} terms -> even powers
        g1 += kInvGammaCoef[2 * j + 1] * p;   // even-index c_{2j+2} terms
        p *= mu2;
        if (p < 1e-20) break;
    }
    gam1 = -g1;
    gam2 = g2;
    gampl = gam2 - mu * gam1; // 1/Gamma(1+mu)
    gammi = gam2 + mu * gam1; // 1/Gamma(1-mu)
}

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 1000;

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, 0 < x < 2 (Temme 1975).
void bessel_k_temme(double mu, double x, double& kmu, double& kmu1) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = (std::abs(pimu) < 1e-12) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = (std::abs(e) < 1e-12) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
        ff = (i * ff + p + q) / (i * i - mu * mu);
        c *= d / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw convergence_error("bessel_k: Temme series did not converge");
    kmu = sum;
    kmu1 = sum1 * (2.0 / x);
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, x >= 2 (Steed/Thompson-Barnett CF2).
void bessel_k_cf2(double mu, double x, double& kmu, double& kmu1) {
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) throw convergence_error("bessel_k: continued fraction did not converge");
    h = a1 * h;
    kmu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

} // namespace

double bessel_k(double nu, double x) {
    if (!std::isfinite(nu) || !std::isfinite(x))
        throw std::domain_error("bessel_k: non-finite argument");
    if (x <= 0.0) throw std::domain_error("bessel_k: requires x > 0, got x = " + std::to_string(x));
    nu = std::abs(nu); // K_{-nu} = K_{nu}
    const int nl = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - nl; // in [-1/2, 1/2]
    double kmu, kmu1;
    if (x < 2.0)
        bessel_k_temme(mu, x, kmu, kmu1);
    else
        bessel_k_cf2(mu, x, kmu, kmu1);
    for (int i = 1; i <= nl; ++i) {
        const double kt = (mu + i) * (2.0 / x) * kmu1 + kmu;
        kmu = kmu1;
        kmu1 = kt;
    }
    return kmu;
}

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

} // namespace spatseg
