#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spatseg {

struct NelderMeadOptions {
    double xtol = 1e-6;  // max inf-norm spread of the simplex around its best vertex
    double ftol = 1e-12; // absolute spread of function values
    int max_evals = 400;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
    int evals = 0;
    bool converged = false;
};

// Derivative-free simplex minimization (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2). Infinite objective values are handled (used
// as out-of-bounds penalties); the initial point must be finite-valued.
template <class F>
NelderMeadResult nelder_mead(F&& func, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const NelderMeadOptions& opts = {}) {
    const int d = static_cast<int>(x0.size());
    if (d < 1 || step.size() != x0.size())
        throw std::invalid_argument("nelder_mead: dimension mismatch");

    NelderMeadResult res;
    std::vector<Eigen::VectorXd> v(static_cast<std::size_t>(d) + 1, x0);
    std::vector<double> fv(static_cast<std::size_t>(d) + 1);
    auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evals;
        return func(x);
    };
    fv[0] = eval(v[0]);
    if (!std::isfinite(fv[0])) throw std::invalid_argument("nelder_mead: initial point is infeasible");
    for (int i = 0; i < d; ++i) {
        v[static_cast<std::size_t>(i) + 1](i) += step(i);
        fv[static_cast<std::size_t>(i) + 1] = eval(v[static_cast<std::size_t>(i) + 1]);
    }
    std::vector<std::size_t> ord(v.size());

    auto sort_simplex = [&] {
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Eigen::VectorXd> v2(v.size());
        std::vector<double> f2(fv.size());
        for (std::size_t i = 0; i < ord.size(); ++i) {
            v2[i] = v[ord[i]];
            f2[i] = fv[ord[i]];
        }
        v.swap(v2);
        fv.swap(f2);
    };

    sort_simplex();
    while (res.evals < opts.max_evals) {
        double spread_x = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i)
            spread_x = std::max(spread_x, (v[i] - v[0]).template lpNorm<Eigen::Infinity>());
        const double spread_f = std::isfinite(fv.back()) ? fv.back() - fv.front()
                                                         : std::numeric_limits<double>::infinity();
        if (spread_x <= opts.xtol || spread_f <= opts.ftol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) centroid += v[i];
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd xr = centroid + (centroid - v.back());
        const double fr = eval(xr);
        if (fr < fv[0]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - v.back());
            const double fe = eval(xe);
            if (fe < fr) {
                v.back() = xe;
                fv.back() = fe;
            } else {
                v.back() = xr;
                fv.back() = fr;
            }
        } else if (fr < fv[fv.size() - 2]) {
            v.back() = xr;
            fv.back() = fr;
        } else {
            const bool outside = fr < fv.back();
            const double side = outside ? 0.5 : -0.5;
            const Eigen::VectorXd xc = centroid + side * (centroid - v.back());
            const double fc = eval(xc);
            if (fc < std::min(fr, fv.back())) {
                v.back() = xc;
                fv.back() = fc;
            } else {
                for (std::size_t i = 1; i < v.size(); ++i) {
                    v[i] = v[0] + 0.5 * (v[i] - v[0]);
                    fv[i] = eval(v[i]);
                }
            }
        }
        sort_simplex();
    }
    res.x = v[0];
    res.f = fv[0];
    return res;
}

} // namespace spatseg
