#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "isar/common.hpp"

namespace isar {

struct NelderMeadResult {
    VecXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). Stops when the simplex diameter falls below
/// `param_tol` in every coordinate or after `max_iter` iterations.
inline NelderMeadResult nelder_mead(const std::function<double(const VecXd&)>& f,
                                    const VecXd& start, const VecXd& step,
                                    double param_tol = 1e-6, int max_iter = 500) {
    const int n = static_cast<int>(start.size());
    std::vector<VecXd> x(n + 1, start);
    std::vector<double> fx(n + 1);
    for (int i = 0; i < n; ++i) x[i + 1](i) += step(i);
    for (int i = 0; i <= n; ++i) fx[i] = f(x[i]);

    NelderMeadResult result;
    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::vector<VecXd> xs(n + 1);
        std::vector<double> fs(n + 1);
        for (int i = 0; i <= n; ++i) { xs[i] = x[idx[i]]; fs[i] = fx[idx[i]]; }
        x = std::move(xs);
        fx = std::move(fs);
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        VecXd spread = VecXd::Zero(n);
        for (int i = 1; i <= n; ++i)
            spread = spread.cwiseMax((x[i] - x[0]).cwiseAbs());
        if ((spread.array() <= param_tol).all()) {
            result.converged = true;
            result.iterations = it;
            break;
        }

        VecXd centroid = VecXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += x[i];
        centroid /= n;

        const VecXd xr = centroid + (centroid - x[n]);
        const double fr = f(xr);
        if (fr < fx[0]) {
            const VecXd xe = centroid + 2.0 * (centroid - x[n]);
            const double fe = f(xe);
            if (fe < fr) { x[n] = xe; fx[n] = fe; }
            else { x[n] = xr; fx[n] = fr; }
        } else if (fr < fx[n - 1]) {
            x[n] = xr;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            const VecXd base = outside ? xr : x[n];
            const VecXd xc = centroid + 0.5 * (base - centroid);
            const double fc = f(xc);
            if (fc < std::min(fr, fx[n])) {
                x[n] = xc;
                fx[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    x[i] = x[0] + 0.5 * (x[i] - x[0]);
                    fx[i] = f(x[i]);
                }
            }
        }
        result.iterations = it + 1;
    }

    order();
    result.x = x[0];
    result.value = fx[0];
    return result;
}

}  // namespace isar
