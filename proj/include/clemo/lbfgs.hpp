#pragma once

// Limited-memory quasi-Newton descent with Armijo backtracking. Steps
// are accepted only on sufficient decrease, so the recorded value trace
// is strictly non-increasing. The composite losses minimized here are
// piecewise smooth (hinge terms); when the quasi-Newton direction fails
// the line search, the method falls back to steepest descent before
// declaring convergence.

#include <cmath>
#include <deque>
#include <functional>

#include "clemo/common.hpp"
#include "clemo/linalg.hpp"

namespace clemo {

struct MinimizeOptions {
    int max_iter = 1000;
    double tol = 1e-8;  // relative improvement threshold
    int history = 10;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
};

struct MinimizeResult {
    Vec x;
    Vec trace;  // objective at the start plus every accepted iterate
    int iterations = 0;
    bool converged = false;
};

/// Minimizes `value` from x0; `gradient` fills the gradient at a point.
/// The line search only evaluates `value`.
inline MinimizeResult minimize_lbfgs(const std::function<double(const Vec&)>& value,
                                     const std::function<void(const Vec&, Vec&)>& gradient, Vec x0,
                                     const MinimizeOptions& opt = {}) {
    const size_t n = x0.size();
    MinimizeResult res;
    res.x = std::move(x0);

    Vec g(n, 0.0), g_new(n, 0.0), d(n, 0.0), x_new(n, 0.0);
    double f = value(res.x);
    if (!std::isfinite(f)) throw contract_error("objective is not finite at the starting point");
    gradient(res.x, g);
    res.trace.push_back(f);

    std::deque<Vec> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax <= 1e-12 * std::max(1.0, std::abs(f))) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        d.assign(g.begin(), g.end());
        std::deque<double> alpha(s_hist.size());
        for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
            alpha[k] = rho_hist[k] * dot(s_hist[k], d);
            axpy(-alpha[k], y_hist[k], d);
        }
        if (!s_hist.empty()) {
            const double ys = dot(y_hist.back(), s_hist.back());
            const double yy = dot(y_hist.back(), y_hist.back());
            if (yy > 0.0) {
                const double scale = ys / yy;
                for (double& v : d) v *= scale;
            }
        }
        for (size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], d);
            axpy(alpha[k] - beta, s_hist[k], d);
        }
        for (double& v : d) v = -v;

        bool accepted = false;
        double f_new = f;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) {  // steepest-descent fallback
                for (size_t j = 0; j < n; ++j) d[j] = -g[j];
            }
            double gd = dot(g, d);
            if (gd >= 0.0) continue;
            double step = (iter == 0 || attempt == 1) ? std::min(1.0, 1.0 / std::max(1.0, norm2(g))) : 1.0;
            for (int bt = 0; bt < opt.max_backtracks; ++bt) {
                for (size_t j = 0; j < n; ++j) x_new[j] = res.x[j] + step * d[j];
                f_new = value(x_new);
                if (std::isfinite(f_new) && f_new <= f + opt.armijo_c * step * gd) {
                    accepted = true;
                    break;
                }
                step *= opt.backtrack;
            }
        }
        if (!accepted) {  // no descent available up to line-search resolution
            res.converged = true;
            break;
        }
        gradient(x_new, g_new);

        Vec s(n), y(n);
        for (size_t j = 0; j < n; ++j) {
            s[j] = x_new[j] - res.x[j];
            y[j] = g_new[j] - g[j];
        }
        const double ys = dot(s, y);
        if (ys > 1e-10 * norm2(s) * norm2(y)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / ys);
            if (static_cast<int>(s_hist.size()) > opt.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double improvement = (f - f_new) / std::max(1.0, std::abs(f));
        res.x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        res.trace.push_back(f);
        ++res.iterations;
        if (improvement < opt.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace clemo
