#pragma once

// Bound-constrained quasi-Newton minimizer (projected BFGS). Variables may
// carry lower/upper bounds (infinite for free variables); the inverse-Hessian
// model is restarted whenever the set of variables pinned at a bound changes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bscap/error.hpp"

namespace bscap::opt {

// Returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct Options {
    int max_iterations = 500;
    double f_tol = 1e-9;   // absolute decrease in f
    double x_tol = 1e-8;   // largest coordinate step
    double g_tol = 1e-11;  // projected-gradient infinity norm
    double max_step = 0.5; // cap on the first step after a model restart
};

struct Result {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

inline Result minimize(const Objective& fg, std::vector<double> x, const std::vector<double>& lo,
                       const std::vector<double>& hi, const Options& opt = {}) {
    const std::size_t n = x.size();
    require(lo.size() == n && hi.size() == n, "bound vectors must match the variable count");
    Result res;
    auto project = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    };
    project(x);
    std::vector<double> g(n), g_new(n), x_new(n), d(n), s(n), y(n);
    double f = fg(x, g);
    ++res.evaluations;
    if (n == 0) {
        res.x = std::move(x);
        res.f = f;
        res.converged = true;
        res.message = "no free variables";
        return res;
    }
    std::vector<double> h(n * n, 0.0);
    auto reset = [&](double scale) {
        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
    };
    bool fresh = true;
    reset(1.0);
    std::vector<char> free_prev(n, 2), free(n);

    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        double pg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool at_lo = x[i] <= lo[i] && g[i] > 0.0;
            const bool at_hi = x[i] >= hi[i] && g[i] < 0.0;
            free[i] = !(at_lo || at_hi);
            if (free[i]) pg = std::max(pg, std::abs(g[i]));
        }
        if (pg < opt.g_tol) {
            res.converged = true;
            res.message = "projected gradient below tolerance";
            break;
        }
        if (free != free_prev) {
            reset(1.0);
            fresh = true;
            free_prev = free;
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = 0.0;
            if (!free[i]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (free[j]) d[i] -= h[i * n + j] * g[j];
            slope += d[i] * g[i];
        }
        if (!(slope < 0.0)) {
            reset(1.0);
            fresh = true;
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = free[i] ? -g[i] : 0.0;
                slope += d[i] * g[i];
            }
        }
        double t = 1.0;
        if (fresh) {
            double dmax = 0.0;
            for (double v : d) dmax = std::max(dmax, std::abs(v));
            if (dmax > opt.max_step) t = opt.max_step / dmax;
        }
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
            project(x_new);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (x_new[i] - x[i]);
            f_new = fg(x_new, g_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * decrease && decrease <= 0.0) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!fresh) {
                reset(1.0);
                fresh = true;
                continue;
            }
            // No descent is possible at working precision.
            res.converged = true;
            res.message = "line search exhausted at numerical precision";
            break;
        }
        double step = 0.0, sy = 0.0, yy = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
            step = std::max(step, std::abs(s[i]));
            sy += s[i] * y[i];
            yy += y[i] * y[i];
            ss += s[i] * s[i];
        }
        const double df = f - f_new;
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
            if (fresh) reset(sy / yy);
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T
            const double r = 1.0 / sy;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * y[j];
            double yhy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h[i * n + j] += -r * (hy[i] * s[j] + s[i] * hy[j]) + (r * r * yhy + r) * s[i] * s[j];
            fresh = false;
        }
        if (df < opt.f_tol && step < opt.x_tol) {
            res.converged = true;
            res.message = "objective and step below tolerance";
            break;
        }
    }
    if (!res.converged) res.message = "iteration limit reached";
    res.x = std::move(x);
    res.f = f;
    return res;
}

// Central-difference gradient, used to cross-check analytic gradients.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Softmax with the first logit pinned to zero.
inline std::vector<double> softmax_tail(std::span<const double> tail_logits) {
    std::vector<double> p(tail_logits.size() + 1);
    double m = 0.0;
    for (double s : tail_logits) m = std::max(m, s);
    p[0] = std::exp(-m);
    double sum = p[0];
    for (std::size_t i = 0; i < tail_logits.size(); ++i) {
        p[i + 1] = std::exp(tail_logits[i] - m);
        sum += p[i + 1];
    }
    for (double& v : p) v /= sum;
    return p;
}

// Chain rule through softmax_tail: d/ds_i for i >= 1 given d/dp.
inline void softmax_tail_gradient(std::span<const double> p, std::span<const double> d_prob,
                                  std::span<double> d_logits) {
    double mean = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) mean += p[k] * d_prob[k];
    for (std::size_t i = 1; i < p.size(); ++i) d_logits[i - 1] = p[i] * (d_prob[i] - mean);
}

} // namespace bscap::opt
