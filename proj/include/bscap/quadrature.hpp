#pragma once

// Quadrature rules: fixed Gauss-Legendre panels, Gauss-Hermite, and an
// adaptive Gauss-Kronrod (7/15) integrator with a global error budget.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "bscap/error.hpp"

namespace bscap::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1], Newton iteration on P_n.
inline Rule compute_gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

template <int N>
const Rule& gauss_legendre() {
    static const Rule rule = compute_gauss_legendre(N);
    return rule;
}

// n-point Gauss-Hermite rule for weight exp(-x^2) on the real line.
inline Rule compute_gauss_hermite(int n) {
    require(n >= 1 && n <= 200, "Gauss-Hermite order out of range");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * r.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * r.nodes[1];
        else
            z = 2.0 * z - r.nodes[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
        }
        r.nodes[i] = z;
        r.nodes[n - 1 - i] = -z;
        r.weights[i] = 2.0 / (pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    std::reverse(r.nodes.begin(), r.nodes.end());
    std::reverse(r.weights.begin(), r.weights.end());
    return r;
}

// Nodes and weights of a composite 10-point Gauss-Legendre rule over [a, b]
// with panels no wider than max_width.
struct Grid {
    std::vector<double> x;
    std::vector<double> w;
};

inline Grid composite_grid(double a, double b, double max_width) {
    require(b > a && max_width > 0.0, "invalid integration grid");
    const auto& rule = gauss_legendre<10>();
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    const double h = (b - a) / panels;
    Grid g;
    g.x.reserve(panels * 10);
    g.w.reserve(panels * 10);
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            g.x.push_back(mid + 0.5 * h * rule.nodes[i]);
            g.w.push_back(0.5 * h * rule.weights[i]);
        }
    }
    return g;
}

// Composite Gauss-Legendre on [-half_width, half_width] with the weight
// exp(-x^2) folded into the weights. Unlike Gauss-Hermite it resolves
// integrands with sharp features a few units from the origin.
inline Rule gaussian_panel_rule(double half_width, double panel_width, int per_panel) {
    require(half_width > 0.0 && panel_width > 0.0 && per_panel >= 1, "invalid panel rule");
    const Rule base = compute_gauss_legendre(per_panel);
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * half_width / panel_width)));
    const double h = 2.0 * half_width / panels;
    Rule r;
    for (int p = 0; p < panels; ++p) {
        const double mid = -half_width + (p + 0.5) * h;
        for (int i = 0; i < per_panel; ++i) {
            const double x = mid + 0.5 * h * base.nodes[i];
            r.nodes.push_back(x);
            r.weights.push_back(0.5 * h * base.weights[i] * std::exp(-x * x));
        }
    }
    return r;
}

template <class F>
double integrate_panels(F&& f, double a, double b, double max_width) {
    const auto& rule = gauss_legendre<10>();
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        sum += 0.5 * h * s;
    }
    return sum;
}

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the center.
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, std::abs(kron - gauss)};
}

} // namespace detail

struct AdaptiveResult {
    double value;
    double error;
    int segments;
};

// Globally adaptive Gauss-Kronrod: bisects the segment with the largest
// error estimate until the summed estimate meets max(abs_tol, rel_tol*|I|).
// Throws IntegrationError when the segment budget runs out first.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-12,
                                  int max_segments = 4000) {
    require(std::isfinite(a) && std::isfinite(b) && b >= a, "invalid integration interval");
    if (a == b) return {0.0, 0.0, 0};
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    double total = first.value, err = first.error;
    heap.push(first);
    int count = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (count >= max_segments)
            throw IntegrationError("adaptive quadrature did not converge (error estimate " + std::to_string(err) + ")");
        const auto s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        const auto left = detail::gk15(f, s.a, mid);
        const auto right = detail::gk15(f, mid, s.b);
        total += left.value + right.value - s.value;
        err += left.error + right.error - s.error;
        heap.push(left);
        heap.push(right);
        ++count;
        if (!std::isfinite(total)) throw IntegrationError("integrand produced a non-finite value");
    }
    // Recompute the sums to shed accumulated round-off from the running updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {total, err, count};
}

} // namespace bscap::quad
