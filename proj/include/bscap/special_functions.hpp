#pragma once

// Exponentially scaled modified Bessel functions and the first-order Marcum
// Q-function. Both Bessel routines work in scaled form throughout, so they
// stay finite for arguments where I0 itself overflows.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bscap/error.hpp"
#include "bscap/quadrature.hpp"

namespace bscap {

namespace detail {

inline constexpr double kSeriesLimit = 30.0;

// exp(-x) * sum_k (x^2/4)^k / (k! (k+nu)!) * (x/2)^nu  for nu in {0, 1}.
inline double scaled_bessel_series(int nu, double x) {
    const double q = 0.25 * x * x;
    double term = (nu == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-x);
}

// Hankel asymptotic expansion of I_nu(x) e^{-x}, truncated at the smallest term.
inline double scaled_bessel_asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

} // namespace detail

// g(x) = I0(x) e^{-x}.
inline double bessel_i0e(double x) {
    require(x >= 0.0 && !std::isnan(x), "bessel_i0e requires x >= 0");
    if (std::isinf(x)) return 0.0;
    return x < detail::kSeriesLimit ? detail::scaled_bessel_series(0, x) : detail::scaled_bessel_asymptotic(0, x);
}

// I1(x) e^{-x}.
inline double bessel_i1e(double x) {
    require(x >= 0.0 && !std::isnan(x), "bessel_i1e requires x >= 0");
    if (std::isinf(x)) return 0.0;
    return x < detail::kSeriesLimit ? detail::scaled_bessel_series(1, x) : detail::scaled_bessel_asymptotic(1, x);
}

// I1(x) e^{-x} / x, finite (1/2) at x = 0.
inline double bessel_i1e_over_x(double x) {
    require(x >= 0.0 && !std::isnan(x), "bessel_i1e_over_x requires x >= 0");
    if (x >= detail::kSeriesLimit) return bessel_i1e(x) / x;
    const double q = 0.25 * x * x;
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-x);
}

namespace detail {

// Rice density t exp(-(t^2+a^2)/2) I0(a t), written with the scaled Bessel.
inline double rice_density(double a, double t) {
    const double d = t - a;
    return t * std::exp(-0.5 * d * d) * bessel_i0e(a * t);
}

// Integrates the Rice density over the short side of b and returns the pair
// (Q1, 1 - Q1), each accurate in absolute terms.
struct MarcumPair {
    double q;
    double p;
};

inline MarcumPair marcum_pair(double a, double b) {
    require(a >= 0.0 && b >= 0.0 && std::isfinite(a) && std::isfinite(b),
            "Marcum Q requires finite nonnegative arguments");
    if (b == 0.0) return {1.0, 0.0};
    // exp(-40) relative cut-off on the Gaussian factor.
    const double reach = std::sqrt((b - a) * (b - a) + 80.0);
    if (b > a) {
        const double q = quad::integrate_panels([a](double t) { return rice_density(a, t); }, b, a + reach, 0.5);
        return {q, 1.0 - q};
    }
    const double lo = std::max(0.0, a - reach);
    if (lo >= b) return {1.0, 0.0};
    const double p = quad::integrate_panels([a](double t) { return rice_density(a, t); }, lo, b, 0.5);
    return {1.0 - p, p};
}

} // namespace detail

// Q1(a, b) = int_b^inf t exp(-(t^2+a^2)/2) I0(a t) dt.
inline double marcum_q1(double a, double b) {
    const double q = detail::marcum_pair(a, b).q;
    return std::clamp(q, 0.0, 1.0);
}

// 1 - Q1(a, b), accurate when Q1 is close to one.
inline double marcum_p1(double a, double b) {
    const double p = detail::marcum_pair(a, b).p;
    return std::clamp(p, 0.0, 1.0);
}

} // namespace bscap
