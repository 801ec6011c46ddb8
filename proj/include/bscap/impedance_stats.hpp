#pragma once

// Distribution transforms between the reflection-coefficient plane and the
// impedance plane, with seed-deterministic samplers.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "bscap/core_model.hpp"
#include "bscap/error.hpp"
#include "bscap/region.hpp"

namespace bscap {

struct Circle {
    double center = 0.0;
    double radius = 0.0;
};

// Image in the z-plane of the circle |Gamma| = a.
inline Circle z_circle_from_gamma_circle(double a) {
    require(a >= 0.0 && a < 1.0, "circle radius must lie in [0, 1)");
    const double d = 1.0 - a * a;
    return {(1.0 + a * a) / d, 2.0 * a / d};
}

inline double wrap_two_pi(double v) {
    constexpr double tau = 2.0 * std::numbers::pi;
    v = std::fmod(v, tau);
    if (v < 0.0) v += tau;
    return v >= tau ? 0.0 : v;
}

// Angle of z(a e^{j theta}) seen from the image circle's centre.
inline double beta_angle(double theta, double a) {
    require(a >= 0.0 && a < 1.0, "circle radius must lie in [0, 1)");
    return wrap_two_pi(2.0 * std::atan2(std::sin(theta), std::cos(theta) - a) - theta);
}

inline double beta_derivative(double theta, double a) {
    return (1.0 - a * a) / (1.0 - 2.0 * a * std::cos(theta) + a * a);
}

// Inverse of beta_angle: map the circle point back through the Moebius map.
inline double theta_from_beta(double beta, double a) {
    if (a == 0.0) return wrap_two_pi(beta);
    const Circle c = z_circle_from_gamma_circle(a);
    const cplx z = c.center + std::polar(c.radius, beta);
    return wrap_two_pi(std::arg((z - 1.0) / (z + 1.0)));
}

// Density of beta given a, written in terms of theta.
inline double conditional_angle_pdf(double theta, double a) {
    require(a >= 0.0 && a < 1.0, "circle radius must lie in [0, 1)");
    return (1.0 - 2.0 * a * std::cos(theta) + a * a) / (2.0 * std::numbers::pi * (1.0 - a * a));
}

inline double conditional_angle_pdf_at_beta(double beta, double a) {
    return conditional_angle_pdf(theta_from_beta(beta, a), a);
}

// Reactance on the unit circle with uniform phase: standard Cauchy.
inline double reactance_pdf_unit_circle(double x) { return 1.0 / (std::numbers::pi * (1.0 + x * x)); }
inline double reactance_cdf_unit_circle(double x) { return 0.5 + std::atan(x) / std::numbers::pi; }

// Resistance for Gamma uniform on (-1, 1): standard Beta prime.
struct DensityAndCdf {
    double pdf = 0.0;
    double cdf = 0.0;
};

inline DensityAndCdf resistance_pdf_uniform_real(double r) {
    require(r >= 0.0, "resistance must be nonnegative");
    if (std::isinf(r)) return {0.0, 1.0};
    return {1.0 / ((1.0 + r) * (1.0 + r)), r / (1.0 + r)};
}

// Impedance density for Gamma uniform on the unit disk: the Jacobian of the
// conformal map is |dz/dGamma|^2 = 4 / |1 - Gamma|^4.
inline double z_pdf_uniform_disk(cplx z) {
    require(z.real() > 0.0, "impedance must lie in the open right half-plane");
    const double d = std::norm(1.0 - (z - 1.0) / (z + 1.0));
    return d * d / (4.0 * std::numbers::pi);
}

inline double max_entropy_reference(const GammaRegion& g) {
    const double a = g.area();
    require(a > 0.0 && std::isfinite(a), "region area must be positive");
    return std::log2(a);
}

// Samplers ------------------------------------------------------------------

inline std::vector<cplx> sample_uniform_region(const GammaRegion& g, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> out;
    out.reserve(n);
    std::size_t tries = 0;
    while (out.size() < n) {
        const cplx p(u(rng), u(rng));
        if (std::norm(p) <= 1.0 && g.contains(p)) out.push_back(p);
        if (++tries > 1000 * (n + 1000) && out.empty()) throw InvalidArgument("region appears to be empty");
    }
    return out;
}

inline std::vector<cplx> sample_uniform_disk(std::size_t n, std::uint64_t seed) {
    return sample_uniform_region(full_disk_region(), n, seed);
}

// beta for theta uniform on [0, 2 pi).
inline std::vector<double> sample_beta_angles(double a, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::vector<double> out(n);
    for (auto& b : out) b = beta_angle(u(rng), a);
    return out;
}

} // namespace bscap
