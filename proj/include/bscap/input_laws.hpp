#pragma once

// Input distributions of the reflection coefficient: concentric circles with
// uniform phase, finite complex constellations and finite real constellations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bscap/core_model.hpp"

namespace bscap {

namespace detail {

inline void check_probabilities(std::span<const double> probs, double tol, bool allow_zero) {
    require(!probs.empty(), "probability vector is empty");
    double sum = 0.0;
    for (double p : probs) {
        require(std::isfinite(p) && p <= 1.0 + tol && (allow_zero ? p >= 0.0 : p > 0.0),
                "probability out of range");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= tol, "probabilities do not sum to one");
}

inline std::vector<double> normalized(std::vector<double> probs) {
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    require(sum > 0.0 && std::isfinite(sum), "probabilities must have a positive finite sum");
    for (double& p : probs) p /= sum;
    return probs;
}

} // namespace detail

// Discrete amplitude, uniform independent phase: K circles of radius a_k
// chosen with probability p_k. The outermost circle is always the unit circle.
class DauipDistribution {
public:
    DauipDistribution(std::vector<double> radii, std::vector<double> probs)
        : radii_(std::move(radii)), probs_(std::move(probs)) {
        require(!radii_.empty() && radii_.size() == probs_.size(), "radii and probabilities must match in size");
        require(radii_.front() == 1.0, "the outermost radius must be 1");
        for (std::size_t k = 1; k < radii_.size(); ++k)
            require(radii_[k] >= 0.0 && radii_[k] < radii_[k - 1], "radii must be strictly descending in [0, 1]");
        detail::check_probabilities(probs_, 1e-12, false);
    }

    // Sorts, merges coincident circles, drops zero-mass circles and
    // renormalizes; used to turn raw optimizer output into a valid law.
    static DauipDistribution from_raw(std::vector<double> radii, std::vector<double> probs, double merge_tol = 1e-9) {
        require(radii.size() == probs.size() && !radii.empty(), "radii and probabilities must match in size");
        std::vector<std::size_t> order(radii.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto i, auto j) { return radii[i] > radii[j]; });
        std::vector<double> r, p;
        for (auto i : order) {
            const double a = std::clamp(radii[i], 0.0, 1.0);
            if (!r.empty() && r.back() - a <= merge_tol) {
                p.back() += probs[i];
            } else {
                r.push_back(a);
                p.push_back(probs[i]);
            }
        }
        r.front() = 1.0;
        std::vector<double> rr, pp;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (k == 0 || p[k] > 0.0) {
                rr.push_back(r[k]);
                pp.push_back(p[k]);
            }
        return DauipDistribution(std::move(rr), detail::normalized(std::move(pp)));
    }

    static DauipDistribution unit_circle() { return DauipDistribution({1.0}, {1.0}); }

    std::size_t k() const { return radii_.size(); }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    std::vector<double> radii_;
    std::vector<double> probs_;
};

class DiscreteConstellation {
public:
    DiscreteConstellation(std::vector<cplx> points, std::vector<double> probs, double prob_tol = 1e-12)
        : points_(std::move(points)), probs_(std::move(probs)) {
        require(!points_.empty(), "constellation is empty");
        require(points_.size() == probs_.size(), "points and probabilities must match in size");
        for (const auto& g : points_)
            require(std::isfinite(g.real()) && std::isfinite(g.imag()) && std::abs(g) <= 1.0 + kTolerance,
                    "constellation point outside the unit disk");
        detail::check_probabilities(probs_, prob_tol, true);
        probs_ = detail::normalized(std::move(probs_));
    }

    static DiscreteConstellation uniform(std::vector<cplx> points) {
        const std::size_t m = points.size();
        require(m > 0, "constellation is empty");
        return DiscreteConstellation(std::move(points), std::vector<double>(m, 1.0 / static_cast<double>(m)));
    }

    std::size_t size() const { return points_.size(); }
    const std::vector<cplx>& points() const { return points_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    std::vector<cplx> points_;
    std::vector<double> probs_;
};

class RealConstellation {
public:
    RealConstellation(std::vector<double> points, std::vector<double> probs)
        : points_(std::move(points)), probs_(std::move(probs)) {
        require(!points_.empty() && points_.size() == probs_.size(), "points and probabilities must match in size");
        for (std::size_t m = 0; m < points_.size(); ++m) {
            require(std::isfinite(points_[m]) && std::abs(points_[m]) <= 1.0 + kTolerance,
                    "real constellation point outside [-1, 1]");
            if (m > 0) require(points_[m] > points_[m - 1], "real constellation points must be ascending and distinct");
        }
        detail::check_probabilities(probs_, 1e-12, true);
    }

    std::size_t size() const { return points_.size(); }
    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    std::vector<double> points_;
    std::vector<double> probs_;
};

// H = -sum q log2 q with 0 log 0 = 0.
inline double source_entropy(std::span<const double> probs) {
    detail::check_probabilities(probs, 1e-9, true);
    double h = 0.0;
    for (double q : probs)
        if (q > 0.0) h -= q * std::log2(q);
    return std::max(0.0, h);
}

} // namespace bscap
