#pragma once

// Subsets of the unit disk that a constrained load can reach, their areas,
// and the resulting rate loss estimates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bscap/core_model.hpp"
#include "bscap/error.hpp"

namespace bscap {

inline constexpr int kRegionGrid = 2048;

namespace detail {

// Midpoint-rule area of {g in disk : pred(g)} on an n x n grid of [-1,1]^2.
inline double grid_area(const std::function<bool(cplx)>& pred, int n) {
    require(n >= 2, "grid size must be at least two");
    const double h = 2.0 / n;
    long count = 0;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + (i + 0.5) * h;
        for (int k = 0; k < n; ++k) {
            const double y = -1.0 + (k + 0.5) * h;
            if (x * x + y * y <= 1.0 && pred({x, y})) ++count;
        }
    }
    return static_cast<double>(count) * h * h;
}

inline double cross(cplx o, cplx a, cplx b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Largest pairwise distance of a point set via its convex hull.
inline double diameter(std::vector<cplx> pts) {
    if (pts.size() < 2) return 0.0;
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<cplx> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, std::abs(hull[i] - hull[j]));
    return best;
}

} // namespace detail

class GammaRegion {
public:
    using Predicate = std::function<bool(cplx)>;

    GammaRegion(Predicate contains, std::string name = "region", std::optional<double> d_max = std::nullopt)
        : contains_(std::move(contains)), name_(std::move(name)), cache_(std::make_shared<Cache>()) {
        require(static_cast<bool>(contains_), "region predicate is empty");
        if (d_max) {
            require(*d_max >= 0.0 && *d_max <= 2.0, "d_max must lie in [0, 2]");
            cache_->d_max = d_max;
        }
    }

    bool contains(cplx g) const { return std::abs(g) <= 1.0 + kTolerance && contains_(g); }
    const std::string& name() const { return name_; }

    double area() const {
        if (!cache_->area) cache_->area = detail::grid_area(contains_, kRegionGrid);
        return *cache_->area;
    }

    // From member grid points and member points of the unit circle.
    double d_max() const {
        if (!cache_->d_max) {
            std::vector<cplx> pts;
            const int n = 512;
            const double h = 2.0 / n;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    const cplx g(-1.0 + (i + 0.5) * h, -1.0 + (k + 0.5) * h);
                    if (std::norm(g) <= 1.0 && contains_(g)) pts.push_back(g);
                }
            for (int i = 0; i < 8192; ++i) {
                const cplx g = std::polar(1.0, 2.0 * std::numbers::pi * i / 8192.0);
                if (contains_(g)) pts.push_back(g);
            }
            cache_->d_max = std::min(2.0, detail::diameter(std::move(pts)));
        }
        return *cache_->d_max;
    }

private:
    struct Cache {
        std::optional<double> area;
        std::optional<double> d_max;
    };
    Predicate contains_;
    std::string name_;
    std::shared_ptr<Cache> cache_;
};

inline GammaRegion full_disk_region() {
    return GammaRegion([](cplx) { return true; }, "full disk", 2.0);
}

inline GammaRegion half_disk_region() {
    return GammaRegion([](cplx g) { return g.imag() >= 0.0; }, "half disk", 2.0);
}

inline GammaRegion inscribed_square_region() {
    const double s = 1.0 / std::numbers::sqrt2;
    return GammaRegion([s](cplx g) { return std::abs(g.real()) <= s && std::abs(g.imag()) <= s; }, "inscribed square",
                       2.0);
}

struct ReactanceBandConstraint {
    double delta = 0.25;    // fractional capacitance range
    double q_factor = 10.0; // coil Q-factor x_T

    void validate() const {
        require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
        require(q_factor > 0.0 && std::isfinite(q_factor), "Q-factor must be positive");
    }
    double x_low() const { return -delta / (1.0 - delta) * q_factor; }
    double x_high() const { return delta / (1.0 + delta) * q_factor; }
};

// Loads with free resistance and reactance confined to the band.
inline GammaRegion region_from_reactance_band(const ReactanceBandConstraint& c) {
    c.validate();
    const double lo = c.x_low(), hi = c.x_high();
    auto pred = [lo, hi](cplx g) {
        const cplx den = 1.0 - g;
        if (std::norm(den) == 0.0) return false;
        const double x = ((1.0 + g) / den).imag();
        return x >= lo && x <= hi;
    };
    // The real segment [-1, 1] is always attainable.
    return GammaRegion(pred, "reactance band", 2.0);
}

inline double region_area(const GammaRegion& g) { return g.area(); }

struct AreaEstimate {
    double area = 0.0;
    double stderr_ = 0.0;
};

inline AreaEstimate region_area_monte_carlo(const GammaRegion& g, std::size_t n, std::uint64_t seed) {
    require(n > 0, "sample count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx p(u(rng), u(rng));
        if (std::norm(p) <= 1.0 && g.contains(p)) ++hit;
    }
    const double f = static_cast<double>(hit) / static_cast<double>(n);
    return {4.0 * f, 4.0 * std::sqrt(f * (1.0 - f) / static_cast<double>(n))};
}

inline double excluded_area_fraction(const GammaRegion& g) { return 1.0 - g.area() / std::numbers::pi; }

inline double high_snr_rate_loss(const GammaRegion& g) {
    const double a = g.area();
    require(a > 0.0, "region has zero area");
    return std::max(0.0, std::log2(std::numbers::pi / a));
}

inline double low_snr_rate(const GammaRegion& g, Snr rho) {
    const double h = 0.5 * g.d_max();
    return h * h * rho.linear() * kLog2e;
}

inline double constrained_rate_lower_bound(const GammaRegion& g, Snr rho) {
    const double a = g.area();
    require(a > 0.0, "region has zero area");
    return std::log2(1.0 + a / std::numbers::pi * rho.linear() / std::numbers::e);
}

// Finds x_T such that the band for `delta` excludes `target_fraction` of the
// disk. The excluded area shrinks as x_T grows.
inline double calibrate_q_factor(double delta, double target_fraction, double lo = 0.01, double hi = 1000.0) {
    require(target_fraction > 0.0 && target_fraction < 1.0, "target fraction must lie in (0, 1)");
    auto frac = [delta](double q) { return excluded_area_fraction(region_from_reactance_band({delta, q})); };
    require(frac(lo) > target_fraction && frac(hi) < target_fraction, "calibration target not bracketed");
    for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-10; ++it) {
        const double mid = std::sqrt(lo * hi);
        (frac(mid) > target_fraction ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

} // namespace bscap
