#pragma once

// APSK constellations built from the capacity-achieving circles, plus PSK
// and square QAM benchmarks.

#include <cmath>
#include <numbers>
#include <vector>

#include "bscap/capacity.hpp"
#include "bscap/input_laws.hpp"

namespace bscap {

struct ApskDesign {
    Snr design_snr;
    std::size_t k = 0;
    std::vector<std::size_t> ring_sizes;
    std::vector<double> ring_radii;
    std::vector<double> ring_probs;
    DiscreteConstellation constellation;
    bool solver_k_matched = true;  // false when K had to be fixed by hand
};

inline std::size_t apsk_ring_size(std::size_t k_total, std::size_t ring) {
    return 8 * (k_total - ring) + 4;  // ring counted from 1 (outermost)
}

inline std::size_t apsk_ring_count(std::size_t m) {
    const auto k = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(m) / 4.0)));
    require(k >= 1 && 4 * k * k == m, "APSK size must be of the form 4 K^2");
    return k;
}

// Points on ring k sit at angles 2 pi (i + 1/2) / M_k; even rings get a
// further rotation of pi / M_k.
inline DiscreteConstellation apsk_from_rings(const std::vector<double>& radii, const std::vector<double>& probs) {
    const std::size_t k_total = radii.size();
    require(k_total >= 1 && probs.size() == k_total, "ring parameters disagree");
    std::vector<cplx> pts;
    std::vector<double> q;
    for (std::size_t ring = 1; ring <= k_total; ++ring) {
        const std::size_t mk = apsk_ring_size(k_total, ring);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(mk);
        const double offset = 0.5 * step + (ring % 2 == 0 ? 0.5 * step : 0.0);
        for (std::size_t i = 0; i < mk; ++i) {
            pts.push_back(std::polar(radii[ring - 1], offset + step * static_cast<double>(i)));
            q.push_back(probs[ring - 1] / static_cast<double>(mk));
        }
    }
    return DiscreteConstellation(std::move(pts), std::move(q));
}

inline ApskDesign design_apsk(std::size_t m, Snr design_snr) {
    const std::size_t k = apsk_ring_count(m);
    ApskDesign d{design_snr, k, {}, {}, {}, DiscreteConstellation::uniform({cplx{1.0, 0.0}}), true};
    const auto cap = capacity_general(design_snr);
    const auto& law = std::get<DauipDistribution>(cap.input_law);
    if (law.k() == k) {
        d.ring_radii = law.radii();
        d.ring_probs = law.probs();
    } else {
        d.solver_k_matched = false;
        const auto fit = optimize_circles_fixed_k(design_snr, k);
        for (std::size_t i = 0; i < k; ++i) {
            d.ring_radii.push_back(std::sqrt(std::clamp(fit.state.sq_radii[i], 0.0, 1.0)));
            d.ring_probs.push_back(fit.state.probs[i]);
        }
    }
    for (std::size_t ring = 1; ring <= k; ++ring) d.ring_sizes.push_back(apsk_ring_size(k, ring));
    d.constellation = apsk_from_rings(d.ring_radii, d.ring_probs);
    return d;
}

inline DiscreteConstellation design_psk(std::size_t m) {
    require(m >= 2, "PSK needs at least two symbols");
    std::vector<cplx> pts;
    for (std::size_t i = 1; i <= m; ++i)
        pts.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (static_cast<double>(i) - 0.5) / static_cast<double>(m)));
    return DiscreteConstellation::uniform(std::move(pts));
}

// Square grid whose corners touch the unit circle.
inline DiscreteConstellation design_qam(std::size_t m) {
    const auto n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(m))));
    require(n >= 2 && n * n == m && n % 2 == 0, "QAM size must be an even square (4, 16, 64, 256, ...)");
    const double scale = 1.0 / (std::sqrt(2.0) * static_cast<double>(n - 1));
    std::vector<cplx> pts;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            pts.emplace_back(scale * (2.0 * static_cast<double>(i) - static_cast<double>(n - 1)),
                             scale * (2.0 * static_cast<double>(j) - static_cast<double>(n - 1)));
    return DiscreteConstellation::uniform(std::move(pts));
}

} // namespace bscap
