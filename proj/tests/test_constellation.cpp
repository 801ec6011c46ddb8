#include <gtest/gtest.h>

#include <numbers>

#include "bscap/constellation.hpp"

using namespace bscap;

namespace {

constexpr double kPi = std::numbers::pi;

// SNR (dB) at which the capacity table reaches `rate`, by bisection.
double snr_for_rate(const CapacityTable& t, double rate, double lo_db, double hi_db) {
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo_db + hi_db);
        (t(Snr::from_db(mid).linear()) < rate ? lo_db : hi_db) = mid;
    }
    return 0.5 * (lo_db + hi_db);
}

} // namespace

TEST(Apsk, RingSizes) {
    EXPECT_EQ(apsk_ring_count(64), 4u);
    EXPECT_EQ(apsk_ring_count(16), 2u);
    const std::vector<std::size_t> r64{28, 20, 12, 4};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(apsk_ring_size(4, i + 1), r64[i]);
    EXPECT_EQ(apsk_ring_size(2, 1), 12u);
    EXPECT_EQ(apsk_ring_size(2, 2), 4u);
    for (std::size_t k = 1; k <= 16; ++k) {
        std::size_t sum = 0;
        for (std::size_t ring = 1; ring <= k; ++ring) sum += apsk_ring_size(k, ring);
        EXPECT_EQ(sum, 4 * k * k);
    }
    for (std::size_t bad : {0u, 8u, 60u, 65u}) EXPECT_THROW(apsk_ring_count(bad), InvalidArgument);
}

TEST(Apsk, GeometryFromRings) {
    const std::vector<double> radii{1.0, 0.7, 0.4, 0.1}, probs{0.4, 0.3, 0.2, 0.1};
    const auto c = apsk_from_rings(radii, probs);
    ASSERT_EQ(c.size(), 64u);
    std::size_t idx = 0;
    double total = 0.0;
    for (std::size_t ring = 1; ring <= 4; ++ring) {
        const std::size_t mk = apsk_ring_size(4, ring);
        const double step = 2.0 * kPi / static_cast<double>(mk);
        for (std::size_t i = 0; i < mk; ++i, ++idx) {
            const cplx p = c.points()[idx];
            EXPECT_NEAR(std::abs(p), radii[ring - 1], 1e-15);
            EXPECT_NEAR(c.probs()[idx], probs[ring - 1] / static_cast<double>(mk), 1e-15);
            total += c.probs()[idx];
            // Position relative to the unrotated half-step grid.
            double rel = std::fmod(std::arg(p) - 0.5 * step + 4.0 * kPi, step);
            if (rel > step - 1e-9) rel -= step;
            EXPECT_NEAR(rel, ring % 2 == 0 ? kPi / static_cast<double>(mk) : 0.0, 1e-9);
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (const auto& a : c.points())
        for (const auto& b : c.points()) EXPECT_LE(std::abs(a - b), 2.0 + 1e-15);
}

TEST(Apsk, Design64At15dB) {
    const Snr rho = Snr::from_db(15.0);
    const auto d = design_apsk(64, rho);
    EXPECT_EQ(d.k, 4u);
    EXPECT_EQ(d.ring_sizes, (std::vector<std::size_t>{28, 20, 12, 4}));
    EXPECT_EQ(d.ring_radii.front(), 1.0);
    const double cap = capacity_general(rho).rate;
    EXPECT_NEAR(cap, 4.179, 0.01);
    const double mi = mi_complex_discrete(d.constellation, rho);
    EXPECT_NEAR(mi, cap, 0.1);
    EXPECT_LE(mi, cap + 1e-6);
    EXPECT_GT(source_entropy(d.constellation.probs()), cap);
}

TEST(Apsk, MismatchedRingCountIsSolvedWithFixedK) {
    // At 3 dB the solver uses one circle; a 16-point design needs two rings.
    const auto d = design_apsk(16, Snr::from_db(3.0));
    EXPECT_FALSE(d.solver_k_matched);
    EXPECT_EQ(d.ring_radii.size(), 2u);
    EXPECT_EQ(d.constellation.size(), 16u);
    EXPECT_THROW(design_apsk(20, Snr::from_db(3.0)), InvalidArgument);
}

TEST(Psk, Convention) {
    const auto c = design_psk(2);
    EXPECT_NEAR(c.points()[0].real(), 0.0, 1e-15);
    EXPECT_NEAR(c.points()[0].imag(), 1.0, 1e-15);
    EXPECT_NEAR(c.points()[1].imag(), -1.0, 1e-15);
    EXPECT_THROW(design_psk(1), InvalidArgument);
    const auto c16 = design_psk(16);
    for (const auto& p : c16.points()) EXPECT_NEAR(std::abs(p), 1.0, 1e-15);
}

TEST(Psk, RatesAndRotation) {
    const Snr r12 = Snr::from_db(12.0);
    EXPECT_NEAR(mi_complex_discrete(design_psk(16), r12), capacity_reactive(r12).rate, 0.05);
    EXPECT_NEAR(mi_complex_discrete(design_psk(32), Snr::from_db(30.0)), 4.9995, 0.005);
    const auto c16 = design_psk(16);
    std::vector<cplx> shifted;
    for (const auto& p : c16.points()) shifted.push_back(p * std::polar(1.0, -kPi / 16.0));
    EXPECT_NEAR(mi_complex_discrete(DiscreteConstellation::uniform(shifted), r12),
                mi_complex_discrete(design_psk(16), r12), 1e-9);
}

TEST(Qam, Geometry) {
    const auto q4 = design_qam(4);
    for (const auto& p : q4.points()) {
        EXPECT_NEAR(std::abs(p), 1.0, 1e-15);
        EXPECT_NEAR(std::abs(p.real()), 1.0 / std::sqrt(2.0), 1e-15);
    }
    for (std::size_t m : {16u, 64u, 256u}) {
        const auto q = design_qam(m);
        double max_abs = 0.0, lo = 1.0, hi = -1.0;
        for (const auto& p : q.points()) {
            max_abs = std::max(max_abs, std::abs(p));
            lo = std::min(lo, p.real());
            hi = std::max(hi, p.real());
        }
        EXPECT_NEAR(max_abs, 1.0, 1e-15);
        EXPECT_NEAR((hi - lo) * (hi - lo), 2.0, 1e-14);
        const auto n = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
        for (std::size_t i = 1; i < n; ++i)
            EXPECT_NEAR(q.points()[i].imag() - q.points()[i - 1].imag(), (hi - lo) / static_cast<double>(n - 1), 1e-15);
    }
    for (std::size_t bad : {2u, 8u, 9u, 25u}) EXPECT_THROW(design_qam(bad), InvalidArgument);
}

TEST(Qam, PenaltyAgainstApskAt21dB) {
    const Snr rho = Snr::from_db(21.0);
    const auto apsk = design_apsk(256, rho);
    const double mi_apsk = mi_complex_discrete(apsk.constellation, rho);
    const double mi_qam = mi_complex_discrete(design_qam(256), rho);
    EXPECT_LT(mi_qam, mi_apsk);

    SweepConfig cfg;
    cfg.snr_db_end = 21.0;
    const auto table = CapacityTable::from_points(capacity_general_sweep(cfg));
    const double cap = table(rho.linear());
    // Shift of the capacity curve that explains the QAM loss.
    const double shift = 21.0 - snr_for_rate(table, cap - (mi_apsk - mi_qam), 0.0, 21.0);
    EXPECT_NEAR(shift, 10.0 * std::log10(kPi / 2.0), 0.3);
}
