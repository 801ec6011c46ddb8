#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bscap/quadrature.hpp"

using namespace bscap;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const auto& r = quad::gauss_legendre<10>();
    for (int p = 0; p <= 19; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
        const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(s, exact, 1e-14) << "degree " << p;
    }
}

TEST(GaussHermite, MomentsMatchGaussianIntegrals) {
    for (int n : {4, 8, 24, 48}) {
        const auto r = quad::compute_gauss_hermite(n);
        ASSERT_EQ(static_cast<int>(r.nodes.size()), n);
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
            // int x^{2k} e^{-x^2} dx = Gamma(k + 1/2)
            const double exact = std::tgamma(k + 0.5);
            EXPECT_NEAR(s / exact, 1.0, 1e-11) << "n=" << n << " k=" << k;
        }
        for (int i = 1; i < n; ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
    }
}

TEST(Adaptive, KnownIntegrals) {
    auto r1 = quad::integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-14, 1e-15);
    EXPECT_NEAR(r1.value, std::sqrt(std::numbers::pi), 1e-13);
    auto r2 = quad::integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12, 1e-13);
    EXPECT_NEAR(r2.value, 2.0 / 3.0, 1e-11);
    auto r3 = quad::integrate_adaptive([](double x) { return x > 0 ? x * std::log(x) : 0.0; }, 0.0, 1.0, 1e-12, 1e-13);
    EXPECT_NEAR(r3.value, -0.25, 1e-11);
}

TEST(Adaptive, ReportsBudgetExhaustion) {
    auto f = [](double x) { return std::sin(1.0 / (x + 1e-6)); };
    EXPECT_THROW(quad::integrate_adaptive(f, 0.0, 1.0, 1e-14, 0.0, 20), IntegrationError);
    EXPECT_THROW(quad::integrate_adaptive(f, 1.0, 0.0), InvalidArgument);
}

TEST(CompositeGrid, WeightsSumToLength) {
    const auto g = quad::composite_grid(-1.5, 2.25, 0.1);
    double s = 0.0;
    for (double w : g.w) s += w;
    EXPECT_NEAR(s, 3.75, 1e-13);
    EXPECT_NEAR(quad::integrate_panels([](double x) { return std::cos(x); }, 0.0, 3.0, 0.5), std::sin(3.0), 1e-14);
}
