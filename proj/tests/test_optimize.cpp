#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bscap/optimize.hpp"

using namespace bscap;

TEST(Minimize, RosenbrockInterior) {
    auto fg = [](std::span<const double> x, std::span<double> g) {
        const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
        g[0] = -2.0 * a - 400.0 * x[0] * b;
        g[1] = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    opt::Options o;
    o.max_iterations = 5000;
    o.f_tol = 1e-16;
    o.x_tol = 1e-12;
    const auto r = opt::minimize(fg, {-1.2, 1.0}, {-5.0, -5.0}, {5.0, 5.0}, o);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
    EXPECT_LT(r.f, 1e-10);
}

TEST(Minimize, ActiveBoundsAreRespected) {
    // Unconstrained minimum at (2, -3, 0.5); box [0,1]^3 pins the first two.
    auto fg = [](std::span<const double> x, std::span<double> g) {
        const double c[3] = {2.0, -3.0, 0.5};
        double f = 0.0;
        for (int i = 0; i < 3; ++i) {
            g[i] = 2.0 * (i + 1) * (x[i] - c[i]);
            f += (i + 1) * (x[i] - c[i]) * (x[i] - c[i]);
        }
        return f;
    };
    const auto r = opt::minimize(fg, {0.5, 0.5, 0.9}, {0, 0, 0}, {1, 1, 1});
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_NEAR(r.x[0], 1.0, 1e-12);
    EXPECT_NEAR(r.x[1], 0.0, 1e-12);
    EXPECT_NEAR(r.x[2], 0.5, 1e-6);
}

TEST(Minimize, StartOutsideBoxIsProjected) {
    auto fg = [](std::span<const double> x, std::span<double> g) {
        g[0] = 2.0 * x[0];
        return x[0] * x[0];
    };
    const auto r = opt::minimize(fg, {10.0}, {1.0}, {4.0});
    EXPECT_DOUBLE_EQ(r.x[0], 1.0);
}

TEST(Minimize, RejectsMismatchedBounds) {
    auto fg = [](std::span<const double>, std::span<double>) { return 0.0; };
    EXPECT_THROW(opt::minimize(fg, {0.0, 0.0}, {0.0}, {1.0, 1.0}), InvalidArgument);
}

TEST(NumericGradient, CentralDifferences) {
    auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(x[1]); };
    const auto g = opt::numeric_gradient(f, {0.3, -0.7});
    EXPECT_NEAR(g[0], std::cos(0.3) * std::exp(-0.7), 1e-9);
    EXPECT_NEAR(g[1], std::sin(0.3) * std::exp(-0.7), 1e-9);
}

TEST(Softmax, TailParameterizationAndGradient) {
    const std::vector<double> s{0.4, -1.3, 2.0};
    const auto p = opt::softmax_tail(s);
    ASSERT_EQ(p.size(), 4u);
    double sum = 0.0;
    for (double v : p) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_NEAR(std::log(p[1] / p[0]), 0.4, 1e-12);
    EXPECT_NEAR(std::log(p[3] / p[0]), 2.0, 1e-12);

    // Gradient of a linear functional of p through the softmax.
    const std::vector<double> c{0.7, -0.2, 1.5, 0.1};
    auto f = [&](std::span<const double> x) {
        const auto q = opt::softmax_tail(x);
        double v = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) v += c[i] * q[i] * q[i];
        return v;
    };
    std::vector<double> d_prob(4), dl(3);
    for (std::size_t i = 0; i < 4; ++i) d_prob[i] = 2.0 * c[i] * p[i];
    opt::softmax_tail_gradient(p, d_prob, dl);
    const auto fd = opt::numeric_gradient(f, s);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(dl[i], fd[i], 1e-8);
}

TEST(Softmax, LargeLogitsStayFinite) {
    const auto p = opt::softmax_tail(std::vector<double>{700.0, -700.0});
    EXPECT_NEAR(p[1], 1.0, 1e-15);
    EXPECT_GE(p[0], 0.0);
    EXPECT_GE(p[2], 0.0);
}
