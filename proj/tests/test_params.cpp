#include <gtest/gtest.h>

#include <cmath>

#include <sspert/params.hpp>

#include "support/generators.hpp"

using namespace sspert;

TEST(MuHat, Examples) {
    EXPECT_DOUBLE_EQ(mu_hat(0.72, -0.01, 0.007, 0.0), -0.01);
    EXPECT_NEAR(mu_hat(0.5, -0.01, 0.01, 0.25), -0.015, 1e-17);
    EXPECT_DOUBLE_EQ(mu_hat(0.72, 0.02, 0.007, 0.0), 0.02);
    EXPECT_THROW(mu_hat(0.0, 0.01, 0.0, 0.0), ValidationError);
    EXPECT_THROW(mu_hat(-0.3, 0.01, 0.0, 0.0), ValidationError);
}

TEST(Epsilon, Examples) {
    const auto p = ModelParams::base_case();
    EXPECT_NEAR(epsilon(InitialState(0.05, 0.1), p).value, 0.06, 1e-17);
    EXPECT_NEAR(epsilon(InitialState(-0.05, 0.1), p).value, -0.04, 1e-17);
    EXPECT_EQ(epsilon(InitialState(-0.01, 0.1), p).value, 0.0);
}

TEST(SpreadPath, Examples) {
    const auto p = ModelParams::base_case();
    const InitialState st(0.05, 0.1);
    EXPECT_DOUBLE_EQ(spread_path(st, p, 0.0), 0.05);
    EXPECT_NEAR(spread_path(st, p, 10.0 / 0.72), -0.01 + 0.06 * std::exp(-10.0), 1e-15);
    EXPECT_NEAR(spread_path(st, p, 1.0), -0.01 + 0.06 * std::exp(-0.72), 1e-15);
    EXPECT_THROW(spread_path(st, p, -1.0), ValidationError);
}

TEST(SpreadPath, MatchesItsOdeOnRandomTimes) {
    auto g = gen::rng(11);
    const auto p = ModelParams::base_case();
    const InitialState st(0.05, 0.1);
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double t = gen::uniform(g, h, 20.0);
        const double ds = (spread_path(st, p, t + h) - spread_path(st, p, t - h)) / (2 * h);
        EXPECT_NEAR(ds, p.m() * (p.mu_hat() - spread_path(st, p, t)), 1e-8) << "t=" << t;
    }
}

TEST(SpreadPath, PositiveEpsilonDecaysMonotonically) {
    const auto p = ModelParams::base_case();
    const InitialState st(0.05, 0.1);
    double prev = spread_path(st, p, 0.0);
    for (int i = 1; i <= 200; ++i) {
        const double s = spread_path(st, p, 0.1 * i);
        EXPECT_LT(s, prev);
        EXPECT_GT(s, p.mu_hat());
        prev = s;
    }
}

TEST(ModelParams, RejectsNonGenericMuHat) {
    const double m = 0.72;
    for (int j = 1; j <= 3; ++j) {
        const double tol = 1e-8 * j * m;
        EXPECT_THROW(ModelParams(m, j * m + 0.5 * tol, 0.0, 0.0003, 0.0), ValidationError) << j;
        EXPECT_THROW(ModelParams(m, j * m - 0.5 * tol, 0.0, 0.0003, 0.0), ValidationError) << j;
        EXPECT_NO_THROW(ModelParams(m, j * m + 0.01, 0.0, 0.0003, 0.0)) << j;
    }
}

TEST(ModelParams, RejectsInvalid) {
    EXPECT_THROW(ModelParams(0.0, -0.01, 0.007, 0.0003, 0.0), ValidationError);
    EXPECT_THROW(ModelParams(-1.0, -0.01, 0.007, 0.0003, 0.0), ValidationError);
    EXPECT_THROW(ModelParams(0.72, -0.01, -0.007, 0.0003, 0.0), ValidationError);
    EXPECT_THROW(ModelParams(0.72, -0.01, 0.007, -0.0003, 0.0), ValidationError);
    EXPECT_THROW(ModelParams(0.72, 0.0, 0.0, 0.0003, 0.0), ValidationError);
    EXPECT_THROW(ModelParams(0.72, NAN, 0.007, 0.0003, 0.0), ValidationError);
    EXPECT_THROW(InitialState(0.0, -0.1), ValidationError);
    EXPECT_THROW(InitialState(INFINITY, 0.1), ValidationError);
    EXPECT_NO_THROW(InitialState(0.0, 0.0));
}

TEST(ModelParams, BaseCase) {
    const auto p = ModelParams::base_case();
    EXPECT_EQ(p.m(), 0.72);
    EXPECT_EQ(p.mu(), -0.01);
    EXPECT_EQ(p.gamma(), 0.007);
    EXPECT_EQ(p.sigma2(), 0.0003);
    EXPECT_EQ(p.lambda(), 0.0);
    EXPECT_EQ(p.mu_hat(), -0.01);
}
