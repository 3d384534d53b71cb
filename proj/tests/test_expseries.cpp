#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include <sspert/expseries.hpp>

#include "support/generators.hpp"

using namespace sspert;
using boost::math::quadrature::gauss_kronrod;

namespace {

double quad(const ExpPolySeries& s, double tau) {
    return gauss_kronrod<double, 61>::integrate([&](double t) { return evaluate(s, t); }, 0.0, tau, 8,
                                                1e-15);
}

double quad_abs(const ExpPolySeries& s, double tau) {
    return gauss_kronrod<double, 61>::integrate([&](double t) { return std::abs(evaluate(s, t)); }, 0.0,
                                                tau, 6, 1e-8);
}

void expect_same_terms(const ExpPolySeries& a, const ExpPolySeries& b, double scale) {
    const auto diff = combine(a, b, 1.0, -1.0);
    for (const auto& t : diff.terms()) {
        EXPECT_LE(std::abs(t.coeff), scale) << "t^" << t.power << " exp(-" << t.rate << " t)";
    }
}

}  // namespace

TEST(ExpSeries, CanonicalOrderingAndMerge) {
    ExpPolySeries s({{1.0, 1, 0.5}, {2.0, 0, 0.5}, {3.0, 0, 0.1}, {-2.0, 0, 0.5 + 1e-12}, {0.0, 2, 1.0}},
                    1e-9);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.terms()[0].power, 0);
    EXPECT_EQ(s.terms()[0].rate, 0.1);
    EXPECT_EQ(s.terms()[1].power, 1);
    EXPECT_FALSE(s.coefficient(0, 0.5).has_value());
    EXPECT_EQ(*s.coefficient(1, 0.5), 1.0);
}

TEST(ExpSeries, EvaluateExamples) {
    EXPECT_EQ(evaluate(ExpPolySeries{}, 3.0), 0.0);
    EXPECT_NEAR(evaluate(ExpPolySeries({{2.0, 0, 0.0}}), 7.0), 2.0, 1e-15);
    EXPECT_NEAR(evaluate(ExpPolySeries({{1.0, 1, 0.5}}), 2.0), 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(evaluate(ExpPolySeries({{-0.03, 0, 0.0}, {0.13, 0, -0.01}}), 1.0),
                -0.03 + 0.13 * std::exp(0.01), 1e-15);
    EXPECT_THROW(evaluate(ExpPolySeries({{1.0, 0, -1000.0}}), 10.0), NumericalError);
}

TEST(ExpSeries, IntegrateExamples) {
    // int_0^t e^{-2s} ds = 1/2 - e^{-2t}/2
    const auto f = integrate_from_zero(ExpPolySeries({{1.0, 0, 2.0}}));
    EXPECT_NEAR(*f.coefficient(0, 0.0), 0.5, 1e-16);
    EXPECT_NEAR(*f.coefficient(0, 2.0), -0.5, 1e-16);
    // int_0^t s e^{-s} ds = 1 - (1 + t) e^{-t}
    const auto g = integrate_from_zero(ExpPolySeries({{1.0, 1, 1.0}}));
    EXPECT_NEAR(*g.coefficient(0, 0.0), 1.0, 1e-16);
    EXPECT_NEAR(*g.coefficient(0, 1.0), -1.0, 1e-16);
    EXPECT_NEAR(*g.coefficient(1, 1.0), -1.0, 1e-16);
    // int_0^t 3 s^2 ds = t^3
    const auto h = integrate_from_zero(ExpPolySeries({{3.0, 2, 0.0}}));
    ASSERT_EQ(h.size(), 1u);
    EXPECT_NEAR(*h.coefficient(3, 0.0), 1.0, 1e-16);
    // growing exponential
    const auto k = integrate_from_zero(ExpPolySeries({{1.0, 0, -0.01}}));
    EXPECT_NEAR(evaluate(k, 1.0), std::expm1(0.01) / 0.01, 1e-12);
}

TEST(ExpSeries, DifferentiateExamples) {
    // d/dt [t^2 e^{-3t}] = 2t e^{-3t} - 3 t^2 e^{-3t}
    const auto d = differentiate(ExpPolySeries({{1.0, 2, 3.0}}));
    EXPECT_EQ(*d.coefficient(1, 3.0), 2.0);
    EXPECT_EQ(*d.coefficient(2, 3.0), -3.0);
    EXPECT_TRUE(differentiate(ExpPolySeries({{5.0, 0, 0.0}})).empty());
}

TEST(ExpSeries, CombineScaleShift) {
    const ExpPolySeries a({{1.0, 0, 0.5}, {2.0, 1, 0.0}});
    const ExpPolySeries b({{-1.0, 0, 0.5}, {1.0, 0, 1.0}});
    const auto c = combine(a, b, 1.0, 1.0);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_FALSE(c.coefficient(0, 0.5).has_value());
    EXPECT_EQ(*scale(a, -2.0).coefficient(1, 0.0), -4.0);
    const auto s = multiply_by_exp(a, 0.25);
    EXPECT_EQ(*s.coefficient(0, 0.75), 1.0);
    EXPECT_EQ(*s.coefficient(1, 0.25), 2.0);
    for (double t : {0.0, 0.3, 2.0}) EXPECT_NEAR(s(t), std::exp(-0.25 * t) * a(t), 1e-15);
}

TEST(ExpSeries, IntegralStartsAtZero) {
    auto g = gen::rng(3);
    const auto p = ModelParams::base_case();
    for (int i = 0; i < 50; ++i) {
        const auto F = integrate_from_zero(gen::random_lattice_series(g, p, 8, 4));
        // Constant and e^{-rt} parts cancel at t = 0; the error scales with them.
        double mass = 0.0;
        for (const auto& t : F.terms()) mass += t.power == 0 ? std::abs(t.coeff) : 0.0;
        EXPECT_NEAR(evaluate(F, 0.0), 0.0, 1e-14 * mass);
    }
}

TEST(ExpSeries, DifferentiateUndoesIntegrate) {
    auto g = gen::rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto p = gen::random_params(g);
        const auto s = gen::random_lattice_series(g, p, 8, 4);
        const auto F = integrate_from_zero(s);
        // Small rates give F coefficients near p!/r^{p+1}; rounding there sets the floor.
        double scale = 0.0;
        for (const auto& t : s.terms()) scale = std::max(scale, std::abs(t.coeff));
        for (const auto& t : F.terms()) scale = std::max(scale, std::abs(t.coeff) * (std::abs(t.rate) + t.power));
        expect_same_terms(differentiate(F), s, 1e-14 * scale);
    }
}

// The expansion only ever produces powers 0 and 1 on this lattice.
TEST(ExpSeries, IntegralMatchesQuadrature) {
    auto g = gen::rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto p = gen::random_params(g);
        const auto s = gen::random_lattice_series(g, p, 6, 1);
        const auto F = integrate_from_zero(s);
        for (double tau : {0.5, 1.0, 5.0, 30.0}) {
            const double exact = quad(s, tau);
            const double scale = std::max(std::abs(exact), quad_abs(s, tau));
            EXPECT_NEAR(evaluate(F, tau), exact, 1e-10 * scale) << "case " << i << " tau " << tau;
        }
    }
}

TEST(ExpSeries, HigherPowersMatchQuadrature) {
    auto g = gen::rng(8);
    std::uniform_int_distribution<int> power(0, 5), n_terms(1, 5);
    for (int i = 0; i < 50; ++i) {
        std::vector<ExpPolyTerm> terms;
        for (int k = n_terms(g); k > 0; --k) {
            terms.push_back({gen::uniform(g, -1.0, 1.0), power(g), gen::uniform(g, 0.2, 3.0)});
        }
        const ExpPolySeries s(std::move(terms));
        const auto F = integrate_from_zero(s);
        for (double tau : {0.5, 1.0, 5.0, 30.0}) {
            const double exact = quad(s, tau);
            const double scale = std::max(std::abs(exact), quad_abs(s, tau));
            EXPECT_NEAR(evaluate(F, tau), exact, 1e-10 * scale) << "case " << i << " tau " << tau;
        }
    }
}

TEST(ExpSeries, DegenerateRate) {
    const ExpPolySeries s({{1.0, 0, 1e-12}}, 1e-9);
    EXPECT_THROW(integrate_from_zero(s), DegenerateRateError);
    EXPECT_NO_THROW(integrate_from_zero(ExpPolySeries({{1.0, 0, 1e-12}})));
}

TEST(ExpSeries, RejectsBadTerms) {
    EXPECT_THROW(ExpPolySeries({{NAN, 0, 1.0}}), NumericalError);
    EXPECT_THROW(ExpPolySeries({{1.0, 0, INFINITY}}), NumericalError);
    EXPECT_THROW(ExpPolySeries({{1.0, -1, 1.0}}), ValidationError);
    EXPECT_THROW(ExpPolySeries({{1.0, kMaxPower + 1, 1.0}}), ValidationError);
}

TEST(ExpSeries, ToString) {
    const ExpPolySeries s({{0.5, 1, 0.72}, {-2.0, 0, 0.0}});
    EXPECT_EQ(to_string(s), "-2 * t^0 * exp(-0*t)\n0.5 * t^1 * exp(-0.71999999999999997*t)\n");
}
