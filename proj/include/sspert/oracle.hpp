/**
 * @file oracle.hpp
 * @brief Numerical reference values: RK4 path, quadrature and root finding
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"

namespace sspert {

/// Sampled l(t) on the integrator grid, plus A(tau) = int_0^tau l dt.
struct EllPath {
    std::vector<double> t;
    std::vector<double> ell;
    double tau_lbar = 0.0;
    int steps = 0;
};

inline int default_steps(double tau) {
    return std::max(1000, static_cast<int>(std::ceil(1000.0 * tau)));
}

/// Classical RK4 on (l, A):  l' = sigma2 - s(t) l,  A' = l,  A(0) = 0.
inline EllPath integrate_ell(const InitialState& state, const ModelParams& params, double tau,
                             int n_steps) {
    if (!(tau > 0.0)) throw ValidationError("integrate_ell: tau must be positive");
    if (n_steps < 16) throw ValidationError("integrate_ell: need at least 16 steps");

    const double sigma2 = params.sigma2();
    auto rhs = [&](double t, const std::array<double, 2>& y) {
        const double s = spread_path(state, params, t);
        return std::array<double, 2>{sigma2 - s * y[0], y[0]};
    };

    EllPath path;
    path.steps = n_steps;
    path.t.reserve(n_steps + 1);
    path.ell.reserve(n_steps + 1);

    const double h = tau / n_steps;
    std::array<double, 2> y{state.l0(), 0.0};
    path.t.push_back(0.0);
    path.ell.push_back(y[0]);
    for (int i = 0; i < n_steps; ++i) {
        const double t = i * h;
        const auto k1 = rhs(t, y);
        const auto k2 = rhs(t + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const auto k3 = rhs(t + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const auto k4 = rhs(t + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
            throw NumericalError("integrate_ell: state became non-finite");
        }
        path.t.push_back((i + 1 == n_steps) ? tau : (i + 1) * h);
        path.ell.push_back(y[0]);
    }
    path.tau_lbar = y[1];
    return path;
}

/// lbar when s0 = mu_hat:
/// (l0 mu_hat - sigma2)(1 - e^{-mu_hat tau}) / (mu_hat^2 tau) + sigma2 / mu_hat.
inline double abar_closed_s0_equals_muhat(const ModelParams& params, double l0, double tau) {
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    const double mh = params.mu_hat();
    const double sigma2 = params.sigma2();
    return -(l0 * mh - sigma2) * std::expm1(-mh * tau) / (mh * mh * tau) + sigma2 / mh;
}

namespace detail {

/// g1(x) = (1 - e^{-x}) / x and g2(x) = (x - 1 + e^{-x}) / x^2, with derivatives.
struct Kernels {
    double g1, g2, dg1, dg2;
};

inline Kernels kernels(double x) {
    Kernels k{};
    if (std::abs(x) < 1.0) {
        // g1 = sum (-x)^j/(j+1)!, g2 = sum (-x)^j/(j+2)!
        double p = 1.0;  // (-x)^j
        double f1 = 1.0; // 1/(j+1)!
        double f2 = 0.5; // 1/(j+2)!
        double dp = 0.0; // j (-x)^{j-1} (-1)
        for (int j = 0; j < 30; ++j) {
            k.g1 += p * f1;
            k.g2 += p * f2;
            k.dg1 += dp * f1;
            k.dg2 += dp * f2;
            dp = -(j + 1) * p;
            p *= -x;
            f1 /= j + 2;
            f2 /= j + 3;
        }
        return k;
    }
    const double e = std::exp(-x);
    k.g1 = -std::expm1(-x) / x;
    k.g2 = (1.0 - k.g1) / x;
    k.dg1 = (e - k.g1) / x;
    k.dg2 = (-k.dg1 - k.g2) / x;
    return k;
}

}  // namespace detail

/// Divided form of the s_hat equation, smooth through s = 0:
///   G(s) - tau lbar,  G(s) = l0 tau g1(s tau) + sigma2 tau^2 g2(s tau).
/// Returns {value, derivative}.
inline std::pair<double, double> shat_equation_divided(double s, double tau_lbar, double l0,
                                                       double sigma2, double tau) {
    const auto k = detail::kernels(s * tau);
    const double value = l0 * tau * k.g1 + sigma2 * tau * tau * k.g2 - tau_lbar;
    const double slope = tau * (l0 * tau * k.dg1 + sigma2 * tau * tau * k.dg2);
    return {value, slope};
}

/// LHS - RHS of  tau lbar s^2 = (l0 s - sigma2)(1 - e^{-s tau}) + sigma2 s tau.
inline double shat_equation_residual(double s, double tau_lbar, double l0, double sigma2,
                                     double tau) {
    return tau_lbar * s * s - ((l0 * s - sigma2) * (-std::expm1(-s * tau)) + sigma2 * s * tau);
}

inline constexpr double kRootTolerance = 1e-12;

struct OracleResult {
    double tau_lbar = 0.0;
    double s_hat = 0.0;
    int steps = 0;
    double residual = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
};

/// Root of the s_hat equation for a given tau lbar.
///
/// The undivided residual carries a factor s^2, so it has a spurious double
/// root at s = 0 and is flat near small s_hat. The search therefore runs on
/// the divided form and reports the undivided residual. Safeguarded Newton
/// inside a sign-change bracket; steps leaving the bracket become bisection.
inline OracleResult solve_shat_numeric(double tau_lbar, double l0, const ModelParams& params,
                                       double tau, Epsilon eps = {}) {
    if (!(tau > 0.0)) throw ValidationError("solve_shat_numeric: tau must be positive");
    if (!std::isfinite(tau_lbar)) throw ValidationError("solve_shat_numeric: tau_lbar must be finite");
    const double sigma2 = params.sigma2();
    auto f = [&](double s) { return shat_equation_divided(s, tau_lbar, l0, sigma2, tau); };

    const double centre = params.mu_hat();
    double half = 10.0 * (std::abs(eps.value) + sigma2 * tau + 0.01);
    double lo = centre - half;
    double hi = centre + half;
    double f_lo = f(lo).first;
    double f_hi = f(hi).first;
    for (int widen = 0; widen < 5 && !(f_lo * f_hi <= 0.0); ++widen) {
        half *= 2.0;
        lo = centre - half;
        hi = centre + half;
        f_lo = f(lo).first;
        f_hi = f(hi).first;
    }
    if (!(f_lo * f_hi <= 0.0)) {
        throw RootNotBracketedError("no sign change of the s_hat equation in [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]");
    }

    OracleResult out;
    out.tau_lbar = tau_lbar;
    out.bracket_lo = lo;
    out.bracket_hi = hi;

    double a = lo, b = hi, fa = f_lo;
    double x = std::clamp(centre, a, b);
    int it = 0;
    for (; it < 200; ++it) {
        const auto [fx, dfx] = f(x);
        if (fx == 0.0) break;
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)) ||
            b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            break;
        }
    }
    out.iterations = it;
    out.s_hat = x;
    out.residual = std::abs(shat_equation_residual(x, tau_lbar, l0, sigma2, tau));
    if (!(out.residual < kRootTolerance)) {
        throw NumericalError("solve_shat_numeric: residual " + std::to_string(out.residual) +
                             " above tolerance");
    }
    return out;
}

/// Full reference computation: RK4 for tau lbar, then the root solve.
inline OracleResult oracle_shat(const InitialState& state, const ModelParams& params, double tau,
                                int n_steps) {
    const auto path = integrate_ell(state, params, tau, n_steps);
    auto result = solve_shat_numeric(path.tau_lbar, state.l0(), params, tau, epsilon(state, params));
    result.steps = path.steps;
    return result;
}

inline OracleResult oracle_shat(const InitialState& state, const ModelParams& params, double tau) {
    return oracle_shat(state, params, tau, default_steps(tau));
}

}  // namespace sspert
