/**
 * @file epsseries.hpp
 * @brief Truncated power series in eps and the order-by-order s_hat solve
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"
#include "perturbation.hpp"

namespace sspert {

/// a_0 + a_1 eps + ... + a_N eps^N, with everything above eps^N discarded.
class EpsPowerSeries {
public:
    explicit EpsPowerSeries(int order) : a_(checked_size(order), 0.0) {}

    EpsPowerSeries(std::initializer_list<double> coeffs) : a_(coeffs) {
        if (a_.empty()) throw ValidationError("eps series needs at least one coefficient");
    }

    explicit EpsPowerSeries(std::vector<double> coeffs) : a_(std::move(coeffs)) {
        if (a_.empty()) throw ValidationError("eps series needs at least one coefficient");
    }

    static EpsPowerSeries constant(double c, int order) {
        EpsPowerSeries s(order);
        s.a_[0] = c;
        return s;
    }

    int order() const noexcept { return static_cast<int>(a_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return a_; }
    double operator[](int n) const { return a_.at(static_cast<std::size_t>(n)); }
    double& operator[](int n) { return a_.at(static_cast<std::size_t>(n)); }

    double evaluate(double eps) const {
        double sum = 0.0;
        for (auto it = a_.rbegin(); it != a_.rend(); ++it) sum = sum * eps + *it;
        return sum;
    }

    EpsPowerSeries& operator+=(const EpsPowerSeries& b) {
        require_same_order(b);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
        return *this;
    }

    EpsPowerSeries& operator-=(const EpsPowerSeries& b) {
        require_same_order(b);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
        return *this;
    }

    EpsPowerSeries& operator*=(double k) {
        for (auto& x : a_) x *= k;
        return *this;
    }

    /// Truncated Cauchy product.
    EpsPowerSeries& operator*=(const EpsPowerSeries& b) {
        require_same_order(b);
        std::vector<double> out(a_.size(), 0.0);
        for (std::size_t n = 0; n < out.size(); ++n) {
            for (std::size_t i = 0; i <= n; ++i) out[n] += a_[i] * b.a_[n - i];
        }
        a_ = std::move(out);
        return *this;
    }

    friend EpsPowerSeries operator+(EpsPowerSeries a, const EpsPowerSeries& b) { return a += b; }
    friend EpsPowerSeries operator-(EpsPowerSeries a, const EpsPowerSeries& b) { return a -= b; }
    friend EpsPowerSeries operator*(EpsPowerSeries a, const EpsPowerSeries& b) { return a *= b; }
    friend EpsPowerSeries operator*(EpsPowerSeries a, double k) { return a *= k; }
    friend EpsPowerSeries operator*(double k, EpsPowerSeries a) { return a *= k; }
    friend EpsPowerSeries operator-(EpsPowerSeries a) { return a *= -1.0; }

    friend EpsPowerSeries operator+(EpsPowerSeries a, double c) {
        a.a_[0] += c;
        return a;
    }
    friend EpsPowerSeries operator-(EpsPowerSeries a, double c) {
        a.a_[0] -= c;
        return a;
    }
    friend EpsPowerSeries operator-(double c, EpsPowerSeries a) {
        a *= -1.0;
        a.a_[0] += c;
        return a;
    }

private:
    static std::size_t checked_size(int order) {
        if (order < 0) throw ValidationError("eps series order must be non-negative");
        return static_cast<std::size_t>(order) + 1;
    }

    void require_same_order(const EpsPowerSeries& b) const {
        if (b.a_.size() != a_.size()) {
            throw ValidationError("eps series truncation orders differ: " + std::to_string(order()) +
                                  " vs " + std::to_string(b.order()));
        }
    }

    std::vector<double> a_;
};

/// exp(a) via b' = a' b, i.e. n b_n = sum_{k=1}^{n} k a_k b_{n-k}; b_0 = exp(a_0).
inline EpsPowerSeries exp(const EpsPowerSeries& a) {
    EpsPowerSeries b(a.order());
    b[0] = std::exp(a[0]);
    if (!std::isfinite(b[0])) throw NumericalError("exp of eps series overflowed");
    for (int n = 1; n <= a.order(); ++n) {
        double sum = 0.0;
        for (int k = 1; k <= n; ++k) sum += k * a[k] * b[n - k];
        b[n] = sum / n;
    }
    return b;
}

/// sum_k L_k(tau) eps^k, truncated at `order`.
inline EpsPowerSeries tau_lbar_series(const EllExpansion& expansion, double tau, int order) {
    if (order > expansion.order()) {
        throw ValidationError("expansion order " + std::to_string(expansion.order()) +
                              " is below the requested series order " + std::to_string(order));
    }
    EpsPowerSeries s(order);
    for (int k = 0; k <= order; ++k) s[k] = evaluate(expansion.L(k), tau);
    return s;
}

/// LHS - RHS of  tau lbar s^2 = (l0 s - sigma2)(1 - exp(-s tau)) + sigma2 s tau,
/// with s = k_series and tau lbar taken from the expansion at fixed tau.
inline EpsPowerSeries equation_residual_series(const EpsPowerSeries& k_series,
                                               const EllExpansion& expansion, double tau) {
    const double l0 = expansion.l0();
    const double sigma2 = expansion.params().sigma2();
    const auto tlb = tau_lbar_series(expansion, tau, k_series.order());
    const auto lhs = tlb * k_series * k_series;
    const auto rhs = (l0 * k_series - sigma2) * (1.0 - exp(-tau * k_series)) +
                     (sigma2 * tau) * k_series;
    return lhs - rhs;
}

namespace detail {

/// I_j(a) = int_0^1 u^j e^{-a u} du for j = 0..jmax.
///
/// a <= 0: power series sum_i (-a)^i / (i! (i + j + 1)), all terms positive.
/// a > 0: backward recurrence I_{j-1} = (a I_j + e^{-a}) / j from far above
/// jmax, again a sum of positive terms, so start-up error only shrinks.
inline std::vector<double> exp_moments(double a, int jmax) {
    std::vector<double> out(static_cast<std::size_t>(jmax) + 1);
    if (a <= 0.0) {
        const double b = -a;
        for (int j = 0; j <= jmax; ++j) {
            double term = 1.0;  // b^i / i!
            double sum = 1.0 / (j + 1);
            for (int i = 1; i < 10000; ++i) {
                term *= b / i;
                const double add = term / (i + j + 1);
                sum += add;
                if (add <= 1e-18 * sum && i > b) break;
            }
            out[j] = sum;
        }
        return out;
    }
    const double decay = std::exp(-a);
    const int start = jmax + 60 + 2 * static_cast<int>(std::ceil(a));
    double value = decay / (start + 1);
    for (int j = start; j > 0; --j) {
        value = (a * value + decay) / j;
        if (j - 1 <= jmax) out[j - 1] = value;
    }
    return out;
}

/// Taylor coefficients at x0 of g1(x) = (1 - e^{-x}) / x and
/// g2(x) = (x - 1 + e^{-x}) / x^2, both entire:
///   g1(x0 + d) = sum_j (-1)^j/j! I_j(x0) d^j,
///   g2(x0 + d) = sum_j (-1)^j/j! (I_j(x0) - I_{j+1}(x0)) d^j.
struct KernelTaylor {
    std::vector<double> g1;
    std::vector<double> g2;
};

inline KernelTaylor kernel_taylor(double x0, int order) {
    const auto moments = exp_moments(x0, order + 1);
    KernelTaylor out{std::vector<double>(order + 1), std::vector<double>(order + 1)};
    double sign_over_factorial = 1.0;
    for (int j = 0; j <= order; ++j) {
        if (j > 0) sign_over_factorial *= -1.0 / j;
        out.g1[j] = sign_over_factorial * moments[j];
        out.g2[j] = sign_over_factorial * (moments[j] - moments[j + 1]);
    }
    return out;
}

/// sum_j coeffs[j] (x - x_0)^j for a series x.
inline EpsPowerSeries compose(std::span<const double> coeffs, const EpsPowerSeries& x) {
    auto shift = x;
    shift[0] = 0.0;
    auto out = EpsPowerSeries::constant(coeffs.back(), x.order());
    for (int j = static_cast<int>(coeffs.size()) - 2; j >= 0; --j) {
        out *= shift;
        out[0] += coeffs[j];
    }
    return out;
}

}  // namespace detail

/// Divided form of the s_hat equation:
///   l0 tau g1(s tau) + sigma2 tau^2 g2(s tau) - tau lbar.
///
/// It equals (RHS - LHS) / s^2 of the undivided equation, but has no s^2
/// factor and hence no cancellation between its two sides.
inline EpsPowerSeries divided_residual_series(const EpsPowerSeries& k_series,
                                              const EllExpansion& expansion, double tau) {
    const int order = k_series.order();
    const auto taylor = detail::kernel_taylor(k_series[0] * tau, order);
    const auto x = tau * k_series;
    const double l0 = expansion.l0();
    const double sigma2 = expansion.params().sigma2();
    return (l0 * tau) * detail::compose(taylor.g1, x) +
           (sigma2 * tau * tau) * detail::compose(taylor.g2, x) -
           tau_lbar_series(expansion, tau, order);
}

/// Slope of the divided form in s at s = k_0 = mu_hat.
inline double divided_slope(const EllExpansion& expansion, double tau) {
    const auto taylor = detail::kernel_taylor(expansion.params().mu_hat() * tau, 1);
    return tau * (expansion.l0() * tau * taylor.g1[1] +
                  expansion.params().sigma2() * tau * tau * taylor.g2[1]);
}

/// Coefficient multiplying k_n in every order-n balance of the undivided equation:
///   (l0 k0 - sigma2) e^{-k0 tau} tau + l0 (1 - e^{-k0 tau}) + sigma2 tau - 2 L_0 k0.
///
/// Evaluated as k0^2 times the divided slope, which is the same quantity
/// (the divided residual vanishes at order 0) without the cancellation
/// the displayed sum suffers.
inline double linear_bracket(const EllExpansion& expansion, double tau) {
    const double k0 = expansion.params().mu_hat();
    return k0 * k0 * divided_slope(expansion, tau);
}

/// The bracket summed term by term as displayed; cancellation-prone, kept for cross-checks.
inline double linear_bracket_direct(const EllExpansion& expansion, double tau) {
    const double k0 = expansion.params().mu_hat();
    const double l0 = expansion.l0();
    const double sigma2 = expansion.params().sigma2();
    const double L0 = evaluate(expansion.L(0), tau);
    return (l0 * k0 - sigma2) * std::exp(-k0 * tau) * tau - l0 * std::expm1(-k0 * tau) +
           sigma2 * tau - 2.0 * L0 * k0;
}

/// k_0 ... k_N of s_hat = sum k_n eps^n at one maturity.
struct ShatExpansion {
    double tau = 0.0;
    std::vector<double> k;
    double bracket = 0.0;
    /// rhs[n]: order-n residual of the undivided equation with k_n = 0.
    std::vector<double> rhs;
    /// residual[n]: order-n residual of the undivided equation for the returned series.
    std::vector<double> residual;

    int order() const noexcept { return static_cast<int>(k.size()) - 1; }

    /// Partial sum through `order`.
    double value(Epsilon eps, int order) const {
        if (order < 0 || order > this->order()) {
            throw ValidationError("s_hat partial-sum order out of range");
        }
        double sum = 0.0;
        for (int n = order; n >= 0; --n) sum = sum * eps.value + k[n];
        return sum;
    }
    double value(Epsilon eps) const { return value(eps, order()); }
};

/// Order-by-order solve of the s_hat equation.
///
/// k_0 = mu_hat. At order n the residual is affine in k_n and its order-n
/// coefficient with k_n = 0 is rhs_n = bracket * k_n; lower-order couplings
/// all come out of the series arithmetic, no per-order formula is hand-coded.
/// The balances are taken on the divided form (slope = bracket / k0^2):
/// the undivided form loses about four digits per order to cancellation.
inline ShatExpansion solve_shat_series(const EllExpansion& expansion, double tau, int order) {
    if (!(tau > 0.0)) throw ValidationError("solve_shat_series: tau must be positive");
    if (order < 0 || order > expansion.order()) {
        throw ValidationError("solve_shat_series: order must lie in [0, expansion order]");
    }
    const double k0 = expansion.params().mu_hat();
    const double l0 = expansion.l0();
    const double slope = divided_slope(expansion, tau);
    const double bracket = k0 * k0 * slope;
    const double L0 = evaluate(expansion.L(0), tau);
    const double threshold =
        1e-12 * std::max({std::abs(l0), expansion.params().sigma2() * tau, std::abs(L0 * k0)});
    if (!(std::abs(bracket) > threshold)) {
        throw SingularBracketError("linearized s_hat equation is singular at tau = " +
                                   std::to_string(tau));
    }

    ShatExpansion out;
    out.tau = tau;
    out.bracket = bracket;
    out.rhs.assign(order + 1, 0.0);

    auto k = EpsPowerSeries::constant(k0, order);
    for (int n = 1; n <= order; ++n) {
        // k_n is still zero here.
        out.rhs[n] = equation_residual_series(k, expansion, tau)[n];
        k[n] = -divided_residual_series(k, expansion, tau)[n] / slope;
    }
    const auto final_residual = equation_residual_series(k, expansion, tau);
    out.k.assign(k.coeffs().begin(), k.coeffs().end());
    out.residual.assign(final_residual.coeffs().begin(), final_residual.coeffs().end());
    for (double v : out.k) {
        if (!std::isfinite(v)) throw NumericalError("s_hat series coefficient is not finite");
    }
    return out;
}

/// The closed-form first-order right-hand side L_1(tau) k_0^2.
inline double rhs1_printed(const EllExpansion& expansion, double tau) {
    if (expansion.order() < 1) throw ValidationError("rhs1_printed needs an expansion of order >= 1");
    const double k0 = expansion.params().mu_hat();
    return evaluate(expansion.L(1), tau) * k0 * k0;
}

/// Per-order diagnostics: n,k,rhs,residual.
inline void write_diagnostics_csv(std::ostream& os, const ShatExpansion& s) {
    os << "n,k,rhs,residual\n";
    char buf[200];
    for (int n = 0; n <= s.order(); ++n) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", n, s.k[n], s.rhs[n], s.residual[n]);
        os << buf;
    }
}

}  // namespace sspert
