/**
 * @file perturbation.hpp
 * @brief Expansion of the consol-rate path and its integral in powers of eps
 */

#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expseries.hpp"
#include "params.hpp"

namespace sspert {

/// c_0(t) = sigma2/mu_hat + (l0 - sigma2/mu_hat) exp(-mu_hat t)
inline ExpPolySeries build_c0(const ModelParams& params, double l0) {
    const double c01 = params.sigma2() / params.mu_hat();
    const double c02 = l0 - c01;
    return ExpPolySeries({{c01, 0, 0.0}, {c02, 0, params.mu_hat()}}, params.rate_tolerance());
}

/// c_k(t) = -exp(-mu_hat t) int_0^t exp((mu_hat - m) s) c_{k-1}(s) ds
///
/// Equivalent to dc_k/dt = -mu_hat c_k - exp(-m t) c_{k-1}, c_k(0) = 0.
inline ExpPolySeries next_c(const ExpPolySeries& c_prev, const ModelParams& params) {
    const auto integrand = multiply_by_exp(c_prev, params.m() - params.mu_hat());
    return scale(multiply_by_exp(integrate_from_zero(integrand), params.mu_hat()), -1.0);
}

/// Closed-form coefficients of
///   l(t)         = c_0(t) + c_1(t) eps + ... + c_N(t) eps^N
///   tau lbar(tau) = L_0(tau) + L_1(tau) eps + ... + L_N(tau) eps^N
/// for one (params, l0). Built once, evaluated at any (eps, t).
class EllExpansion {
public:
    EllExpansion(ModelParams params, double l0, std::vector<ExpPolySeries> c,
                 std::vector<ExpPolySeries> L)
        : params_(std::move(params)), l0_(l0), c_(std::move(c)), L_(std::move(L)) {}

    int order() const noexcept { return static_cast<int>(c_.size()) - 1; }
    const ModelParams& params() const noexcept { return params_; }
    double l0() const noexcept { return l0_; }

    std::span<const ExpPolySeries> c() const noexcept { return c_; }
    std::span<const ExpPolySeries> L() const noexcept { return L_; }
    const ExpPolySeries& c(int k) const { return c_.at(static_cast<std::size_t>(k)); }
    const ExpPolySeries& L(int k) const { return L_.at(static_cast<std::size_t>(k)); }

private:
    ModelParams params_;
    double l0_;
    std::vector<ExpPolySeries> c_;
    std::vector<ExpPolySeries> L_;
};

inline EllExpansion build_expansion(const ModelParams& params, double l0, int order) {
    if (order < 0 || order > kMaxOrder) {
        throw ValidationError("expansion order must lie in [0, " + std::to_string(kMaxOrder) +
                              "], got " + std::to_string(order));
    }
    if (!std::isfinite(l0) || l0 < 0.0) {
        throw ValidationError("initial consol rate l0 must be finite and non-negative");
    }
    params.check_generic(order);

    std::vector<ExpPolySeries> c;
    std::vector<ExpPolySeries> L;
    c.reserve(order + 1);
    L.reserve(order + 1);
    c.push_back(build_c0(params, l0));
    for (int k = 1; k <= order; ++k) c.push_back(next_c(c.back(), params));
    for (const auto& ck : c) L.push_back(integrate_from_zero(ck));
    return EllExpansion(params, l0, std::move(c), std::move(L));
}

namespace detail {

inline double horner_in_eps(std::span<const ExpPolySeries> coeffs, int order, double eps,
                            double t) {
    if (order < 0 || order >= static_cast<int>(coeffs.size())) {
        throw ValidationError("requested order " + std::to_string(order) +
                              " exceeds the expansion order");
    }
    double sum = 0.0;
    for (int k = order; k >= 0; --k) sum = sum * eps + evaluate(coeffs[k], t);
    return sum;
}

}  // namespace detail

/// Truncated l(t) = sum_{k<=order} c_k(t) eps^k.
inline double eval_ell(const EllExpansion& expansion, Epsilon eps, double t, int order) {
    if (!(t >= 0.0)) throw ValidationError("eval_ell: t must be non-negative");
    return detail::horner_in_eps(expansion.c(), order, eps.value, t);
}

inline double eval_ell(const EllExpansion& expansion, Epsilon eps, double t) {
    return eval_ell(expansion, eps, t, expansion.order());
}

/// Truncated tau * lbar(tau) = sum_{k<=order} L_k(tau) eps^k.
inline double eval_tau_lbar(const EllExpansion& expansion, Epsilon eps, double tau, int order) {
    if (!(tau > 0.0)) throw ValidationError("eval_tau_lbar: tau must be positive");
    return detail::horner_in_eps(expansion.L(), order, eps.value, tau);
}

inline double eval_tau_lbar(const EllExpansion& expansion, Epsilon eps, double tau) {
    return eval_tau_lbar(expansion, eps, tau, expansion.order());
}

/// CSV dump of a coefficient family (c or L): k,power,rate,coeff.
inline void write_coefficients_csv(std::ostream& os, std::span<const ExpPolySeries> family) {
    os << "k,power,rate,coeff\n";
    char buf[160];
    for (std::size_t k = 0; k < family.size(); ++k) {
        for (const auto& t : family[k].terms()) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", k, t.power, t.rate, t.coeff);
            os << buf;
        }
    }
}

}  // namespace sspert
