/**
 * @file params.hpp
 * @brief Model constants, initial state and the deterministic spread path
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace sspert {

/// Largest supported expansion order.
inline constexpr int kMaxOrder = 16;

/// Risk-adjusted spread level mu - lambda * gamma / m.
inline double mu_hat(double m, double mu, double gamma, double lambda) {
    if (!(m > 0.0)) {
        throw ValidationError("mean-reversion speed m must be positive, got " + std::to_string(m));
    }
    return mu - lambda * gamma / m;
}

/// Spread/consol-rate model constants.
///
/// The spread follows ds = m (mu - s) dt + gamma dw1 and the consol rate
/// dl = beta dt + sigma sqrt(l) dw2. Only the deterministic part matters
/// here; gamma and lambda enter through the risk-adjusted level mu_hat.
///
/// Construction validates everything the expansion relies on, including
/// that mu_hat is not (within rate_tolerance()) an integer multiple j*m
/// for 1 <= j <= kMaxOrder. Every later coefficient denominator is of the
/// form mu_hat - j*m, mu_hat + j*m, j*m or mu_hat.
class ModelParams {
public:
    ModelParams(double m, double mu, double gamma, double sigma2, double lambda)
        : m_(m), mu_(mu), gamma_(gamma), sigma2_(sigma2), lambda_(lambda) {
        for (double v : {m, mu, gamma, sigma2, lambda}) {
            if (!std::isfinite(v)) {
                throw ValidationError("model parameters must be finite");
            }
        }
        if (gamma < 0.0) {
            throw ValidationError("spread volatility gamma must be non-negative");
        }
        if (sigma2 < 0.0) {
            throw ValidationError("sigma2 must be non-negative");
        }
        mu_hat_ = sspert::mu_hat(m, mu, gamma, lambda);
        rate_tol_ = 1e-8 * std::max(std::abs(mu_hat_), m_);
        if (std::abs(mu_hat_) <= rate_tol_) {
            throw ValidationError("risk-adjusted spread level mu_hat is zero; sigma2/mu_hat undefined");
        }
        check_generic(kMaxOrder);
    }

    /// m=0.72, mu=-0.01, gamma=0.007, sigma2=0.0003, lambda=0.
    static ModelParams base_case() { return {0.72, -0.01, 0.007, 0.0003, 0.0}; }

    double m() const noexcept { return m_; }
    double mu() const noexcept { return mu_; }
    double gamma() const noexcept { return gamma_; }
    double sigma2() const noexcept { return sigma2_; }
    double lambda() const noexcept { return lambda_; }
    double mu_hat() const noexcept { return mu_hat_; }

    /// Scale below which two exponential rates are considered equal.
    double rate_tolerance() const noexcept { return rate_tol_; }

    /// Throws if mu_hat collides with j*m for some 1 <= j <= max_multiple.
    void check_generic(int max_multiple) const {
        for (int j = 1; j <= max_multiple; ++j) {
            if (std::abs(mu_hat_ - j * m_) <= rate_tol_) {
                throw ValidationError("mu_hat is an integer multiple of m (j = " + std::to_string(j) +
                                      "); expansion coefficients are undefined");
            }
        }
    }

private:
    double m_;
    double mu_;
    double gamma_;
    double sigma2_;
    double lambda_;
    double mu_hat_ = 0.0;
    double rate_tol_ = 0.0;
};

/// Spread and consol rate at valuation time.
class InitialState {
public:
    InitialState(double s0, double l0) : s0_(s0), l0_(l0) {
        if (!std::isfinite(s0) || !std::isfinite(l0)) {
            throw ValidationError("initial state must be finite");
        }
        // l0 = 0 is admitted so that the zero-dynamics case (sigma2 = l0 = 0)
        // stays representable; the s_hat solvers reject it via the bracket.
        if (l0 < 0.0) {
            throw ValidationError("initial consol rate l0 must be non-negative");
        }
    }

    double s0() const noexcept { return s0_; }
    double l0() const noexcept { return l0_; }

private:
    double s0_;
    double l0_;
};

/// Small parameter s0 - mu_hat.
struct Epsilon {
    double value = 0.0;
};

inline Epsilon epsilon(const InitialState& state, const ModelParams& params) {
    return Epsilon{state.s0() - params.mu_hat()};
}

/// s(t) = mu_hat + eps * exp(-m t), the solution of ds = m (mu_hat - s) dt.
inline double spread_path(const InitialState& state, const ModelParams& params, double t) {
    if (!(t >= 0.0)) {
        throw ValidationError("spread_path: time must be non-negative");
    }
    return params.mu_hat() + epsilon(state, params).value * std::exp(-params.m() * t);
}

}  // namespace sspert
