/**
 * @file expseries.hpp
 * @brief Closed-form algebra on finite sums of coeff * t^p * exp(-rate * t)
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"

namespace sspert {

/// Largest polynomial power a term may carry.
inline constexpr int kMaxPower = kMaxOrder + 1;

/// coeff * t^power * exp(-rate * t)
struct ExpPolyTerm {
    double coeff = 0.0;
    int power = 0;
    double rate = 0.0;
};

/// Canonical sum of ExpPolyTerm.
///
/// Terms are sorted by (power, rate); terms whose rates agree within
/// rate_tolerance() and share a power are merged, and exact-zero
/// coefficients are dropped. The tolerance travels with the series so that
/// everything derived from one ModelParams uses one collision policy.
class ExpPolySeries {
public:
    ExpPolySeries() = default;

    explicit ExpPolySeries(std::vector<ExpPolyTerm> terms, double rate_tolerance = 0.0)
        : terms_(std::move(terms)), rate_tol_(rate_tolerance) {
        canonicalize();
    }

    std::span<const ExpPolyTerm> terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    double rate_tolerance() const noexcept { return rate_tol_; }

    /// Coefficient of the term matching (power, rate), if present.
    std::optional<double> coefficient(int power, double rate) const {
        const double tol = std::max(rate_tol_, 1e-14 * std::abs(rate));
        for (const auto& term : terms_) {
            if (term.power == power && std::abs(term.rate - rate) <= tol) {
                return term.coeff;
            }
        }
        return std::nullopt;
    }

    double operator()(double t) const;

private:
    void canonicalize() {
        for (const auto& term : terms_) {
            if (!std::isfinite(term.coeff) || !std::isfinite(term.rate)) {
                throw NumericalError("exp-poly term has a non-finite coefficient or rate");
            }
            if (term.power < 0 || term.power > kMaxPower) {
                throw ValidationError("exp-poly term power out of range: " + std::to_string(term.power));
            }
        }
        std::sort(terms_.begin(), terms_.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
            return a.power != b.power ? a.power < b.power : a.rate < b.rate;
        });
        std::vector<ExpPolyTerm> merged;
        merged.reserve(terms_.size());
        for (const auto& term : terms_) {
            if (!merged.empty() && merged.back().power == term.power &&
                std::abs(merged.back().rate - term.rate) <= rate_tol_) {
                merged.back().coeff += term.coeff;
            } else {
                merged.push_back(term);
            }
        }
        std::erase_if(merged, [](const ExpPolyTerm& t) { return t.coeff == 0.0; });
        terms_ = std::move(merged);
    }

    std::vector<ExpPolyTerm> terms_;
    double rate_tol_ = 0.0;
};

inline double evaluate(const ExpPolySeries& series, double t) {
    if (!std::isfinite(t)) {
        throw ValidationError("evaluate: t must be finite");
    }
    double sum = 0.0;
    for (const auto& term : series.terms()) {
        sum += term.coeff * std::pow(t, term.power) * std::exp(-term.rate * t);
    }
    if (!std::isfinite(sum)) {
        throw NumericalError("evaluate: exp-poly series overflowed at t = " + std::to_string(t));
    }
    return sum;
}

inline double ExpPolySeries::operator()(double t) const { return evaluate(*this, t); }

/// scale_a * a + scale_b * b
inline ExpPolySeries combine(const ExpPolySeries& a, const ExpPolySeries& b, double scale_a,
                             double scale_b) {
    std::vector<ExpPolyTerm> terms;
    terms.reserve(a.size() + b.size());
    for (const auto& t : a.terms()) terms.push_back({scale_a * t.coeff, t.power, t.rate});
    for (const auto& t : b.terms()) terms.push_back({scale_b * t.coeff, t.power, t.rate});
    return ExpPolySeries(std::move(terms), std::max(a.rate_tolerance(), b.rate_tolerance()));
}

inline ExpPolySeries scale(const ExpPolySeries& a, double factor) {
    return combine(a, ExpPolySeries{}, factor, 0.0);
}

/// Multiplies by exp(-shift * t): every rate grows by shift.
inline ExpPolySeries multiply_by_exp(const ExpPolySeries& series, double shift) {
    std::vector<ExpPolyTerm> terms(series.terms().begin(), series.terms().end());
    for (auto& t : terms) t.rate += shift;
    return ExpPolySeries(std::move(terms), series.rate_tolerance());
}

inline ExpPolySeries differentiate(const ExpPolySeries& series) {
    std::vector<ExpPolyTerm> terms;
    terms.reserve(2 * series.size());
    for (const auto& t : series.terms()) {
        if (t.power > 0) terms.push_back({t.coeff * t.power, t.power - 1, t.rate});
        if (t.rate != 0.0) terms.push_back({-t.rate * t.coeff, t.power, t.rate});
    }
    return ExpPolySeries(std::move(terms), series.rate_tolerance());
}

/// Antiderivative F with F(0) = 0, in closed form.
///
/// For rate r != 0 uses
///   int_0^t s^p e^{-rs} ds = p!/r^{p+1} - e^{-rt} sum_{j=0}^{p} p!/(j! r^{p-j+1}) t^j,
/// and for r == 0 raises the power by one.
inline ExpPolySeries integrate_from_zero(const ExpPolySeries& series) {
    const double tol = series.rate_tolerance();
    std::vector<ExpPolyTerm> terms;
    for (const auto& t : series.terms()) {
        if (t.rate == 0.0) {
            terms.push_back({t.coeff / (t.power + 1), t.power + 1, 0.0});
            continue;
        }
        if (std::abs(t.rate) <= tol) {
            throw DegenerateRateError("integrate_from_zero: rate " + std::to_string(t.rate) +
                                      " is within tolerance of zero");
        }
        // factor = c * p! / (j! r^{p-j+1}), built downward from j = p.
        double factor = t.coeff / t.rate;
        for (int j = t.power; j >= 0; --j) {
            terms.push_back({-factor, j, t.rate});
            if (j > 0) factor *= static_cast<double>(j) / t.rate;
        }
        terms.push_back({factor, 0, 0.0});
    }
    return ExpPolySeries(std::move(terms), tol);
}

/// One line per term: "coeff * t^p * exp(-rate*t)" with 17 significant digits.
inline std::string to_string(const ExpPolySeries& series) {
    std::string out;
    char buf[128];
    for (const auto& t : series.terms()) {
        std::snprintf(buf, sizeof buf, "%.17g * t^%d * exp(-%.17g*t)\n", t.coeff, t.power, t.rate);
        out += buf;
    }
    return out;
}

}  // namespace sspert
