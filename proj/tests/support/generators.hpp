// Hand-rolled generators for the property tests. Fixed seeds: failures replay.
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <sspert/expseries.hpp>
#include <sspert/params.hpp>

namespace sspert::gen {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Parameters kept away from mu_hat = 0 and mu_hat = j m, so the
/// coefficient denominators stay O(1) relative to the rates.
inline ModelParams random_params(std::mt19937_64& g) {
    for (;;) {
        const double m = uniform(g, 0.2, 1.5);
        const double mu = uniform(g, -0.06, 0.06);
        const double gamma = uniform(g, 0.0, 0.02);
        const double sigma2 = uniform(g, 1e-4, 1e-3);
        const double lambda = uniform(g, -0.5, 0.5);
        const double mh = mu_hat(m, mu, gamma, lambda);
        if (std::abs(mh) < 2e-3) continue;
        bool near = false;
        for (int j = 1; j <= kMaxOrder; ++j) near = near || std::abs(mh - j * m) < 0.05 * m;
        if (near) continue;
        return ModelParams(m, mu, gamma, sigma2, lambda);
    }
}

/// Terms drawn from the rate lattice {j m} and {mu_hat + j m}.
inline ExpPolySeries random_lattice_series(std::mt19937_64& g, const ModelParams& p, int max_terms,
                                           int max_power) {
    std::uniform_int_distribution<int> n_terms(1, max_terms), power(0, max_power), j(0, 4), family(0, 1);
    std::vector<ExpPolyTerm> terms;
    const int n = n_terms(g);
    for (int i = 0; i < n; ++i) {
        const double rate = family(g) ? j(g) * p.m() : p.mu_hat() + j(g) * p.m();
        terms.push_back({uniform(g, -1.0, 1.0), power(g), rate});
    }
    return ExpPolySeries(std::move(terms), p.rate_tolerance());
}

}  // namespace sspert::gen
