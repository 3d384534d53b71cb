/**
 * @file report.hpp
 * @brief Computations behind the command-line reports
 *
 * Each report is computed into a plain struct first and formatted second,
 * so tests can inspect numbers without scraping text.
 */

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "config.hpp"
#include "epsseries.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "params.hpp"
#include "perturbation.hpp"

namespace sspert {

enum class Format { table, csv };

struct RunConfig {
    ModelParams params = ModelParams::base_case();
    InitialState state{0.0, 0.1};
    double tau = 1.0;
    int order = 3;
    int n_steps = 0;  // 0: default_steps(tau)
    Format format = Format::table;

    int steps() const { return n_steps > 0 ? n_steps : default_steps(tau); }
};

inline void validate(const RunConfig& config) {
    if (!(config.tau > 0.0) || !std::isfinite(config.tau)) {
        throw ValidationError("maturity tau must be positive and finite");
    }
    if (config.order < 0 || config.order > kMaxOrder) {
        throw ValidationError("order must lie in [0, " + std::to_string(kMaxOrder) + "]");
    }
    if (config.n_steps != 0 && config.n_steps < 16) {
        throw ValidationError("--steps must be at least 16");
    }
}

namespace fmt {

/// Fixed 7 decimals, as in the published tables.
inline std::string fixed7(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7f", v);
    return buf;
}

/// 17 significant digits; round-trips doubles.
inline std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace fmt

// ---------------------------------------------------------------------------
// shat / abar

struct OrderRow {
    int order = 0;
    double term = 0.0;     // k_n (shat) or L_n(tau) (abar)
    double partial = 0.0;  // partial sum through this order at the given eps
    double abs_diff = 0.0; // |partial - numeric|
};

struct ApproxReport {
    std::string quantity;  // "s_hat" or "tau_lbar"
    double eps = 0.0;
    std::vector<OrderRow> rows;
    double numeric = 0.0;
};

inline ApproxReport shat_report(const RunConfig& config) {
    validate(config);
    const auto eps = epsilon(config.state, config.params);
    const auto expansion = build_expansion(config.params, config.state.l0(), config.order);
    const auto series = solve_shat_series(expansion, config.tau, config.order);
    const auto oracle = oracle_shat(config.state, config.params, config.tau, config.steps());

    ApproxReport report{"s_hat", eps.value, {}, oracle.s_hat};
    for (int n = 0; n <= config.order; ++n) {
        const double partial = series.value(eps, n);
        report.rows.push_back({n, series.k[n], partial, std::abs(partial - oracle.s_hat)});
    }
    return report;
}

inline ApproxReport abar_report(const RunConfig& config) {
    validate(config);
    const auto eps = epsilon(config.state, config.params);
    const auto expansion = build_expansion(config.params, config.state.l0(), config.order);
    const auto path = integrate_ell(config.state, config.params, config.tau, config.steps());

    ApproxReport report{"tau_lbar", eps.value, {}, path.tau_lbar};
    for (int n = 0; n <= config.order; ++n) {
        const double partial = eval_tau_lbar(expansion, eps, config.tau, n);
        report.rows.push_back(
            {n, evaluate(expansion.L(n), config.tau), partial, std::abs(partial - path.tau_lbar)});
    }
    return report;
}

inline void write_report(std::ostream& os, const ApproxReport& report, Format format) {
    const std::string_view term_name = report.quantity == "s_hat" ? "k" : "L";
    if (format == Format::csv) {
        os << "order," << term_name << ",partial_sum,numeric,abs_diff\n";
        for (const auto& r : report.rows) {
            os << r.order << ',' << fmt::g17(r.term) << ',' << fmt::g17(r.partial) << ','
               << fmt::g17(report.numeric) << ',' << fmt::g17(r.abs_diff) << '\n';
        }
        return;
    }
    char buf[160];
    os << report.quantity << " expansion, eps = " << fmt::g17(report.eps) << '\n';
    std::snprintf(buf, sizeof buf, "%-10s %24s %14s %14s\n", "order", term_name.data(), report.quantity.c_str(),
                  "|diff|");
    os << buf;
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%-10d %24.17g %14s %14.3e\n", r.order, r.term,
                      fmt::fixed7(r.partial).c_str(), r.abs_diff);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "%-10s %24s %14s\n", "numerical", "", fmt::fixed7(report.numeric).c_str());
    os << buf;
}

// ---------------------------------------------------------------------------
// path

/// t, ell_rk4, ell_order0 ... ell_orderN on a uniform grid of `samples` points.
inline void write_path_csv(std::ostream& os, const RunConfig& config, int samples) {
    validate(config);
    if (samples < 2) throw ValidationError("--samples must be at least 2");
    const auto eps = epsilon(config.state, config.params);
    const auto expansion = build_expansion(config.params, config.state.l0(), config.order);

    const int intervals = samples - 1;
    const int per_interval = std::max(1, (config.steps() + intervals - 1) / intervals);
    const auto path = integrate_ell(config.state, config.params, config.tau,
                                    std::max(16, per_interval * intervals));
    const int stride = path.steps / intervals;

    os << "t,ell_rk4";
    for (int n = 0; n <= config.order; ++n) os << ",ell_order" << n;
    os << '\n';
    for (int i = 0; i < samples; ++i) {
        const double t = path.t[static_cast<std::size_t>(i * stride)];
        os << fmt::g17(t) << ',' << fmt::g17(path.ell[static_cast<std::size_t>(i * stride)]);
        for (int n = 0; n <= config.order; ++n) os << ',' << fmt::g17(eval_ell(expansion, eps, t, n));
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// tables

inline constexpr std::array<double, 3> kTableSpreads = {-0.05, 0.0, 0.05};

/// Rows 0..3 are orders, row 4 the numerical value; columns follow kTableSpreads.
using TableValues = std::array<std::array<double, 3>, 5>;

struct Tables {
    TableValues tau_lbar{};
    TableValues s_hat{};
};

/// Published values for the base case, l0 = 0.1, tau = 1.
inline constexpr TableValues kGoldenTauLbar = {{
    {0.1006522, 0.1006522, 0.1006522},
    {0.1022593, 0.1002504, 0.0982415},
    {0.1022755, 0.1002514, 0.0982780},
    {0.1022756, 0.1002514, 0.0982776},
    {0.1022756, 0.1002514, 0.0982776},
}};

inline constexpr TableValues kGoldenShat = {{
    {-0.01, -0.01, -0.01},
    {-0.0418965, -0.0020259, 0.0378448},
    {-0.0418789, -0.0020248, 0.0378844},
    {-0.0418789, -0.0020248, 0.0378844},
    {-0.0418789, -0.0020248, 0.0378844},
}};

inline constexpr double kGoldenTolerance = 5e-8;

inline Tables compute_tables(const ModelParams& params, double l0, double tau, int n_steps) {
    Tables out;
    const auto expansion = build_expansion(params, l0, 3);
    const auto series = solve_shat_series(expansion, tau, 3);
    for (std::size_t j = 0; j < kTableSpreads.size(); ++j) {
        const InitialState state(kTableSpreads[j], l0);
        const auto eps = epsilon(state, params);
        for (int n = 0; n <= 3; ++n) {
            out.tau_lbar[n][j] = eval_tau_lbar(expansion, eps, tau, n);
            out.s_hat[n][j] = series.value(eps, n);
        }
        const auto oracle = oracle_shat(state, params, tau, n_steps);
        out.tau_lbar[4][j] = oracle.tau_lbar;
        out.s_hat[4][j] = oracle.s_hat;
    }
    return out;
}

struct GoldenMismatch {
    std::string table;
    int row = 0;
    double s0 = 0.0;
    double computed = 0.0;
    double expected = 0.0;
};

inline std::vector<GoldenMismatch> check_golden(const Tables& tables) {
    std::vector<GoldenMismatch> out;
    auto scan = [&](const char* name, const TableValues& got, const TableValues& want) {
        for (int r = 0; r < 5; ++r) {
            for (std::size_t j = 0; j < 3; ++j) {
                if (!(std::abs(got[r][j] - want[r][j]) <= kGoldenTolerance)) {
                    out.push_back({name, r, kTableSpreads[j], got[r][j], want[r][j]});
                }
            }
        }
    };
    scan("tau_lbar", tables.tau_lbar, kGoldenTauLbar);
    scan("s_hat", tables.s_hat, kGoldenShat);
    return out;
}

namespace detail {

inline std::string row_label(int r) { return r < 4 ? std::to_string(r) : "numerical"; }

}  // namespace detail

inline void write_table_text(std::ostream& os, std::string_view title, const TableValues& values) {
    char buf[160];
    os << title << '\n';
    std::snprintf(buf, sizeof buf, "%-10s %14s %14s %14s\n", "order", "s0 = -0.05", "s0 = 0", "s0 = 0.05");
    os << buf;
    for (int r = 0; r < 5; ++r) {
        std::snprintf(buf, sizeof buf, "%-10s %14s %14s %14s\n", detail::row_label(r).c_str(),
                      fmt::fixed7(values[r][0]).c_str(), fmt::fixed7(values[r][1]).c_str(),
                      fmt::fixed7(values[r][2]).c_str());
        os << buf;
    }
}

inline void write_table_csv(std::ostream& os, const TableValues& values) {
    os << "order,s0=-0.05,s0=0,s0=0.05\n";
    for (int r = 0; r < 5; ++r) {
        os << detail::row_label(r);
        for (double v : values[r]) os << ',' << fmt::fixed7(v);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// sweep

/// lo, hi, n: n uniformly spaced points (n = 1 gives lo).
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;

    double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

inline GridAxis parse_grid_axis(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
        throw ValidationError("grid axis must be 'lo:hi:n', got '" + std::string(text) + "'");
    }
    GridAxis axis;
    axis.lo = detail::parse_double(text.substr(0, c1), "grid lo");
    axis.hi = detail::parse_double(text.substr(c1 + 1, c2 - c1 - 1), "grid hi");
    const double n = detail::parse_double(text.substr(c2 + 1), "grid count");
    if (!(n >= 1.0) || n != std::floor(n) || n > 1e6) {
        throw ValidationError("grid count must be a positive integer");
    }
    axis.n = static_cast<int>(n);
    return axis;
}

inline constexpr long long kMaxSweepPoints = 1'000'000;
inline constexpr double kSweepL0Floor = 0.005;

struct SweepSpec {
    GridAxis s0{-0.05, 0.05, 10};
    GridAxis l0{kSweepL0Floor, 0.2, 10};
    GridAxis tau{1.0, 1.0, 1};
    int order = 3;
    int n_steps = 0;
    bool oracle = false;
    bool timing = false;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepRow {
    long long index = 0;
    double s0 = 0.0;
    double l0 = 0.0;
    double tau = 0.0;
    double eps = 0.0;
    double s_hat = 0.0;
    double oracle = 0.0;  // NaN unless requested
    double micros = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool l0_floored = false;
};

/// Evaluates s_hat over the (s0, l0, tau) grid, s0 varying fastest.
///
/// One expansion is built per l0 value and shared read-only across workers;
/// rows land at their grid index, so output order never depends on scheduling.
inline SweepResult run_sweep(const ModelParams& params, const SweepSpec& spec) {
    const long long total = 1LL * spec.s0.n * spec.l0.n * spec.tau.n;
    if (total > kMaxSweepPoints) {
        throw ValidationError("sweep grid has " + std::to_string(total) + " points; limit is " +
                              std::to_string(kMaxSweepPoints));
    }
    if (spec.order < 0 || spec.order > kMaxOrder) throw ValidationError("sweep order out of range");

    SweepResult result;
    std::vector<double> l0_values(spec.l0.n);
    for (int i = 0; i < spec.l0.n; ++i) {
        l0_values[i] = spec.l0.at(i);
        if (l0_values[i] < kSweepL0Floor) {
            l0_values[i] = kSweepL0Floor;
            result.l0_floored = true;
        }
    }
    for (int i = 0; i < spec.tau.n; ++i) {
        if (!(spec.tau.at(i) > 0.0)) throw ValidationError("sweep maturities must be positive");
    }

    std::vector<EllExpansion> expansions;
    expansions.reserve(l0_values.size());
    for (double l0 : l0_values) expansions.push_back(build_expansion(params, l0, spec.order));

    result.rows.resize(static_cast<std::size_t>(total));
    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (long long idx = next++; idx < total && !failed; idx = next++) {
            try {
                const int is = static_cast<int>(idx % spec.s0.n);
                const int il = static_cast<int>((idx / spec.s0.n) % spec.l0.n);
                const int it = static_cast<int>(idx / (1LL * spec.s0.n * spec.l0.n));
                const auto start = std::chrono::steady_clock::now();
                const InitialState state(spec.s0.at(is), l0_values[il]);
                const double tau = spec.tau.at(it);
                const auto eps = epsilon(state, params);
                SweepRow row{idx, state.s0(), state.l0(), tau, eps.value, 0.0,
                             std::numeric_limits<double>::quiet_NaN(), 0.0};
                row.s_hat = solve_shat_series(expansions[il], tau, spec.order).value(eps);
                if (spec.oracle) {
                    const int steps = spec.n_steps > 0 ? spec.n_steps : default_steps(tau);
                    row.oracle = oracle_shat(state, params, tau, steps).s_hat;
                }
                row.micros = std::chrono::duration<double, std::micro>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
                result.rows[static_cast<std::size_t>(idx)] = row;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        }
    };

    unsigned n_threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<long long>(n_threads, std::max(1LL, total)));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
        worker();
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& result, const SweepSpec& spec) {
    os << "index,s0,l0,tau,eps,s_hat_order" << spec.order;
    if (spec.oracle) os << ",s_hat_oracle,abs_diff";
    if (spec.timing) os << ",micros";
    os << '\n';
    for (const auto& r : result.rows) {
        os << r.index << ',' << fmt::g17(r.s0) << ',' << fmt::g17(r.l0) << ',' << fmt::g17(r.tau) << ','
           << fmt::g17(r.eps) << ',' << fmt::g17(r.s_hat);
        if (spec.oracle) os << ',' << fmt::g17(r.oracle) << ',' << fmt::g17(std::abs(r.s_hat - r.oracle));
        if (spec.timing) os << ',' << fmt::g17(r.micros);
        os << '\n';
    }
}

}  // namespace sspert
