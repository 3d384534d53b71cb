/**
 * @file cli.hpp
 * @brief Command-line front end (sspert shat|abar|path|tables|sweep|coeffs)
 *
 * Exit codes: 0 success, 1 validation, 2 numerical failure, 3 golden mismatch.
 */

#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "epsseries.hpp"
#include "errors.hpp"
#include "perturbation.hpp"
#include "report.hpp"

namespace sspert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitGolden = 3;

namespace detail {

struct CommonOptions {
    std::string params_file;
    std::optional<double> m, mu, gamma, sigma2, lambda, s0, l0;
    double tau = 1.0;
    int order = 3;
    int steps = 0;
    std::string format = "table";
    std::string out;
};

inline void add_common(CLI::App& app, CommonOptions& o) {
    app.add_option("--params", o.params_file, "Key-value parameter file (m, mu, gamma, sigma2, lambda, s0, l0)");
    app.add_option("--m", o.m, "Spread mean-reversion speed");
    app.add_option("--mu", o.mu, "Spread equilibrium level");
    app.add_option("--gamma", o.gamma, "Spread volatility");
    app.add_option("--sigma2", o.sigma2, "Consol-rate volatility scale squared");
    app.add_option("--lambda", o.lambda, "Market price of spread risk");
    app.add_option("--s0", o.s0, "Initial spread");
    app.add_option("--l0", o.l0, "Initial consol rate");
    app.add_option("--tau", o.tau, "Maturity in years")->capture_default_str();
    app.add_option("--order", o.order, "Expansion order")->capture_default_str();
    app.add_option("--steps", o.steps, "RK4 steps for the oracle (default max(1000, 1000 tau))");
    app.add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"table", "csv"}))
        ->capture_default_str();
    app.add_option("--out", o.out, "Output path (tables: directory for CSV files)");
}

inline ParamValues resolve_values(const CommonOptions& o) {
    ParamValues v = o.params_file.empty() ? ParamValues{} : load_param_file(o.params_file);
    auto apply = [](const std::optional<double>& flag, double& slot) {
        if (flag) slot = *flag;
    };
    apply(o.m, v.m);
    apply(o.mu, v.mu);
    apply(o.gamma, v.gamma);
    apply(o.sigma2, v.sigma2);
    apply(o.lambda, v.lambda);
    apply(o.s0, v.s0);
    apply(o.l0, v.l0);
    return v;
}

inline RunConfig resolve_config(const CommonOptions& o) {
    const auto values = resolve_values(o);
    RunConfig config{values.model(), values.state(), o.tau, o.order, o.steps,
                     o.format == "csv" ? Format::csv : Format::table};
    validate(config);
    return config;
}

/// Writes to --out when given, otherwise to `fallback`.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ValidationError("cannot open output file '" + path + "'");
    write(file);
    if (!file) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace detail

/// Runs the CLI on `args` (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Perturbation expansion of the s_hat constant for spread/consol-rate bond pricing"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    detail::CommonOptions shat_o, abar_o, path_o, tables_o, sweep_o, coeffs_o;

    auto* shat = app.add_subcommand("shat", "Series k_0..k_N for s_hat, partial sums and oracle value");
    detail::add_common(*shat, shat_o);

    auto* abar = app.add_subcommand("abar", "Series L_0..L_N(tau) for tau*lbar, partial sums and oracle value");
    detail::add_common(*abar, abar_o);

    int samples = 101;
    auto* path = app.add_subcommand("path", "CSV of l(t): RK4 against each truncation order");
    detail::add_common(*path, path_o);
    path->add_option("--samples", samples, "Grid points over [0, tau]")->capture_default_str();

    bool check = false;
    auto* tables = app.add_subcommand("tables", "Both tables for s0 in {-0.05, 0, 0.05}, orders 0-3");
    detail::add_common(*tables, tables_o);
    tables->add_flag("--check", check, "Compare with the published values; exit 3 on mismatch > 5e-8");

    SweepSpec spec;
    std::string s0_grid = "-0.05:0.05:10", l0_grid = "0.005:0.2:10", tau_grid = "1:1:1";
    auto* sweep = app.add_subcommand("sweep", "s_hat over an (s0, l0, tau) grid, CSV");
    detail::add_common(*sweep, sweep_o);
    sweep->add_option("--s0-grid", s0_grid, "lo:hi:n")->capture_default_str();
    sweep->add_option("--l0-grid", l0_grid, "lo:hi:n (values below 0.005 are floored)")->capture_default_str();
    sweep->add_option("--tau-grid", tau_grid, "lo:hi:n")->capture_default_str();
    sweep->add_flag("--oracle", spec.oracle, "Add the RK4 + root-finding value per row");
    sweep->add_flag("--timing", spec.timing, "Add per-row wall time in microseconds (not reproducible)");
    sweep->add_option("--threads", spec.threads, "Worker threads (0: hardware concurrency)");

    std::string family = "c";
    auto* coeffs = app.add_subcommand("coeffs", "CSV of closed-form coefficients c_k(t) or L_k(tau)");
    detail::add_common(*coeffs, coeffs_o);
    coeffs->add_option("--family", family, "c or L")->check(CLI::IsMember({"c", "L"}))->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*shat) {
            const auto config = detail::resolve_config(shat_o);
            const auto report = shat_report(config);
            detail::emit(shat_o.out, out, [&](std::ostream& os) { write_report(os, report, config.format); });
        } else if (*abar) {
            const auto config = detail::resolve_config(abar_o);
            const auto report = abar_report(config);
            detail::emit(abar_o.out, out, [&](std::ostream& os) { write_report(os, report, config.format); });
        } else if (*path) {
            const auto config = detail::resolve_config(path_o);
            std::ostringstream buffer;
            write_path_csv(buffer, config, samples);
            detail::emit(path_o.out, out, [&](std::ostream& os) { os << buffer.str(); });
        } else if (*tables) {
            const auto config = detail::resolve_config(tables_o);
            const auto result =
                compute_tables(config.params, config.state.l0(), config.tau, config.steps());
            if (config.format == Format::csv) {
                const std::filesystem::path dir = tables_o.out.empty() ? "." : tables_o.out;
                std::filesystem::create_directories(dir);
                detail::emit((dir / "tau_lbar_table.csv").string(), out,
                             [&](std::ostream& os) { write_table_csv(os, result.tau_lbar); });
                detail::emit((dir / "s_hat_table.csv").string(), out,
                             [&](std::ostream& os) { write_table_csv(os, result.s_hat); });
            } else {
                detail::emit(tables_o.out, out, [&](std::ostream& os) {
                    write_table_text(os, "Approximations of tau*lbar", result.tau_lbar);
                    os << '\n';
                    write_table_text(os, "Approximations of s_hat", result.s_hat);
                });
            }
            if (check) {
                const auto mismatches = check_golden(result);
                for (const auto& m : mismatches) {
                    err << "golden mismatch: " << m.table << " row " << sspert::detail::row_label(m.row)
                        << " s0=" << m.s0 << ": computed " << fmt::g17(m.computed) << ", published "
                        << fmt::fixed7(m.expected) << '\n';
                }
                if (!mismatches.empty()) return kExitGolden;
            }
        } else if (*sweep) {
            const auto values = detail::resolve_values(sweep_o);
            if (sweep_o.order < 0 || sweep_o.order > kMaxOrder) throw ValidationError("order out of range");
            spec.s0 = parse_grid_axis(s0_grid);
            spec.l0 = parse_grid_axis(l0_grid);
            spec.tau = parse_grid_axis(tau_grid);
            spec.order = sweep_o.order;
            spec.n_steps = sweep_o.steps;
            const auto result = run_sweep(values.model(), spec);
            if (result.l0_floored) {
                err << "note: l0 values below " << kSweepL0Floor << " were raised to " << kSweepL0Floor
                    << " (l0 must stay positive for a well-posed s_hat)\n";
            }
            detail::emit(sweep_o.out, out, [&](std::ostream& os) { write_sweep_csv(os, result, spec); });
        } else if (*coeffs) {
            const auto config = detail::resolve_config(coeffs_o);
            const auto expansion = build_expansion(config.params, config.state.l0(), config.order);
            detail::emit(coeffs_o.out, out, [&](std::ostream& os) {
                write_coefficients_csv(os, family == "c" ? expansion.c() : expansion.L());
            });
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::validation ? kExitValidation : kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace sspert::cli
