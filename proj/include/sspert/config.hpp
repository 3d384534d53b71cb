/**
 * @file config.hpp
 * @brief Flat key-value parameter files
 *
 * One "key = value" per line; '#' starts a comment; blank lines ignored.
 * Keys are case-sensitive and limited to m, mu, gamma, sigma2, lambda, s0, l0.
 */

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "params.hpp"

namespace sspert {

inline constexpr std::array<std::string_view, 7> kConfigKeys = {"m",      "mu",     "gamma", "sigma2",
                                                                 "lambda", "s0",     "l0"};

/// Values as read; anything absent falls back to the base case.
struct ParamValues {
    double m = 0.72;
    double mu = -0.01;
    double gamma = 0.007;
    double sigma2 = 0.0003;
    double lambda = 0.0;
    double s0 = 0.0;
    double l0 = 0.1;

    double& at(std::string_view key) {
        if (key == "m") return m;
        if (key == "mu") return mu;
        if (key == "gamma") return gamma;
        if (key == "sigma2") return sigma2;
        if (key == "lambda") return lambda;
        if (key == "s0") return s0;
        if (key == "l0") return l0;
        throw ValidationError("unknown parameter key '" + std::string(key) + "'");
    }

    ModelParams model() const { return {m, mu, gamma, sigma2, lambda}; }
    InitialState state() const { return {s0, l0}; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace detail

/// Reads key-value pairs into `values`, overwriting only the keys present.
inline void read_param_values(std::istream& in, ParamValues& values) {
    std::string line;
    int line_no = 0;
    std::map<std::string, int, std::less<>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = detail::trim(view.substr(0, eq));
        const auto text = detail::trim(view.substr(eq + 1));
        if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
            throw ValidationError("line " + std::to_string(line_no) + ": unknown key '" +
                                  std::string(key) + "'");
        }
        if (auto [it, inserted] = seen.emplace(std::string(key), line_no); !inserted) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate key '" +
                                  std::string(key) + "' (first on line " + std::to_string(it->second) + ")");
        }
        values.at(key) = detail::parse_double(text, key);
    }
}

inline ParamValues load_param_file(const std::string& path, ParamValues values = {}) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open parameter file '" + path + "'");
    read_param_values(in, values);
    return values;
}

}  // namespace sspert
