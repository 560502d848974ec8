// config.hpp — flat key=value run configuration.
//
// Recognized keys:
//   g, nu, hbar          model parameters
//   spectrum             comma list of distinct eigenvalues
//   c0, c1, ...          amplitudes as "re,im", one per spectrum entry
//   times                comma list of sample times, or
//   t_start, t_end, n_steps   inclusive linspace with n_steps intervals
//   eps                  support threshold (default e^{-9/2})
//   n_max                Fock truncation for oracle checks (default 128)
//   step                 integrator/quadrature step (default period/2000)
//   oracle               true/false: add the oracle column to evolve.csv
//   grid                 re_min,re_max,im_min,im_max,n_re,n_im override
//   out                  output directory
// '#' starts a comment; blank lines are ignored.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "precs/field.hpp"
#include "precs/model.hpp"

namespace precs::io {

inline constexpr double kDefaultEps = 0.011108996538242306;   // e^{-9/2}

struct RunConfig {
    double g{0.0};
    double nu{1.0};
    double hbar{1.0};
    std::vector<double> spectrum;
    std::vector<Complex> amplitudes;
    std::vector<double> times;
    double eps{kDefaultEps};
    int n_max{128};
    double step{0.0};               // 0 = automatic
    bool oracle{false};
    std::optional<field::Grid> grid_override;
    std::string out_dir{"."};
    std::string source{"<config>"};

    // Canonical branch order: (eigenvalue, amplitude) pairs sorted by
    // descending eigenvalue, so user ordering never re-pairs c_γ.
    void canonicalize() {
        if (spectrum.size() != amplitudes.size()) return;
        std::vector<std::size_t> order(spectrum.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return spectrum[a] > spectrum[b];
        });
        std::vector<double> sp(spectrum.size());
        std::vector<Complex> am(amplitudes.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            sp[k] = spectrum[order[k]];
            am[k] = amplitudes[order[k]];
        }
        spectrum = std::move(sp);
        amplitudes = std::move(am);
    }

    ModelParams model() const { return validate_model(g, nu, hbar, spectrum); }
    Amplitudes amps() const { return validate_amplitudes(amplitudes); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s, int line, const std::string& src) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(src + ":" + std::to_string(line) +
                          ": not a number: '" + s + "'");
    }
}

inline std::vector<double> parse_list(const std::string& s, int line,
                                      const std::string& src) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(trim(item), line, src));
    if (out.empty())
        throw ConfigError(src + ":" + std::to_string(line) + ": empty list");
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    cfg.source = source;
    std::vector<std::pair<int, Complex>> amp_entries;   // (index, value)
    std::optional<double> t_start, t_end;
    std::optional<int> n_steps;
    bool have_times = false;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty()) continue;

        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(line) +
                              ": expected key = value");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string val = detail::trim(text.substr(eq + 1));
        if (val.empty())
            throw ConfigError(source + ":" + std::to_string(line) +
                              ": empty value for '" + key + "'");

        if (key == "g") {
            cfg.g = detail::parse_double(val, line, source);
        } else if (key == "nu") {
            cfg.nu = detail::parse_double(val, line, source);
        } else if (key == "hbar") {
            cfg.hbar = detail::parse_double(val, line, source);
        } else if (key == "spectrum") {
            cfg.spectrum = detail::parse_list(val, line, source);
        } else if (key.size() > 1 && key[0] == 'c' &&
                   key.find_first_not_of("0123456789", 1) == std::string::npos) {
            const int idx = std::stoi(key.substr(1));
            const auto parts = detail::parse_list(val, line, source);
            if (parts.size() != 2)
                throw ConfigError(source + ":" + std::to_string(line) +
                                  ": amplitude must be 're,im'");
            amp_entries.emplace_back(idx, Complex(parts[0], parts[1]));
        } else if (key == "times") {
            cfg.times = detail::parse_list(val, line, source);
            have_times = true;
        } else if (key == "t_start") {
            t_start = detail::parse_double(val, line, source);
        } else if (key == "t_end") {
            t_end = detail::parse_double(val, line, source);
        } else if (key == "n_steps") {
            n_steps = static_cast<int>(detail::parse_double(val, line, source));
        } else if (key == "eps") {
            cfg.eps = detail::parse_double(val, line, source);
        } else if (key == "n_max") {
            cfg.n_max = static_cast<int>(detail::parse_double(val, line, source));
        } else if (key == "step") {
            cfg.step = detail::parse_double(val, line, source);
        } else if (key == "oracle") {
            if (val == "true" || val == "1") cfg.oracle = true;
            else if (val == "false" || val == "0") cfg.oracle = false;
            else
                throw ConfigError(source + ":" + std::to_string(line) +
                                  ": oracle must be true/false");
        } else if (key == "grid") {
            const auto parts = detail::parse_list(val, line, source);
            if (parts.size() != 6)
                throw ConfigError(source + ":" + std::to_string(line) +
                                  ": grid must be re_min,re_max,im_min,im_max,n_re,n_im");
            field::Grid gr;
            gr.re_min = parts[0];
            gr.re_max = parts[1];
            gr.im_min = parts[2];
            gr.im_max = parts[3];
            gr.n_re = static_cast<int>(parts[4]);
            gr.n_im = static_cast<int>(parts[5]);
            cfg.grid_override = gr;
        } else if (key == "out") {
            cfg.out_dir = val;
        } else {
            throw ConfigError(source + ":" + std::to_string(line) +
                              ": unknown key '" + key + "'");
        }
    }

    if (cfg.spectrum.empty())
        throw ConfigError(source + ": missing 'spectrum'");
    cfg.amplitudes.assign(cfg.spectrum.size(), Complex(0.0, 0.0));
    std::vector<char> seen(cfg.spectrum.size(), 0);
    for (const auto& [idx, value] : amp_entries) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= cfg.spectrum.size())
            throw ConfigError(source + ": amplitude index c" + std::to_string(idx) +
                              " out of range for spectrum of size " +
                              std::to_string(cfg.spectrum.size()));
        if (seen[static_cast<std::size_t>(idx)])
            throw ConfigError(source + ": duplicate amplitude c" + std::to_string(idx));
        seen[static_cast<std::size_t>(idx)] = 1;
        cfg.amplitudes[static_cast<std::size_t>(idx)] = value;
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k])
            throw ConfigError(source + ": missing amplitude c" + std::to_string(k));

    if (!have_times) {
        if (!t_start || !t_end || !n_steps)
            throw ConfigError(source + ": provide 'times' or t_start/t_end/n_steps");
        if (*n_steps < 1)
            throw ConfigError(source + ": n_steps must be >= 1");
        cfg.times.clear();
        for (int k = 0; k <= *n_steps; ++k)
            cfg.times.push_back(*t_start +
                                (*t_end - *t_start) * k / static_cast<double>(*n_steps));
    }
    if (cfg.times.empty())
        throw ConfigError(source + ": empty time list");
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        if (cfg.times[k] < 0.0)
            throw ConfigError(source + ": times must be nonnegative");
        if (k > 0 && cfg.times[k] <= cfg.times[k - 1])
            throw ConfigError(source + ": times must be strictly increasing");
    }
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
        throw ConfigError(source + ": eps must lie in (0,1)");
    if (cfg.n_max < 1)
        throw ConfigError(source + ": n_max must be >= 1");

    cfg.canonicalize();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in, path);
}

} // namespace precs::io
