// csv.hpp — deterministic CSV emission (LF endings, 13 significant digits,
// '.' decimal separator) and atomic file writes.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "precs/errors.hpp"
#include "precs/field.hpp"

namespace precs::io {

inline std::string format_sig(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

// write-temp-then-rename so readers never observe a partial file
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

// header re,im,chi2,h_0,...,h_{N-1}; one row per node, row-major over (im, re)
inline std::string grid_csv(const field::ChiField& f) {
    std::string out;
    out.reserve(static_cast<std::size_t>(f.grid.nodes()) * (f.levels() + 3) * 20);
    out += "re,im,chi2";
    for (std::size_t g = 0; g < f.levels(); ++g)
        out += ",h_" + std::to_string(g);
    out += '\n';
    for (int j = 0; j < f.grid.n_im; ++j) {
        const std::string im = format_sig(f.grid.node_im(j));
        for (int i = 0; i < f.grid.n_re; ++i) {
            const int idx = f.grid.index(i, j);
            out += format_sig(f.grid.node_re(i));
            out += ',';
            out += im;
            out += ',';
            out += format_sig(f.chi2(idx));
            for (std::size_t g = 0; g < f.levels(); ++g) {
                out += ',';
                out += format_sig(f.h(static_cast<Eigen::Index>(g), idx));
            }
            out += '\n';
        }
    }
    return out;
}

inline std::string supports_csv(const std::vector<field::EpsSupport>& supports,
                                const field::Grid& grid) {
    std::string out = "gamma,re,im\n";
    for (const auto& s : supports)
        for (int idx : s.cells) {
            out += std::to_string(s.branch);
            out += ',';
            out += format_sig(grid.node_re(idx % grid.n_re));
            out += ',';
            out += format_sig(grid.node_im(idx / grid.n_re));
            out += '\n';
        }
    return out;
}

} // namespace precs::io
