// support.hpp — shared fixtures and independent oracles for the test suite.
// Oracles here are deliberately written from scratch (closed forms, direct
// Fock sums) so they do not share code with the implementation they check.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "precs/model.hpp"

namespace testsupport {

using precs::Complex;

// Closed-form accumulated phase of a branch driven by lambda at frequency nu:
// (lambda^2 / (hbar nu)) (t - sin(nu t)/nu); 0 for the free mode.
inline double phase_oracle(double lambda, double nu, double hbar, double t) {
    if (nu == 0.0) return 0.0;
    return lambda * lambda / (hbar * nu) * (t - std::sin(nu * t) / nu);
}

// Direct Fock-sum overlap of two coherent states, sum_n conj(<n|a>) <n|b>
// with <n|w> = e^{-|w|^2/(2 hbar)} w^n / sqrt(hbar^n n!).
inline Complex fock_sum_overlap(double hbar, Complex a, Complex b, int n_max) {
    Complex term_a = std::exp(-std::norm(a) / (2.0 * hbar));
    Complex term_b = std::exp(-std::norm(b) / (2.0 * hbar));
    Complex sum = std::conj(term_a) * term_b;
    for (int n = 1; n <= n_max; ++n) {
        term_a *= a / std::sqrt(hbar * n);
        term_b *= b / std::sqrt(hbar * n);
        sum += std::conj(term_a) * term_b;
    }
    return sum;
}

inline precs::ModelParams qubit_params(double g = 2.0, double nu = 1.0,
                                       double hbar = 1.0) {
    return precs::validate_model(g, nu, hbar, {1.0, -1.0});
}

inline precs::Amplitudes demo_amplitudes() {
    return precs::validate_amplitudes({Complex(0.5, 0.0),
                                       Complex(std::sqrt(3.0) / 2.0, 0.0)});
}

inline precs::Amplitudes uniform_amplitudes(std::size_t n) {
    const double v = 1.0 / std::sqrt(static_cast<double>(n));
    return precs::validate_amplitudes(std::vector<Complex>(n, Complex(v, 0.0)));
}

inline precs::Amplitudes random_amplitudes(std::size_t n, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> c(n);
    double norm2 = 0.0;
    for (auto& v : c) {
        v = Complex(gauss(rng), gauss(rng));
        norm2 += std::norm(v);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& v : c) v *= scale;
    return precs::validate_amplitudes(c);
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char byte : data) {
        h ^= byte;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace testsupport
