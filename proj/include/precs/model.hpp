// model.hpp — Domain types and the classical branch Hamiltonians.
//
// Conventions used throughout the library:
//   * the apparatus mode obeys [b, b†] = hbar, so b|n⟩ = √(hbar·n)|n−1⟩ and the
//     coherent label Ω satisfies b|Ω⟩ = Ω|Ω⟩ (Ω = √hbar · α in unit-commutator terms);
//   * branch Hamiltonians are H_γ = λ_γ (b + b†) + ν b†b with λ_γ = g·ω_γ;
//   * phase space is the complex Ω plane with measure dμ = dReΩ dImΩ / (π hbar).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "precs/errors.hpp"

namespace precs {

using Complex = std::complex<double>;

// Phase-space coordinate (coherent-state label) on the complex plane.
using PhasePoint = Complex;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// ------------------------------- ModelParams --------------------------------

struct ModelParams {
    double g{0.0};                  // coupling strength on the pointer quadrature
    double nu{1.0};                 // mode frequency (>= 0; 0 = free drift)
    double hbar{1.0};               // dimensionless hbar, enters [b,b†] = hbar
    std::vector<double> spectrum;   // distinct measured eigenvalues, sorted descending

    std::size_t levels() const { return spectrum.size(); }

    // λ_γ = g ω_γ, the effective drive of branch γ
    double lambda(std::size_t branch) const { return g * spectrum.at(branch); }

    // Orbit geometry (ν > 0): circle through the origin, centre (−λ_γ/ν, 0)
    PhasePoint orbit_center(std::size_t branch) const {
        return PhasePoint(-lambda(branch) / nu, 0.0);
    }
    double orbit_radius(std::size_t branch) const {
        return std::abs(lambda(branch)) / nu;
    }
    double period() const { return kTwoPi / nu; }

    // Largest |Ω| reached by branch γ up to time t_max (any t for ν > 0)
    double max_orbit_amplitude(std::size_t branch, double t_max) const {
        if (nu > 0.0) return 2.0 * orbit_radius(branch);
        return std::abs(lambda(branch)) * std::abs(t_max);
    }
};

inline ModelParams validate_model(double g, double nu, double hbar,
                                  std::vector<double> spectrum) {
    if (!std::isfinite(g) || !std::isfinite(nu) || !std::isfinite(hbar))
        throw Error("model parameters must be finite");
    if (spectrum.empty())
        throw EmptySpectrum("spectrum must contain at least one eigenvalue");
    for (double w : spectrum)
        if (!std::isfinite(w)) throw Error("spectrum entries must be finite");
    if (hbar <= 0.0)
        throw NonPositiveHbar("hbar must be > 0");
    if (nu < 0.0)
        throw Error("mode frequency nu must be >= 0");

    std::sort(spectrum.begin(), spectrum.end(), std::greater<double>());
    for (std::size_t i = 1; i < spectrum.size(); ++i)
        if (spectrum[i] == spectrum[i - 1])
            throw DegenerateSpectrum("spectrum eigenvalues must be pairwise distinct");

    ModelParams p;
    p.g = g;
    p.nu = nu;
    p.hbar = hbar;
    p.spectrum = std::move(spectrum);
    return p;
}

// ------------------------------- Amplitudes ---------------------------------

// Initial amplitudes of the measured system on the eigenbasis of the observable.
struct Amplitudes {
    Eigen::VectorXcd c;

    std::size_t levels() const { return static_cast<std::size_t>(c.size()); }
    double born(std::size_t branch) const {
        return std::norm(c(static_cast<Eigen::Index>(branch)));
    }
};

inline Amplitudes validate_amplitudes(const std::vector<Complex>& values,
                                      double tol = 1e-12) {
    if (values.empty()) throw Error("amplitude vector must be nonempty");
    Eigen::VectorXcd c(static_cast<Eigen::Index>(values.size()));
    double norm2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw Error("amplitudes must be finite");
        c(static_cast<Eigen::Index>(i)) = values[i];
        norm2 += std::norm(values[i]);
    }
    if (std::abs(norm2 - 1.0) > tol)
        throw Error("amplitudes must be normalized: sum |c|^2 = " +
                    std::to_string(norm2));
    Amplitudes a;
    a.c = std::move(c);
    return a;
}

// ------------------------------ DensityMatrix -------------------------------

struct DensityMatrix {
    Eigen::MatrixXcd m;

    std::size_t dim() const { return static_cast<std::size_t>(m.rows()); }

    double hermiticity_error() const {
        return (m - m.adjoint()).cwiseAbs().maxCoeff();
    }
    double trace_error() const { return std::abs(m.trace() - Complex(1.0, 0.0)); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    double purity() const { return (m * m).trace().real(); }

    bool physical(double herm_tol = 1e-12, double trace_tol = 1e-10,
                  double psd_tol = 1e-10) const {
        return hermiticity_error() < herm_tol && trace_error() < trace_tol &&
               min_eigenvalue() >= -psd_tol;
    }
};

// T(ρ, σ) = ½ Σ |eig(ρ − σ)|
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    Eigen::MatrixXcd d = a.m - b.m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// -------------------------- classical Hamiltonian ---------------------------

// H_γ(Ω) = ⟨Ω|H_γ|Ω⟩ = 2 λ_γ ReΩ + ν |Ω|²
// (⟨Ω|b+b†|Ω⟩ = 2ReΩ and ⟨Ω|b†b|Ω⟩ = |Ω|² under [b,b†] = hbar)
inline double classical_hamiltonian(const ModelParams& p, std::size_t branch,
                                    PhasePoint omega) {
    return 2.0 * p.lambda(branch) * omega.real() + p.nu * std::norm(omega);
}

} // namespace precs
