// dynamics.hpp — Branch coherent-state trajectories, accumulated phases,
// coherent-state overlaps, and the exact reduced state of the measured system.
//
// The branch label Ω_γ(t) follows dΩ/dt = −i(λ_γ + νΩ) with Ω(0) = 0; the
// accumulated phase obeys φ̇ = −[H_γ(Ω) + Im(Ω̇ Ω*)]/hbar, fixed so that
// e^{iφ_γ(t)}|Ω_γ(t)⟩ reproduces the exact Fock-space propagation of the
// vacuum under H_γ (see fock.hpp for the check).
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "precs/model.hpp"

namespace precs {

// RHS of the trajectory ODE
inline PhasePoint eom_rhs(const ModelParams& p, std::size_t branch, PhasePoint omega) {
    return Complex(0.0, -1.0) * (p.lambda(branch) + p.nu * omega);
}

// Integrand of the accumulated-phase integral along a trajectory point
inline double phase_integrand(const ModelParams& p, std::size_t branch,
                              PhasePoint omega) {
    const PhasePoint dot = eom_rhs(p, branch, omega);
    return -(classical_hamiltonian(p, branch, omega) +
             std::imag(dot * std::conj(omega))) / p.hbar;
}

// Closed-form trajectory. For ν > 0 a circle through the origin centred at
// (−λ_γ/ν, 0), traversed clockwise with period 2π/ν; for ν = 0 the linear
// drift Ω(t) = −i λ_γ t.
inline PhasePoint analytic_trajectory(const ModelParams& p, std::size_t branch,
                                      double t) {
    const double lam = p.lambda(branch);
    if (p.nu == 0.0) return PhasePoint(0.0, -lam * t);
    const Complex rot = std::exp(Complex(0.0, -p.nu * t));
    return (lam / p.nu) * (rot - 1.0);
}

// Default integration / quadrature step: 1/2000 of the orbit period
// (or t_max/2000 for the free mode).
inline double default_step(const ModelParams& p, double t_max) {
    if (p.nu > 0.0) return p.period() / 2000.0;
    return t_max > 0.0 ? t_max / 2000.0 : 1.0;
}

// Largest step the fixed-step integrator accepts: 1/20 of the period.
inline double max_step(const ModelParams& p) {
    if (p.nu > 0.0) return p.period() / 20.0;
    return std::numeric_limits<double>::infinity();
}

// ----------------------------- BranchTrajectory -----------------------------

struct BranchTrajectory {
    std::size_t branch{0};
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<double> phases;
};

// Fixed-step RK4 integration of (Ω, φ) over the requested sample times.
// Each interval is subdivided into equal steps no larger than `step`.
inline BranchTrajectory integrate_eom(const ModelParams& p, std::size_t branch,
                                      const std::vector<double>& times,
                                      double step = 0.0) {
    if (times.empty() || times.front() != 0.0)
        throw Error("time grid must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] <= times[k - 1])
            throw Error("time grid must be strictly increasing");
    if (step <= 0.0) step = default_step(p, times.back());
    if (step > max_step(p))
        throw StepTooLarge("integration step " + std::to_string(step) +
                           " exceeds period/20 = " + std::to_string(max_step(p)));

    BranchTrajectory tr;
    tr.branch = branch;
    tr.times = times;
    tr.points.reserve(times.size());
    tr.phases.reserve(times.size());

    PhasePoint omega = 0.0;
    double phase = 0.0;
    tr.points.push_back(omega);
    tr.phases.push_back(phase);

    auto rhs = [&](PhasePoint w, PhasePoint& dw, double& dphi) {
        dw = eom_rhs(p, branch, w);
        dphi = phase_integrand(p, branch, w);
    };

    for (std::size_t k = 1; k < times.size(); ++k) {
        const double span = times[k] - times[k - 1];
        const int nsub = std::max(1, static_cast<int>(std::ceil(span / step)));
        const double h = span / nsub;
        for (int s = 0; s < nsub; ++s) {
            PhasePoint k1w, k2w, k3w, k4w;
            double k1p, k2p, k3p, k4p;
            rhs(omega, k1w, k1p);
            rhs(omega + 0.5 * h * k1w, k2w, k2p);
            rhs(omega + 0.5 * h * k2w, k3w, k3p);
            rhs(omega + h * k3w, k4w, k4p);
            omega += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            phase += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        tr.points.push_back(omega);
        tr.phases.push_back(phase);
    }
    return tr;
}

// ------------------------------ accumulated phase ---------------------------

// φ_γ(t) by composite Simpson quadrature of the phase integrand along the
// analytic trajectory.
inline double geometric_phase(const ModelParams& p, std::size_t branch, double t,
                              double quad_step = 0.0) {
    if (t == 0.0) return 0.0;
    if (quad_step <= 0.0) quad_step = default_step(p, t);
    long n = static_cast<long>(std::ceil(std::abs(t) / quad_step));
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = t / static_cast<double>(n);
    auto f = [&](double y) {
        return phase_integrand(p, branch, analytic_trajectory(p, branch, y));
    };
    double sum = f(0.0) + f(t);
    for (long k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return sum * h / 3.0;
}

// ------------------------------ overlaps & rho ------------------------------

// ⟨α|β⟩ = exp[(α*β − |α|²/2 − |β|²/2)/hbar]; |⟨α|β⟩| = e^{−|α−β|²/(2 hbar)}
inline Complex coherent_overlap(double hbar, PhasePoint alpha, PhasePoint beta) {
    return std::exp((std::conj(alpha) * beta -
                     0.5 * (std::norm(alpha) + std::norm(beta))) / hbar);
}

// Decoherence factor ⟨Ξ_bra(t)|Ξ_ket(t)⟩ = e^{i(φ_ket−φ_bra)} ⟨Ω_bra|Ω_ket⟩
inline Complex branch_overlap(const ModelParams& p, std::size_t bra_branch,
                              std::size_t ket_branch, double t,
                              double quad_step = 0.0) {
    if (bra_branch == ket_branch) return Complex(1.0, 0.0);
    const PhasePoint wb = analytic_trajectory(p, bra_branch, t);
    const PhasePoint wk = analytic_trajectory(p, ket_branch, t);
    const double dphi = geometric_phase(p, ket_branch, t, quad_step) -
                        geometric_phase(p, bra_branch, t, quad_step);
    return std::exp(Complex(0.0, dphi)) * coherent_overlap(p.hbar, wb, wk);
}

// Reduced state of the measured system: diagonal frozen at the Born weights,
// off-diagonals damped by the branch overlaps.
inline DensityMatrix reduced_density_matrix(const ModelParams& p,
                                            const Amplitudes& a, double t,
                                            double quad_step = 0.0) {
    const std::size_t n = p.levels();
    if (a.levels() != n) throw Error("amplitude count must match spectrum size");

    std::vector<PhasePoint> pts(n);
    std::vector<double> phis(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = analytic_trajectory(p, i, t);
        phis[i] = geometric_phase(p, i, t, quad_step);
    }

    DensityMatrix rho;
    rho.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            if (i == j) {
                rho.m(ii, jj) = a.born(i);
            } else {
                const Complex ov = std::exp(Complex(0.0, phis[i] - phis[j])) *
                                   coherent_overlap(p.hbar, pts[j], pts[i]);
                rho.m(ii, jj) = a.c(ii) * std::conj(a.c(jj)) * ov;
            }
        }
    }
    return rho;
}

} // namespace precs
