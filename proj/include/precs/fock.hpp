// fock.hpp — Brute-force verification in a truncated Fock basis.
//
// Branch states are propagated exactly (to truncation) by eigendecomposition
// of the tridiagonal branch Hamiltonian; everything the analytic modules
// produce (trajectories, phases, overlaps, reduced states, Husimi densities)
// is checked against these vectors.
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "precs/dynamics.hpp"
#include "precs/model.hpp"

namespace precs::fock {

// Poisson tail bound: a coherent state of label Ω has mean occupation
// |Ω|²/hbar; n_max must sit well past the tail.
inline int required_levels(double max_abs_omega, double hbar) {
    const double mean = max_abs_omega * max_abs_omega / hbar;
    return static_cast<int>(std::ceil(mean + 8.0 * std::sqrt(mean) + 16.0));
}

struct FockVector {
    Eigen::VectorXcd amps;   // occupation amplitudes ⟨n|ψ⟩, n = 0..n_max
    int n_max{0};

    double norm() const { return amps.norm(); }
    double tail_weight() const { return std::norm(amps(n_max)); }
};

inline Complex fock_overlap(const FockVector& bra, const FockVector& ket) {
    return bra.amps.dot(ket.amps);   // Eigen's dot conjugates the first operand
}

inline void require_tail(const FockVector& v, const char* what) {
    if (v.tail_weight() >= 1e-12)
        throw TruncationLeak(std::string(what) + ": truncation tail weight " +
                             std::to_string(v.tail_weight()));
}

// H_γ on the truncated basis: diagonal ν·hbar·n, off-diagonal g ω_γ √(hbar(n+1)).
inline Eigen::MatrixXd branch_hamiltonian_matrix(const ModelParams& p,
                                                 std::size_t branch, int n_max) {
    if (n_max < 1) throw Error("n_max must be >= 1");
    const int dim = n_max + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double lam = p.lambda(branch);
    for (int n = 0; n < dim; ++n) {
        h(n, n) = p.nu * p.hbar * n;
        if (n + 1 < dim) {
            const double off = lam * std::sqrt(p.hbar * (n + 1));
            h(n, n + 1) = off;
            h(n + 1, n) = off;
        }
    }
    return h;
}

// Eigendecomposition of one branch Hamiltonian; immutable after construction,
// reusable for every propagation time.
class BranchPropagator {
public:
    BranchPropagator(const ModelParams& p, std::size_t branch, int n_max)
        : hbar_(p.hbar), n_max_(n_max) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            branch_hamiltonian_matrix(p, branch, n_max));
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
        vacuum_coeffs_ = evecs_.row(0).transpose();
    }

    // e^{−i t H_γ / hbar} |0⟩
    FockVector at(double t) const {
        Eigen::VectorXcd phased(evals_.size());
        for (Eigen::Index k = 0; k < evals_.size(); ++k)
            phased(k) = std::exp(Complex(0.0, -t * evals_(k) / hbar_)) *
                        vacuum_coeffs_(k);
        FockVector v;
        v.n_max = n_max_;
        v.amps = evecs_ * phased;
        return v;
    }

private:
    double hbar_;
    int n_max_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd evecs_;
    Eigen::VectorXd vacuum_coeffs_;
};

inline const BranchPropagator& cached_propagator(const ModelParams& p,
                                                 std::size_t branch, int n_max) {
    using Key = std::tuple<double, double, double, double, int>;
    static std::mutex mtx;
    static std::map<Key, std::unique_ptr<BranchPropagator>> table;
    const Key key{p.g, p.nu, p.hbar, p.spectrum.at(branch), n_max};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = table.find(key);
    if (it == table.end())
        it = table.emplace(key, std::make_unique<BranchPropagator>(p, branch, n_max))
                 .first;
    return *it->second;
}

inline FockVector propagate_branch(const ModelParams& p, std::size_t branch,
                                   double t, int n_max) {
    const double amp = p.max_orbit_amplitude(branch, t);
    const int need = required_levels(amp, p.hbar);
    if (n_max < need)
        throw TruncationLeak("n_max " + std::to_string(n_max) +
                             " below tail bound " + std::to_string(need) +
                             " for orbit amplitude " + std::to_string(amp));
    FockVector v = cached_propagator(p, branch, n_max).at(t);
    require_tail(v, "propagate_branch");
    return v;
}

// ⟨n|Ω⟩ = e^{−|Ω|²/(2 hbar)} Ωⁿ / √(hbarⁿ n!)
inline FockVector coherent_fock_vector(double hbar, PhasePoint omega, int n_max) {
    const int need = required_levels(std::abs(omega), hbar);
    if (n_max < need)
        throw TruncationLeak("n_max " + std::to_string(n_max) +
                             " below tail bound " + std::to_string(need) +
                             " for |omega| = " + std::to_string(std::abs(omega)));
    FockVector v;
    v.n_max = n_max;
    v.amps.resize(n_max + 1);
    v.amps(0) = std::exp(-std::norm(omega) / (2.0 * hbar));
    for (int n = 1; n <= n_max; ++n)
        v.amps(n) = v.amps(n - 1) * omega / std::sqrt(hbar * n);
    require_tail(v, "coherent_fock_vector");
    return v;
}

// ρ_Γ via the propagated branches: ρ_{γγ'} = c_γ c*_{γ'} ⟨Ξ_{γ'}(t)|Ξ_γ(t)⟩
inline DensityMatrix exact_rho_gamma(const ModelParams& p, const Amplitudes& a,
                                     double t, int n_max) {
    const std::size_t n = p.levels();
    if (a.levels() != n) throw Error("amplitude count must match spectrum size");
    std::vector<FockVector> branches;
    branches.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        branches.push_back(propagate_branch(p, i, t, n_max));

    DensityMatrix rho;
    rho.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            rho.m(ii, jj) = a.c(ii) * std::conj(a.c(jj)) *
                            fock_overlap(branches[j], branches[i]);
        }
    return rho;
}

// Apparatus Husimi density ⟨Ω|ρ_Ξ(t)|Ω⟩ = Σ_γ |c_γ|² |⟨Ω|Ξ_γ(t)⟩|²
inline double husimi(const ModelParams& p, const Amplitudes& a, double t,
                     PhasePoint probe, int n_max) {
    const FockVector coh = coherent_fock_vector(p.hbar, probe, n_max);
    double value = 0.0;
    for (std::size_t i = 0; i < p.levels(); ++i)
        value += a.born(i) *
                 std::norm(fock_overlap(coh, propagate_branch(p, i, t, n_max)));
    return value;
}

struct PhaseCheck {
    double fidelity{0.0};        // |⟨Ω_γ(t)|Ξ_γ(t)⟩|
    double phase_residual{0.0};  // wrapped arg⟨Ω_γ(t)|Ξ_γ(t)⟩ − φ_γ(t)
};

// Verifies the coherent-trajectory ansatz e^{iφ}|Ω(t)⟩ against the exact
// propagation; this is the contract that pins the sign of the phase integrand.
inline PhaseCheck fidelity_phase_check(const ModelParams& p, std::size_t branch,
                                       double t, int n_max) {
    const FockVector prop = propagate_branch(p, branch, t, n_max);
    const FockVector coh =
        coherent_fock_vector(p.hbar, analytic_trajectory(p, branch, t), n_max);
    const Complex ov = fock_overlap(coh, prop);
    PhaseCheck out;
    out.fidelity = std::abs(ov);
    out.phase_residual =
        std::remainder(std::arg(ov) - geometric_phase(p, branch, t), kTwoPi);
    return out;
}

// ------------------------------- joint state --------------------------------

struct JointState {
    Eigen::MatrixXcd amps;   // levels × (n_max+1), branch-major
    double norm() const { return amps.norm(); }
};

// Propagates |Γ⟩⊗|0⟩ with the full product-space Hamiltonian assembled as
// g·(O_Γ ⊗ O_Ξ) + 1 ⊗ H_Ξ and eigendecomposed densely, without exploiting the
// block structure; comparing against the per-branch assembly checks that
// structure directly.
inline JointState propagate_joint(const ModelParams& p, const Amplitudes& a,
                                  double t, int n_max) {
    const std::size_t n = p.levels();
    if (a.levels() != n) throw Error("amplitude count must match spectrum size");
    const int dim = n_max + 1;
    const Eigen::Index full = static_cast<Eigen::Index>(n) * dim;

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(full, full);
    for (std::size_t gi = 0; gi < n; ++gi) {
        const Eigen::Index base = static_cast<Eigen::Index>(gi) * dim;
        const double lam = p.lambda(gi);
        for (int k = 0; k < dim; ++k) {
            h(base + k, base + k) = p.nu * p.hbar * k;
            if (k + 1 < dim) {
                const double off = lam * std::sqrt(p.hbar * (k + 1));
                h(base + k, base + k + 1) = off;
                h(base + k + 1, base + k) = off;
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(full);
    for (std::size_t gi = 0; gi < n; ++gi)
        psi0(static_cast<Eigen::Index>(gi) * dim) = a.c(static_cast<Eigen::Index>(gi));

    Eigen::VectorXcd coeffs = es.eigenvectors().transpose() * psi0;
    for (Eigen::Index k = 0; k < full; ++k)
        coeffs(k) *= std::exp(Complex(0.0, -t * es.eigenvalues()(k) / p.hbar));
    Eigen::VectorXcd psi = es.eigenvectors() * coeffs;

    JointState js;
    js.amps.resize(static_cast<Eigen::Index>(n), dim);
    for (std::size_t gi = 0; gi < n; ++gi)
        js.amps.row(static_cast<Eigen::Index>(gi)) =
            psi.segment(static_cast<Eigen::Index>(gi) * dim, dim).transpose();
    return js;
}

} // namespace precs::fock
