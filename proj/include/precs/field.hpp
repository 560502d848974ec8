// field.hpp — Phase-space representation of the apparatus state: branch
// components h_γ, the density χ², parametrized system states, quadrature
// reconstruction of ρ_Γ, differential entropy, ε-supports and readout.
//
// Measure convention: dμ = dReΩ dImΩ / (π hbar). Under it each branch
// component h_γ(Ω) = |⟨Ω|Ω_γ(t)⟩|² = e^{−|Ω−Ω_γ(t)|²/hbar} (peak value 1)
// integrates to exactly 1, and ∫ dμ χ² = 1 at every time.
#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "precs/dynamics.hpp"
#include "precs/model.hpp"

namespace precs::field {

// χ below this floor marks a node whose parametrized state is undefined;
// quadratures skip such nodes.
inline constexpr double kChiFloor = 1e-150;

// Compensated (Kahan) accumulator so reductions are order-independent
// well below the stated tolerances.
struct KahanSum {
    double sum{0.0};
    double carry{0.0};
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// ----------------------------------- Grid -----------------------------------

// Rectangular midpoint-rule mesh on the Ω plane. Nodes are cell centres;
// the mesh is anchored so that one node sits exactly at the origin.
struct Grid {
    double re_min{0.0}, re_max{0.0};   // outer cell edges
    double im_min{0.0}, im_max{0.0};
    int n_re{0}, n_im{0};
    double hbar{1.0};

    double dre() const { return (re_max - re_min) / n_re; }
    double dim() const { return (im_max - im_min) / n_im; }
    // node weight of the measure dμ = dReΩ dImΩ / (π hbar)
    double weight() const { return dre() * dim() / (0.5 * kTwoPi * hbar); }
    int nodes() const { return n_re * n_im; }

    double node_re(int i) const { return re_min + (i + 0.5) * dre(); }
    double node_im(int j) const { return im_min + (j + 0.5) * dim(); }
    // row-major over (im, re): j outer, i inner
    int index(int i, int j) const { return j * n_re + i; }
    PhasePoint node(int idx) const {
        return PhasePoint(node_re(idx % n_re), node_im(idx / n_re));
    }
};

namespace detail {

struct Box {
    double re_lo{0.0}, re_hi{0.0}, im_lo{0.0}, im_hi{0.0};
};

// Bounding box of every branch orbit (plus the origin). For the free mode the
// orbits are segments swept up to t_max.
inline Box orbit_box(const ModelParams& p, double t_max) {
    Box b;
    for (std::size_t g = 0; g < p.levels(); ++g) {
        if (p.nu > 0.0) {
            const double c = p.orbit_center(g).real();
            const double r = p.orbit_radius(g);
            b.re_lo = std::min(b.re_lo, c - r);
            b.re_hi = std::max(b.re_hi, c + r);
            b.im_lo = std::min(b.im_lo, -r);
            b.im_hi = std::max(b.im_hi, r);
        } else {
            const double end = -p.lambda(g) * t_max;
            b.im_lo = std::min(b.im_lo, std::min(0.0, end));
            b.im_hi = std::max(b.im_hi, std::max(0.0, end));
        }
    }
    return b;
}

// Snap [lo−pad, hi+pad] outward onto a mesh of spacing delta whose node
// centres lie at integer multiples of delta.
inline void snap_axis(double lo, double hi, double pad, double delta,
                      double& out_min, double& out_max, int& out_n) {
    const int m = static_cast<int>(std::ceil((pad - lo) / delta - 0.5));
    const int q = static_cast<int>(std::ceil((hi + pad) / delta - 0.5));
    out_min = -(m + 0.5) * delta;
    out_max = (q + 0.5) * delta;
    out_n = m + q + 1;
}

} // namespace detail

// Default mesh: covers every orbit with padding 5√hbar at spacing √hbar/8.
inline Grid auto_grid(const ModelParams& p, double t_max) {
    const detail::Box box = detail::orbit_box(p, t_max);
    const double pad = 5.0 * std::sqrt(p.hbar);
    const double delta = std::sqrt(p.hbar) / 8.0;
    Grid g;
    g.hbar = p.hbar;
    detail::snap_axis(box.re_lo, box.re_hi, pad, delta, g.re_min, g.re_max, g.n_re);
    detail::snap_axis(box.im_lo, box.im_hi, pad, delta, g.im_min, g.im_max, g.n_im);
    return g;
}

// Mesh invariants: padding ≥ 5√hbar beyond every orbit, spacing ≤ √hbar/8.
inline void require_grid_fits(const Grid& g, const ModelParams& p, double t_max) {
    const detail::Box box = detail::orbit_box(p, t_max);
    const double pad = 5.0 * std::sqrt(p.hbar);
    const double dmax = std::sqrt(p.hbar) / 8.0;
    const double slack = 1e-9;
    if (g.n_re < 1 || g.n_im < 1 || g.hbar != p.hbar)
        throw GridTooCoarse("grid does not match model (node counts / hbar)");
    if (g.dre() > dmax * (1.0 + 1e-12) || g.dim() > dmax * (1.0 + 1e-12))
        throw GridTooCoarse("grid spacing exceeds sqrt(hbar)/8");
    if (g.re_min > box.re_lo - pad + slack || g.re_max < box.re_hi + pad - slack ||
        g.im_min > box.im_lo - pad + slack || g.im_max < box.im_hi + pad - slack)
        throw GridTooCoarse("grid bounds do not cover the orbits plus 5*sqrt(hbar)");
}

// --------------------------------- ChiField ---------------------------------

struct ChiField {
    Grid grid;
    double t{0.0};
    Eigen::ArrayXXd h;      // levels × nodes, branch components h_γ(Ω)
    Eigen::ArrayXd chi2;    // nodes, χ²(Ω) = Σ_γ |c_γ|² h_γ(Ω)

    std::size_t levels() const { return static_cast<std::size_t>(h.rows()); }
    double norm() const {
        KahanSum s;
        for (Eigen::Index k = 0; k < chi2.size(); ++k) s.add(chi2(k));
        return s.value() * grid.weight();
    }
};

// ------------------------------ point evaluators ----------------------------

// h_γ(Ω) = |⟨Ω|Ω_γ(t)⟩|² = e^{−|Ω−Ω_γ(t)|²/hbar}, peak 1 on the trajectory
inline double branch_component(const ModelParams& p, std::size_t branch, double t,
                               PhasePoint omega) {
    return std::norm(coherent_overlap(p.hbar, omega, analytic_trajectory(p, branch, t)));
}

inline double chi_squared(const ModelParams& p, const Amplitudes& a, double t,
                          PhasePoint omega) {
    double v = 0.0;
    for (std::size_t g = 0; g < p.levels(); ++g)
        v += a.born(g) * branch_component(p, g, t, omega);
    return v;
}

// Parametrized pure state of the measured system at Ω:
// |φ(Ω)⟩ = χ(Ω)⁻¹ Σ_γ c_γ ⟨Ω|Ω_γ(t)⟩ |γ⟩
inline Eigen::VectorXcd parametric_state(const ModelParams& p, const Amplitudes& a,
                                         double t, PhasePoint omega) {
    const std::size_t n = p.levels();
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    double chi2 = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
        const Complex ov =
            coherent_overlap(p.hbar, omega, analytic_trajectory(p, g, t));
        v(static_cast<Eigen::Index>(g)) = a.c(static_cast<Eigen::Index>(g)) * ov;
        chi2 += a.born(g) * std::norm(ov);
    }
    const double chi = std::sqrt(chi2);
    if (chi < kChiFloor)
        throw VanishingWeight("chi below floor at this node; state undefined");
    return v / chi;
}

// ------------------------------- field assembly -----------------------------

inline ChiField evaluate_field(const ModelParams& p, const Amplitudes& a, double t,
                               const Grid& grid) {
    if (a.levels() != p.levels())
        throw Error("amplitude count must match spectrum size");
    require_grid_fits(grid, p, t);

    const std::size_t n = p.levels();
    ChiField f;
    f.grid = grid;
    f.t = t;
    f.h.resize(static_cast<Eigen::Index>(n), grid.nodes());
    f.chi2 = Eigen::ArrayXd::Zero(grid.nodes());

    std::vector<PhasePoint> centers(n);
    for (std::size_t g = 0; g < n; ++g) centers[g] = analytic_trajectory(p, g, t);

    for (int j = 0; j < grid.n_im; ++j) {
        const double im = grid.node_im(j);
        for (int i = 0; i < grid.n_re; ++i) {
            const double re = grid.node_re(i);
            const int idx = grid.index(i, j);
            double chi2 = 0.0;
            for (std::size_t g = 0; g < n; ++g) {
                const double dr = re - centers[g].real();
                const double di = im - centers[g].imag();
                const double hval = std::exp(-(dr * dr + di * di) / p.hbar);
                f.h(static_cast<Eigen::Index>(g), idx) = hval;
                chi2 += a.born(g) * hval;
            }
            f.chi2(idx) = chi2;
        }
    }
    return f;
}

// Quadrature reconstruction ρ_Γ = Σ_nodes w χ²(Ω) |φ(Ω)⟩⟨φ(Ω)|; nodes whose
// χ falls below the floor are skipped (their quadrature weight is negligible).
inline DensityMatrix rho_from_field(const ModelParams& p, const Amplitudes& a,
                                    const ChiField& f) {
    const std::size_t n = p.levels();
    if (a.levels() != n || f.levels() != n)
        throw Error("amplitude/field level count must match spectrum size");

    std::vector<Complex> centers(n);
    for (std::size_t g = 0; g < n; ++g)
        centers[g] = analytic_trajectory(p, g, f.t);

    std::vector<KahanSum> acc_re(n * n), acc_im(n * n);
    Eigen::VectorXcd weighted(static_cast<Eigen::Index>(n));

    const double w = f.grid.weight();
    for (int idx = 0; idx < f.grid.nodes(); ++idx) {
        const double chi2 = f.chi2(idx);
        if (chi2 < kChiFloor * kChiFloor) continue;
        const PhasePoint omega = f.grid.node(idx);
        const double chi = std::sqrt(chi2);
        for (std::size_t g = 0; g < n; ++g)
            weighted(static_cast<Eigen::Index>(g)) =
                a.c(static_cast<Eigen::Index>(g)) *
                coherent_overlap(p.hbar, omega, centers[g]) / chi;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const Complex term = w * chi2 *
                                     weighted(static_cast<Eigen::Index>(r)) *
                                     std::conj(weighted(static_cast<Eigen::Index>(c)));
                acc_re[r * n + c].add(term.real());
                acc_im[r * n + c].add(term.imag());
            }
    }

    DensityMatrix rho;
    rho.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            rho.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(acc_re[r * n + c].value(), acc_im[r * n + c].value());
    return rho;
}

// Differential entropy E = −∫ dμ χ² ln χ² in nats, with 0·ln 0 := 0.
inline double differential_entropy(const ChiField& f) {
    KahanSum s;
    for (Eigen::Index k = 0; k < f.chi2.size(); ++k) {
        const double v = f.chi2(k);
        if (v > 0.0) s.add(-v * std::log(v));
    }
    return s.value() * f.grid.weight();
}

// ------------------------------- ε-supports ---------------------------------

struct EpsSupport {
    std::size_t branch{0};
    double eps{0.0};
    std::vector<int> cells;   // node indices with h_γ(Ω) > eps, ascending
};

inline std::vector<EpsSupport> eps_supports(const ChiField& f, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error("eps must lie in (0,1)");
    std::vector<EpsSupport> out;
    out.reserve(f.levels());
    for (std::size_t g = 0; g < f.levels(); ++g) {
        EpsSupport s;
        s.branch = g;
        s.eps = eps;
        for (int idx = 0; idx < f.grid.nodes(); ++idx)
            if (f.h(static_cast<Eigen::Index>(g), idx) > eps) s.cells.push_back(idx);
        out.push_back(std::move(s));
    }
    return out;
}

namespace detail {

// Minimal 4-neighbour graph distance between two node sets (0 = shared node).
inline int support_graph_distance(const std::vector<int>& a,
                                  const std::vector<int>& b, const Grid& grid,
                                  int cutoff) {
    if (a.empty() || b.empty()) return cutoff + 1;
    std::vector<int> dist(static_cast<std::size_t>(grid.nodes()), -1);
    std::vector<char> target(static_cast<std::size_t>(grid.nodes()), 0);
    for (int idx : b) target[static_cast<std::size_t>(idx)] = 1;

    std::deque<int> queue;
    for (int idx : a) {
        if (target[static_cast<std::size_t>(idx)]) return 0;
        dist[static_cast<std::size_t>(idx)] = 0;
        queue.push_back(idx);
    }
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        const int d = dist[static_cast<std::size_t>(cur)];
        if (d >= cutoff) continue;
        const int i = cur % grid.n_re;
        const int j = cur / grid.n_re;
        const int nb[4] = {i > 0 ? cur - 1 : -1, i + 1 < grid.n_re ? cur + 1 : -1,
                           j > 0 ? cur - grid.n_re : -1,
                           j + 1 < grid.n_im ? cur + grid.n_re : -1};
        for (int nxt : nb) {
            if (nxt < 0 || dist[static_cast<std::size_t>(nxt)] >= 0) continue;
            if (target[static_cast<std::size_t>(nxt)]) return d + 1;
            dist[static_cast<std::size_t>(nxt)] = d + 1;
            queue.push_back(nxt);
        }
    }
    return cutoff + 1;
}

} // namespace detail

// Strong distinguishability: every pairwise support intersection empty.
// gap_cells > 0 strengthens it to "supports at graph distance > gap_cells".
inline bool supports_disjoint(const std::vector<EpsSupport>& supports,
                              const Grid& grid, int gap_cells = 0) {
    for (std::size_t i = 0; i < supports.size(); ++i)
        for (std::size_t j = i + 1; j < supports.size(); ++j)
            if (detail::support_graph_distance(supports[i].cells, supports[j].cells,
                                               grid, gap_cells) <= gap_cells)
                return false;
    return true;
}

// Connected components (4-connectivity) of {Ω : χ²(Ω) > eps}.
inline int count_superlevel_components(const ChiField& f, double eps) {
    const int nodes = f.grid.nodes();
    std::vector<char> in(static_cast<std::size_t>(nodes), 0);
    for (int idx = 0; idx < nodes; ++idx) in[static_cast<std::size_t>(idx)] = f.chi2(idx) > eps;
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    int components = 0;
    std::deque<int> queue;
    for (int start = 0; start < nodes; ++start) {
        if (!in[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) continue;
        ++components;
        seen[static_cast<std::size_t>(start)] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            const int cur = queue.front();
            queue.pop_front();
            const int i = cur % f.grid.n_re;
            const int j = cur / f.grid.n_re;
            const int nb[4] = {i > 0 ? cur - 1 : -1,
                               i + 1 < f.grid.n_re ? cur + 1 : -1,
                               j > 0 ? cur - f.grid.n_re : -1,
                               j + 1 < f.grid.n_im ? cur + f.grid.n_re : -1};
            for (int nxt : nb) {
                if (nxt < 0 || !in[static_cast<std::size_t>(nxt)] ||
                    seen[static_cast<std::size_t>(nxt)])
                    continue;
                seen[static_cast<std::size_t>(nxt)] = 1;
                queue.push_back(nxt);
            }
        }
    }
    return components;
}

// --------------------------------- readout ----------------------------------

struct ReadoutReport {
    std::vector<double> probabilities;   // normalized over the captured mass
    std::vector<double> support_mass;    // raw ∫_{S_γ} dμ χ² per branch
    std::vector<double> born;            // |c_γ|²
    std::vector<double> recon_diagonal;  // diagonal of the field reconstruction
    DensityMatrix decohered;             // Σ_γ |c_γ|² |γ⟩⟨γ|
    double trace_dist_decohered_exact{0.0};
};

// Reads outcome probabilities off the disjoint supports and reports how they
// compare with the Born weights and with the reconstructed state.
inline ReadoutReport readout(const ModelParams& p, const Amplitudes& a,
                             const ChiField& f,
                             const std::vector<EpsSupport>& supports) {
    const std::size_t n = p.levels();
    if (supports.size() != n) throw Error("one support per branch required");
    if (!supports_disjoint(supports, f.grid))
        throw NotDisjoint("supports overlap; no informative readout exists yet");
    for (const auto& s : supports)
        if (s.cells.empty())
            throw Error("empty support for branch " + std::to_string(s.branch));

    ReadoutReport rep;
    rep.support_mass.resize(n);
    const double w = f.grid.weight();
    double total = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
        KahanSum s;
        for (int idx : supports[g].cells) s.add(f.chi2(idx));
        rep.support_mass[g] = s.value() * w;
        total += rep.support_mass[g];
    }
    rep.probabilities.resize(n);
    for (std::size_t g = 0; g < n; ++g)
        rep.probabilities[g] = rep.support_mass[g] / total;

    rep.born.resize(n);
    for (std::size_t g = 0; g < n; ++g) rep.born[g] = a.born(g);

    const DensityMatrix recon = rho_from_field(p, a, f);
    rep.recon_diagonal.resize(n);
    for (std::size_t g = 0; g < n; ++g)
        rep.recon_diagonal[g] = recon.m(static_cast<Eigen::Index>(g),
                                        static_cast<Eigen::Index>(g)).real();

    rep.decohered.m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                             static_cast<Eigen::Index>(n));
    for (std::size_t g = 0; g < n; ++g)
        rep.decohered.m(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g)) =
            rep.born[g];
    rep.trace_dist_decohered_exact =
        trace_distance(rep.decohered, reduced_density_matrix(p, a, f.t));
    return rep;
}

} // namespace precs::field
