#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "precs/fock.hpp"
#include "precs/model.hpp"

#include "support.hpp"

using namespace precs;
using testsupport::qubit_params;

TEST_CASE("validate_model accepts the qubit-boson parameters") {
    const ModelParams p = validate_model(2.0, 1.0, 1.0, {1.0, -1.0});
    CHECK(p.levels() == 2);
    CHECK(p.spectrum[0] == 1.0);
    CHECK(p.spectrum[1] == -1.0);
    CHECK(p.lambda(0) == 2.0);
    CHECK(p.lambda(1) == -2.0);
}

TEST_CASE("validate_model accepts a decoupled apparatus") {
    CHECK_NOTHROW(validate_model(0.0, 1.0, 1.0, {1.0, -1.0}));
}

TEST_CASE("validate_model sorts the spectrum descending") {
    const ModelParams p = validate_model(1.0, 1.0, 1.0, {-0.9, 1.5, 0.3});
    CHECK(p.spectrum == std::vector<double>{1.5, 0.3, -0.9});
}

TEST_CASE("validate_model rejects bad input") {
    CHECK_THROWS_AS(validate_model(2.0, 1.0, 1.0, {1.0, 1.0}), DegenerateSpectrum);
    CHECK_THROWS_AS(validate_model(2.0, 1.0, 0.0, {1.0, -1.0}), NonPositiveHbar);
    CHECK_THROWS_AS(validate_model(2.0, 1.0, -1.0, {1.0, -1.0}), NonPositiveHbar);
    CHECK_THROWS_AS(validate_model(2.0, 1.0, 1.0, {}), EmptySpectrum);
    CHECK_THROWS_AS(validate_model(2.0, -1.0, 1.0, {1.0, -1.0}), Error);
}

TEST_CASE("amplitudes must be normalized") {
    CHECK_NOTHROW(validate_amplitudes({Complex(1.0, 0.0), Complex(0.0, 0.0)}));
    CHECK_THROWS_AS(validate_amplitudes({Complex(1.0, 0.0), Complex(0.5, 0.0)}),
                    Error);
    CHECK_THROWS_AS(validate_amplitudes({}), Error);
}

TEST_CASE("classical Hamiltonian point values") {
    const ModelParams p = qubit_params();
    CHECK(classical_hamiltonian(p, 0, PhasePoint(0.0, 0.0)) == 0.0);
    CHECK(classical_hamiltonian(p, 1, PhasePoint(0.0, 0.0)) == 0.0);
    CHECK(classical_hamiltonian(p, 0, PhasePoint(1.0, 0.0)) == Catch::Approx(5.0));
    CHECK(classical_hamiltonian(p, 1, PhasePoint(0.0, 1.0)) == Catch::Approx(1.0));
}

TEST_CASE("classical Hamiltonian matches the Fock expectation value") {
    const ModelParams p = qubit_params();
    const int n_max = 128;
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> coord(-4.2, 4.2);   // |omega| <= 6
    for (std::size_t g = 0; g < p.levels(); ++g) {
        const Eigen::MatrixXd h = fock::branch_hamiltonian_matrix(p, g, n_max);
        for (int trial = 0; trial < 25; ++trial) {
            const PhasePoint w(coord(rng), coord(rng));
            const auto v = fock::coherent_fock_vector(p.hbar, w, n_max);
            const double expectation =
                (v.amps.adjoint() * h.cast<Complex>() * v.amps)(0, 0).real();
            CHECK(std::abs(expectation - classical_hamiltonian(p, g, w)) < 1e-8);
        }
    }
}

TEST_CASE("classical Hamiltonian only reads the real part of omega") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    const ModelParams p = validate_model(1.7, 0.4, 1.0, {0.8, -0.3});
    for (int trial = 0; trial < 50; ++trial) {
        const PhasePoint w(coord(rng), coord(rng));
        const PhasePoint reflected(w.real(), -w.imag());
        for (std::size_t g = 0; g < p.levels(); ++g)
            CHECK(classical_hamiltonian(p, g, w) ==
                  classical_hamiltonian(p, g, reflected));
    }
}

TEST_CASE("classical Hamiltonian is branch-independent at g = 0") {
    const ModelParams p = validate_model(0.0, 1.3, 1.0, {1.0, -1.0});
    const PhasePoint w(1.5, -0.7);
    CHECK(classical_hamiltonian(p, 0, w) == classical_hamiltonian(p, 1, w));
}

TEST_CASE("density-matrix helpers") {
    DensityMatrix rho;
    rho.m = Eigen::MatrixXcd::Zero(2, 2);
    rho.m(0, 0) = 0.25;
    rho.m(1, 1) = 0.75;
    CHECK(rho.physical());
    CHECK(rho.purity() == Catch::Approx(0.625));

    DensityMatrix pure;
    pure.m = Eigen::MatrixXcd::Zero(2, 2);
    pure.m(0, 0) = 1.0;
    CHECK(trace_distance(rho, pure) == Catch::Approx(0.75));

    DensityMatrix bad = rho;
    bad.m(0, 1) = Complex(0.0, 0.6);   // breaks hermiticity and positivity
    CHECK_FALSE(bad.physical());
}
