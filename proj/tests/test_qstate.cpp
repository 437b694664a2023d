// test_qstate.cpp: State construction, spectra and trace distance

#include <doctest.h>

#include <cmath>
#include <random>

#include "qflow/qstate.hpp"

using namespace qflow;

namespace {

BlochVector random_bloch(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        const BlochVector b{u(rng), u(rng), u(rng)};
        if (b.norm() <= 1.0) return b;
    }
}

}  // namespace

TEST_CASE("default state is the ground state") {
    const DensityMatrix g;
    CHECK(g(1, 1).real() == 1.0);
    CHECK(g(0, 0).real() == 0.0);
    const BlochVector b = g.bloch();
    CHECK(b.z == doctest::Approx(-1.0));
    CHECK(g.purity() == doctest::Approx(1.0));
}

TEST_CASE("Bloch round trip and polar conversion") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const BlochVector b = random_bloch(rng);
        const BlochVector back = bloch_from_density(density_from_bloch(b));
        CHECK((back - b).norm() < 1e-14);
        const BlochVector again = to_cartesian(to_polar(b));
        CHECK((again - b).norm() < 1e-14);
    }
}

TEST_CASE("unphysical Bloch vectors are rejected") {
    CHECK_THROWS_AS(density_from_bloch({0.0, 0.0, 1.1}), InvalidState);
    CHECK_NOTHROW(density_from_bloch({0.0, 0.0, 1.0 + 1e-12}));
    CHECK_THROWS_AS(initial_state({1.5, 0.0, 0.0}), InvalidState);
    CHECK_THROWS_AS(initial_state({-0.1, 0.0, 0.0}), InvalidState);
}

TEST_CASE("from_matrix validates hermiticity and trace") {
    Mat2 m{{0.5, 0.1, 0.2, 0.5}};
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), InvalidState);
    m = Mat2{{0.6, 0.0, 0.0, 0.6}};
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), InvalidState);
    m = Mat2{{0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3}};
    CHECK_NOTHROW(DensityMatrix::from_matrix(m));
}

TEST_CASE("initial-state family") {
    SUBCASE("pure state has the prescribed amplitudes") {
        const double th = 0.4, ph = 1.1;
        const DensityMatrix rho = initial_state({1.0, th, ph});
        CHECK(rho(0, 0).real() == doctest::Approx(std::cos(th) * std::cos(th)));
        const cplx off = std::cos(th) * std::sin(th) * std::polar(1.0, -ph);
        CHECK(std::abs(rho(0, 1) - off) < 1e-15);
        CHECK(rho.purity() == doctest::Approx(1.0));
    }
    SUBCASE("Bloch radius is z") {
        for (double z : {0.0, 0.25, 0.5, 1.0}) CHECK(initial_state({z, 0.3, 0.2}).bloch().norm() == doctest::Approx(z));
    }
    SUBCASE("vartheta0 = pi/2 and pi give the two diagonal states") {
        const double z = 0.5;
        const DensityMatrix a = initial_state({z, kPi / 2.0, 0.3});
        const DensityMatrix b = initial_state({z, kPi, 0.3});
        CHECK(a(0, 0).real() == doctest::Approx((1.0 - z) / 2.0));
        CHECK(b(0, 0).real() == doctest::Approx((1.0 + z) / 2.0));
        CHECK(std::abs(a(0, 1)) < 1e-15);
        CHECK(std::abs(b(0, 1)) < 1e-15);
    }
    SUBCASE("polar parameters are folded into canonical ranges") {
        const PolarBloch p = InitialStateSpec{0.7, 2.0, 0.5}.bloch();
        CHECK(p.theta >= 0.0);
        CHECK(p.theta <= kPi);
        CHECK(p.phi >= 0.0);
        CHECK(p.phi < 2.0 * kPi);
        const BlochVector direct = initial_state({0.7, 2.0, 0.5}).bloch();
        CHECK((to_cartesian(p) - direct).norm() < 1e-14);
    }
}

TEST_CASE("trace distance equals half the Bloch distance") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 10000; ++i) {
        const BlochVector a = random_bloch(rng);
        const BlochVector b = random_bloch(rng);
        const double d = trace_distance(density_from_bloch(a), density_from_bloch(b));
        CHECK(std::abs(d - 0.5 * (a - b).norm()) < 1e-12);
    }
}

TEST_CASE("trace distance is a metric") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const DensityMatrix a = density_from_bloch(random_bloch(rng));
        const DensityMatrix b = density_from_bloch(random_bloch(rng));
        const DensityMatrix c = density_from_bloch(random_bloch(rng));
        CHECK(trace_distance(a, a) == doctest::Approx(0.0));
        CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)));
        CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-14);
        CHECK(trace_distance(a, b) <= 1.0 + 1e-14);
    }
}

TEST_CASE("spectral decomposition") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const BlochVector b = random_bloch(rng);
        if (b.norm() < 1e-3) continue;
        const DensityMatrix rho = density_from_bloch(b);
        const SpectralDecomposition s = eigendecompose(rho, BasisMode::spectral);
        CHECK_FALSE(s.degenerate);
        CHECK(s.eps_plus == doctest::Approx((1.0 + b.norm()) / 2.0));
        CHECK(s.eps_minus == doctest::Approx((1.0 - b.norm()) / 2.0));
        const auto ev = rho.eigenvalues();
        CHECK(ev[0] == doctest::Approx(s.eps_minus));
        CHECK(ev[1] == doctest::Approx(s.eps_plus));
        for (int k = 0; k < 2; ++k) {
            const cplx rv = rho(k, 0) * s.psi_plus[0] + rho(k, 1) * s.psi_plus[1];
            CHECK(std::abs(rv - s.eps_plus * s.psi_plus[k]) < 1e-12);
        }
    }
    CHECK(eigendecompose(DensityMatrix::maximally_mixed(), BasisMode::spectral).degenerate);
}

TEST_CASE("literal eigenvectors are orthonormal and carry the supplied azimuth") {
    const DensityMatrix rho = initial_state({0.6, 0.5, 0.0});
    const SpectralDecomposition s = eigendecompose(rho, BasisMode::literal, 0.9);
    const cplx ov = std::conj(s.psi_plus[0]) * s.psi_minus[0] + std::conj(s.psi_plus[1]) * s.psi_minus[1];
    CHECK(std::abs(ov) < 1e-15);
    CHECK(std::norm(s.psi_plus[0]) + std::norm(s.psi_plus[1]) == doctest::Approx(1.0));
    CHECK(std::arg(s.psi_plus[1]) == doctest::Approx(0.9));
    CHECK(s.phase == doctest::Approx(0.9));
}
