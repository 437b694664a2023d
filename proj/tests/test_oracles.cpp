// test_oracles.cpp: Library values against references produced by tests/oracles/generate_oracles.py

#include <doctest.h>

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qflow/channels.hpp"
#include "qflow/geomphase.hpp"
#include "qflow/infoflow.hpp"

using namespace qflow;

namespace {

const double kT = 2.0 * kPi;

}  // namespace

TEST_CASE("amplitude norm matches direct integration of the kernel equation") {
    struct Case {
        double W;
        double values[4];
    };
    const double times[4] = {0.0, 0.5, 1.7, kT};
    const Case cases[] = {
        {0.3, {1.0, 0.9809507600910325, 0.8501871938445755, 0.3596839264706762}},
        {2.0, {1.0, 0.36851558989805355, 0.19283272881190758, 0.0012590971799695465}},
    };
    for (const Case& c : cases) {
        const TimeLocalParams p{c.W, 1.0, 1.0};
        for (int k = 0; k < 4; ++k) {
            CAPTURE(c.W);
            CAPTURE(times[k]);
            CHECK(std::norm(amplitude_c(times[k], p).c) == doctest::Approx(c.values[k]).epsilon(1e-10));
        }
    }
    CHECK(std::arg(amplitude_c(1.7, TimeLocalParams{0.3, 1.0, 1.0}).c) == doctest::Approx(-0.85).epsilon(1e-12));
}

TEST_CASE("memory-kernel population factor matches direct integration") {
    struct Case {
        double C;
        double values[4];
    };
    const double taus[4] = {0.0, 1.0, 5.0, 20.0};
    const Case cases[] = {
        {0.1, {1.0, 0.9634959612803474, 0.6503045482821674, 0.12024853758699307}},
        {0.25, {1.0, 0.9097959895692121, 0.28729749518378933, 0.0004993992273884313}},
        {1.0, {1.0, 0.6597001533916547, -0.0745905665949835, -2.4293994802857555e-05}},
    };
    for (const Case& c : cases) {
        for (int k = 0; k < 4; ++k) {
            CAPTURE(c.C);
            CAPTURE(taus[k]);
            CHECK(xi(c.C, taus[k]) == doctest::Approx(c.values[k]).epsilon(1e-9).scale(1e-6));
        }
    }
}

TEST_CASE("Lorentzian spectral density integrates to W^2") {
    const TimeLocalParams p{0.7, 0.4, 1.0};
    auto f = [&](double w) { return lorentzian_density(w, p); };
    boost::math::quadrature::tanh_sinh<double> inner;
    boost::math::quadrature::exp_sinh<double> tail;
    const double core = inner.integrate(f, -50.0, 50.0);
    const double right = tail.integrate(f, 50.0, std::numeric_limits<double>::infinity());
    const double left = tail.integrate([&](double u) { return f(-u); }, 50.0, std::numeric_limits<double>::infinity());
    const double total = core + left + right;
    CHECK(total == doctest::Approx(0.4899999999999999).epsilon(1e-10));
    CHECK(total == doctest::Approx(p.W * p.W).epsilon(1e-10));
}

TEST_CASE("information flows over one quasi-period match dense sampling") {
    struct Case {
        InitialStateSpec spec;
        double W, lambda, N, M, tol;
    };
    const Case cases[] = {
        {{1.0, kPi / 4.0, 0.0}, 1.0, 0.5, 0.34146043273174, 0.950224292311461, 1e-5},
        {{0.5, kPi / 3.0, 0.0}, 2.0, 1.0, 0.19348378024960428, 0.6187995271114989, 1e-5},
        {{0.75, kPi / 8.0, 0.0}, 0.1, 1.0, 0.0, 0.07742046387588619, 1e-9},
    };
    for (const Case& c : cases) {
        const FlowLedger led = flows(initial_state(c.spec), Model{TimeLocalParams{c.W, c.lambda, 1.0}}, kT);
        CAPTURE(c.W);
        CHECK(std::abs(led.N() - c.N) < c.tol);
        CHECK(std::abs(led.M() - c.M) < c.tol);
    }
}

TEST_CASE("geometric phase matches an independent Pancharatnam evaluation") {
    struct Case {
        InitialStateSpec spec;
        double W, lambda, phase;
    };
    const Case cases[] = {
        {{0.5, kPi / 4.0, kPi / 3.0}, 0.1, 1.0, -2.996919039902349},
        {{1.0, kPi / 4.0, kPi / 3.0}, 1.0, 0.5, -0.494141411723026},
        {{0.75, kPi / 3.0, 0.2}, 0.5, 2.0, -0.5963777198613531},
    };
    for (const Case& c : cases) {
        const PhaseResult ph =
            gp_mixed(Model{TimeLocalParams{c.W, c.lambda, 1.0}}, initial_state(c.spec), kT, BasisMode::literal);
        CAPTURE(c.W);
        CHECK(ph.converged);
        CHECK(angle_distance(ph.canonical, c.phase) < 1e-6);
    }
}
