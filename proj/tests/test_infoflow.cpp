// test_infoflow.cpp: Flow ledger, rates, BLP search and the weak-coupling expansion

#include <doctest.h>

#include <cmath>
#include <random>

#include "qflow/infoflow.hpp"

using namespace qflow;

namespace {

const double kT = 2.0 * kPi;

std::vector<InitialStateSpec> state_grid() {
    std::vector<InitialStateSpec> g;
    for (double z : {0.25, 0.5, 1.0}) {
        for (double th : {0.1, kPi / 4.0, kPi / 3.0, 1.2, kPi / 2.0}) g.push_back({z, th, kPi / 3.0});
    }
    return g;
}

}  // namespace

TEST_CASE("ledger identity holds along trajectories of both models") {
    const Model models[] = {TimeLocalParams::from_ratio(0.1, 0.3), TimeLocalParams::from_ratio(1.0, 2.0),
                            TimeLocalParams::from_ratio(10.0, 5.0), MemoryKernelParams::from_ratio(0.1, 0.2),
                            MemoryKernelParams::from_ratio(0.1, 2.0)};
    for (const Model& m : models) {
        for (const InitialStateSpec& s : state_grid()) {
            const FlowLedger led = flows(initial_state(s), m, 2.0 * kT);
            CHECK(led.ledger_residual() < 1e-10);
            CHECK(led.N() >= 0.0);
            CHECK(led.M() >= 0.0);
        }
    }
}

TEST_CASE("segments partition the horizon into monotone pieces") {
    const FlowLedger led = flows(initial_state({1.0, kPi / 4.0, 0.0}), TimeLocalParams::from_ratio(1.0, 3.0), kT);
    REQUIRE(led.segments.size() >= 2);
    CHECK(led.segments.front().t_begin == 0.0);
    CHECK(led.segments.back().t_end == doctest::Approx(kT));
    double n = 0.0, m = 0.0;
    for (std::size_t i = 0; i < led.segments.size(); ++i) {
        const FlowSegment& s = led.segments[i];
        if (i > 0) {
            CHECK(s.t_begin == doctest::Approx(led.segments[i - 1].t_end));
            CHECK(s.direction != led.segments[i - 1].direction);
        }
        const double inc = s.d_end - s.d_begin;
        if (inc > 0) n += inc;
        else m -= inc;
    }
    CHECK(n == doctest::Approx(led.N()).epsilon(1e-12));
    CHECK(m == doctest::Approx(led.M()).epsilon(1e-12));
}

TEST_CASE("analytic rate matches a numerical derivative of D") {
    const DensityMatrix rho0 = initial_state({0.7, 0.5, 1.0});
    for (const Model& m : {Model{TimeLocalParams{1.0, 0.5, 1.0}}, Model{MemoryKernelParams{0.1, 0.05, 1.0}}}) {
        for (double t : {0.3, 1.4, 3.9}) {
            CHECK(sigma(t, m, rho0) == doctest::Approx(sigma_numeric(t, m, rho0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("no backflow in the Markovian regime") {
    for (double R : {0.05, 0.2, 0.35, 0.5}) {
        for (const InitialStateSpec& s : state_grid()) {
            const FlowLedger led = flows(initial_state(s), TimeLocalParams::from_ratio(1.0, R), kT);
            CAPTURE(R);
            CHECK(led.N() < 1e-10);
        }
    }
    for (double C : {0.05, 0.15, 0.24}) {
        const FlowLedger led = flows(initial_state({1.0, 0.3, 0.0}), MemoryKernelParams::from_ratio(0.1, C), kT);
        CHECK(led.N() < 1e-10);
        REQUIRE(led.positive.has_value());
        CHECK(*led.positive);
    }
}

TEST_CASE("backflow appears once c vanishes inside the horizon") {
    const TimeLocalParams p = TimeLocalParams::from_ratio(1.0, 2.0);
    REQUIRE_FALSE(amplitude_zeros(p, kT).empty());
    const FlowLedger led = flows(initial_state({1.0, kPi / 4.0, 0.0}), p, kT);
    CHECK(led.N() > 1e-3);
}

TEST_CASE("flows relative to another standard state") {
    const DensityMatrix standard = DensityMatrix::maximally_mixed();
    const FlowLedger led = flows(initial_state({1.0, 0.3, 0.0}), TimeLocalParams::from_ratio(1.0, 2.0), kT, standard);
    CHECK(led.initial_distance == doctest::Approx(0.5));
    CHECK(led.ledger_residual() < 1e-10);
}

TEST_CASE("flows reject bad arguments") {
    const DensityMatrix rho0 = initial_state({1.0, 0.3, 0.0});
    CHECK_THROWS_AS(flows(rho0, TimeLocalParams{}, 0.0), std::invalid_argument);
    FlowOptions odd;
    odd.intervals = 3;
    CHECK_NOTHROW(flows(rho0, TimeLocalParams{}, 1.0, DensityMatrix::ground(), odd));
}

TEST_CASE("BLP grid search") {
    const BlochGrid small{5, 6, {0.5, 1.0}};
    CHECK(small.points().size() == 60);
    SUBCASE("zero in the Markovian regime") {
        const BlpResult r = blp_measure(TimeLocalParams::from_ratio(1.0, 0.4), small, kT);
        CHECK(r.value < 1e-10);
        CHECK(r.pairs == 60 * 59 / 2);
        CHECK(r.distinct_pairs < r.pairs);
    }
    SUBCASE("positive, deterministic and thread-count independent above R = 1/2") {
        const Model m = TimeLocalParams::from_ratio(1.0, 2.0);
        const BlpResult a = blp_measure(m, small, kT, 1);
        const BlpResult b = blp_measure(m, small, kT, 3);
        CHECK(a.value > 1e-3);
        CHECK(a.value == b.value);
        CHECK(a.best_pair == b.best_pair);
        // an excited/ground pair realises at least the single-state backflow against the ground state
        const FlowLedger led = flows(initial_state({1.0, 0.0, 0.0}), m, kT);
        CHECK(a.value >= led.N() - 1e-9);
    }
    SUBCASE("value of a single pair equals its distance increase") {
        const Model m = TimeLocalParams::from_ratio(1.0, 2.0);
        const DensityMatrix a = initial_state({1.0, 0.0, 0.0});
        const DensityMatrix g = DensityMatrix::ground();
        const BlpResult r = blp_measure(m, {{a, g}}, kT);
        CHECK(r.value == doctest::Approx(flows(a, m, kT).N()).epsilon(1e-8));
    }
}

TEST_CASE("weak-coupling flow expansion") {
    const InitialStateSpec spec{0.5, kPi / 4.0, 0.0};
    double prev = 0.0;
    for (double W : {0.04, 0.02, 0.01}) {
        const TimeLocalParams p{W, 1.0, 1.0};
        const WeakCouplingFlows w = weak_coupling_flows(spec, p, kT);
        CHECK(w.reliable);
        const double exact = flows(initial_state(spec), p, kT).M();
        const double rel = std::abs(w.m - exact) / exact;
        if (prev > 0.0) {
            CHECK(prev / rel > 2.8);
            CHECK(prev / rel < 5.7);
        }
        prev = rel;
        // the alternative bracket keeps an O(1) relative error
        CHECK(std::abs(w.m_printed - exact) / exact > 0.1);
    }
    CHECK_FALSE(weak_coupling_flows(spec, TimeLocalParams{0.5, 1.0, 1.0}, kT).reliable);
}
