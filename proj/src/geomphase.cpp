// geomphase.cpp: Mixed-state geometric phase and its closed, flow-coupled and perturbative forms

#include "qflow/geomphase.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qflow {

namespace {

constexpr double kBranchCutoff = 1e-14;
constexpr double kOverlapCutoff = 1e-12;

cplx inner(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

std::array<cplx, 2> regauge(std::array<cplx, 2> v, double alpha) {
    const cplx e = std::polar(1.0, alpha);
    v[0] *= e;
    v[1] *= e;
    return v;
}

}  // namespace

double canonical_angle(double phi) {
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

double figure_angle(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    if (w >= 2.0 * kPi) w -= 2.0 * kPi;
    return w;
}

double angle_distance(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

PhaseResult gp_discrete(const Trajectory& traj, BasisMode mode, const GaugeFn& gauge) {
    static constexpr const char* kOp = "gp_mixed";
    const auto& samples = traj.samples;
    if (samples.size() < 2) throw std::invalid_argument("gp_mixed: trajectory needs at least two samples");

    const double omega0 = omega0_of(traj.model);
    const double phi0 = std::atan2(traj.rho0.bloch().y, traj.rho0.bloch().x);

    auto decompose = [&](const Sample& s) {
        const SpectralDecomposition d = eigendecompose(s.rho, mode, omega0 * s.t + phi0);
        if (d.degenerate) throw NumericalError(kOp, "degenerate eigenbasis", s.t);
        return d;
    };
    auto vectors = [&](const SpectralDecomposition& d, double t) {
        std::array<std::array<cplx, 2>, 2> v{d.psi_plus, d.psi_minus};
        if (gauge) {
            v[0] = regauge(v[0], gauge(0, t));
            v[1] = regauge(v[1], gauge(1, t));
        }
        return v;
    };

    const SpectralDecomposition first = decompose(samples.front());
    const SpectralDecomposition last = decompose(samples.back());
    const auto v_first = vectors(first, samples.front().t);
    const auto v_last = vectors(last, samples.back().t);

    PhaseResult res;
    res.intervals = samples.size() - 1;
    const std::array<double, 2> weights{std::sqrt(first.eps_plus * last.eps_plus),
                                        std::sqrt(std::max(0.0, first.eps_minus * last.eps_minus))};
    for (int i = 0; i < 2; ++i) {
        res.branches[i].weight = weights[i];
        res.branches[i].skipped = weights[i] < kBranchCutoff;
        res.branches[i].overlap = inner(v_first[i], v_last[i]);
    }

    auto prev = v_first;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const auto cur = k + 1 == samples.size() ? v_last : vectors(decompose(samples[k]), samples[k].t);
        for (int i = 0; i < 2; ++i) {
            if (res.branches[i].skipped) continue;
            const cplx ov = inner(prev[i], cur[i]);
            if (std::abs(ov) < kOverlapCutoff) {
                throw NumericalError(kOp, "eigenbasis discontinuity between samples", samples[k].t);
            }
            res.branches[i].connection += std::arg(ov);
        }
        prev = cur;
    }

    cplx total{0.0};
    for (const BranchTerm& b : res.branches) {
        if (b.skipped) continue;
        total += b.weight * b.overlap * std::polar(1.0, -b.connection);
    }
    if (std::abs(total) < kBranchCutoff) throw NumericalError(kOp, "vanishing weighted sum, phase undefined", traj.t_end());

    const BranchTerm& plus = res.branches[0];
    const double plus_phase = std::arg(plus.overlap) - plus.connection;
    res.raw = plus_phase + std::remainder(std::arg(total) - plus_phase, 2.0 * kPi);
    res.canonical = canonical_angle(res.raw);
    res.figure = figure_angle(res.raw);
    return res;
}

PhaseResult gp_mixed(const Model& m, const DensityMatrix& rho0, double T, BasisMode mode, const GpOptions& opts) {
    validate(m);
    if (!(T > 0.0)) throw std::invalid_argument("gp_mixed: T must be positive");
    const double periods = std::max(1.0, T * omega0_of(m) / (2.0 * kPi));
    auto intervals = static_cast<std::size_t>(std::ceil(static_cast<double>(opts.initial_intervals) * periods));

    PhaseResult res = gp_discrete(sample_uniform(m, rho0, T, intervals), mode, opts.gauge);
    res.last_change = std::numeric_limits<double>::infinity();
    while (2 * intervals <= opts.max_intervals) {
        intervals *= 2;
        PhaseResult finer = gp_discrete(sample_uniform(m, rho0, T, intervals), mode, opts.gauge);
        finer.last_change = angle_distance(finer.raw, res.raw);
        res = finer;
        if (res.last_change < opts.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

PhaseResult gp_mixed(const Trajectory& traj, BasisMode mode, const GpOptions& opts) {
    return gp_mixed(traj.model, traj.rho0, traj.t_end(), mode, opts);
}

double quasi_period(double omega0, int n) { return 2.0 * kPi * static_cast<double>(n) / omega0; }

double gp_pure(const InitialStateSpec& spec, const TimeLocalParams& p, int n) {
    p.validate();
    if (std::abs(spec.z - 1.0) > 1e-12) throw std::invalid_argument("gp_pure: initial state must be pure (z = 1)");
    if (n < 1) throw std::invalid_argument("gp_pure: n must be >= 1");
    const DensityMatrix rho0 = initial_state(spec);
    const double T = quasi_period(p.omega0, n);

    auto integrand = [&](double t) {
        const BlochVector b = evolve_time_local(rho0, t, p).bloch();
        const double half = 0.5 * std::atan2(b.transverse(), b.z);
        return std::cos(half) * std::cos(half);
    };
    // Pieces no longer than a few intrinsic time scales keep the adaptive rule honest
    // when c(t) oscillates many times per quasi-period.
    const double piece = 4.0 * characteristic_time(Model{p});
    const auto pieces = static_cast<std::size_t>(std::ceil(T / piece));
    double sum = 0.0;
    for (std::size_t k = 0; k < pieces; ++k) {
        const double a = T * static_cast<double>(k) / static_cast<double>(pieces);
        const double b = T * static_cast<double>(k + 1) / static_cast<double>(pieces);
        sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-12);
    }
    return -p.omega0 * sum;
}

double flow_integrand(double omega0, double r_z, double distance) {
    const double rad = 4.0 * distance * distance - 2.0 * r_z - 1.0;
    if (rad < -1e-10) throw NumericalError("gp_flow_form", "negative radicand " + std::to_string(rad));
    if (rad <= 0.0) throw NumericalError("gp_flow_form", "zero Bloch radius, integrand undefined");
    return omega0 * (0.5 + r_z / (2.0 * std::sqrt(rad)));
}

double gp_flow_form(const InitialStateSpec& spec, const TimeLocalParams& p, int n, const FlowLedger& ledger) {
    p.validate();
    if (std::abs(spec.z - 1.0) > 1e-12) throw std::invalid_argument("gp_flow_form: initial state must be pure (z = 1)");
    const double T = quasi_period(p.omega0, n);
    const auto& s = ledger.samples;
    if (s.size() < 3 || s.size() % 2 == 0) throw std::invalid_argument("gp_flow_form: ledger needs an even number of intervals");
    if (std::abs(ledger.t_end() - T) > 1e-12 * T) throw std::invalid_argument("gp_flow_form: ledger does not span the quasi-period");

    const DensityMatrix rho0 = initial_state(spec);
    auto f = [&](const FlowSample& fs) {
        const double r_z = evolve_time_local(rho0, fs.t, p).bloch().z;
        return flow_integrand(p.omega0, r_z, ledger.initial_distance + fs.backward - fs.forward);
    };
    const double h = T / static_cast<double>(s.size() - 1);
    double sum = f(s.front()) + f(s.back());
    for (std::size_t k = 1; k + 1 < s.size(); ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f(s[k]);
    return -sum * h / 3.0;
}

double gp_closed(double theta0) { return -kPi * (1.0 + std::cos(theta0)); }

PerturbativeTerms gp_perturbative(const InitialStateSpec& spec, const TimeLocalParams& p, int n) {
    p.validate();
    const PolarBloch b = spec.bloch();
    const double r0 = b.r;
    if (!(r0 > 0.0)) {
        throw std::domain_error("gp_perturbative: r0 = 0 makes C2 singular; evaluate gp_mixed directly");
    }
    const double T = quasi_period(p.omega0, n);
    const double c = std::cos(b.theta);
    const double s2 = 1.0 - c * c;
    const double lam = p.lambda;
    const double w2 = p.W * p.W;

    PerturbativeTerms pt;
    const TimeLocalParams unitary{0.0, lam, p.omega0};
    pt.phi0 = gp_mixed(Model{unitary}, initial_state(spec), T, BasisMode::literal).canonical;
    pt.phi0_closed_form = std::atan(r0 * std::tan(-kPi * static_cast<double>(n) * (1.0 + c)));
    pt.kappa1 = -std::expm1(-lam * T) / (lam * lam) - T / lam;
    pt.kappa2 = T / (lam * lam) + std::expm1(-lam * T) / (lam * lam * lam) - T * T / (2.0 * lam);
    pt.c1 = 0.25 * (r0 + r0 * c * c + 2.0 * c);
    pt.c2 = (1.0 + 0.5 * r0 * s2 * c - c * c) / r0;

    const double sp = std::sin(pt.phi0);
    const double cp = std::cos(pt.phi0);
    pt.total_printed = pt.phi0 - w2 * (std::tan(pt.phi0) * pt.c1 * pt.kappa1 + p.omega0 / (cp * cp) * pt.c2 * pt.kappa2);

    const bool pure = r0 >= 1.0 - 1e-12;
    const double ratio_term = pure ? 0.0 : -(2.0 * pt.c1 / (r0 * r0)) * sp * cp * pt.kappa1;
    const double transport_term = p.omega0 * (r0 * cp * cp + sp * sp / r0) * pt.c2 * pt.kappa2;
    pt.total = pt.phi0 - w2 * (ratio_term + transport_term);
    return pt;
}

}  // namespace qflow
