// channels.cpp: Exactly solvable damping models of a two-level system and their ODE oracles

#include "qflow/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qflow {

namespace {

constexpr double kPoleTol = 1e-14;

// sinh(x)/x, with a three-term series near the branch point.
cplx sinhc(cplx x) {
    if (std::abs(x) < 1e-6) {
        const cplx x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct TimeLocalCore {
    cplx g;       // cosh(x) + (lambda t/2) sinhc(x)
    cplx dg;      // dg/dt
    cplx shc;     // sinhc(x)
    cplx decay;   // e^{-(lambda + i omega0) t/2}
};

TimeLocalCore time_local_core(double t, const TimeLocalParams& p) {
    const cplx omega2(p.lambda * p.lambda - 4.0 * p.W * p.W, 0.0);
    const cplx x = std::sqrt(omega2) * (0.5 * t);
    TimeLocalCore k;
    k.shc = sinhc(x);
    const cplx ch = std::cosh(x);
    k.g = ch + (0.5 * p.lambda * t) * k.shc;
    k.dg = (0.25 * t) * omega2 * k.shc + (0.5 * p.lambda) * ch;
    k.decay = std::exp(cplx(-0.5 * p.lambda * t, -0.5 * p.omega0 * t));
    return k;
}

struct ExtractedPolar {
    double r0;
    double theta0;
    double phi_arg;  // arg(rho01)
    double phi_az;   // Bloch azimuth = -arg(rho01)
};

ExtractedPolar extract(const DensityMatrix& rho0) {
    const BlochVector b = rho0.bloch();
    return {b.norm(), std::atan2(b.transverse(), b.z), std::arg(rho0(0, 1)), std::atan2(b.y, b.x)};
}

DensityMatrix assemble(double rho00, cplx rho01) {
    return DensityMatrix::from_matrix(Mat2{{rho00, rho01, std::conj(rho01), 1.0 - rho00}});
}

// Classic RK4 step for any vector-space state type.
template <class State, class F>
State rk4_step(const F& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, y + k1 * cplx(0.5 * h));
    const State k3 = f(t + 0.5 * h, y + k2 * cplx(0.5 * h));
    const State k4 = f(t + h, y + k3 * cplx(h));
    return y + (k1 + k2 * cplx(2.0) + k3 * cplx(2.0) + k4) * cplx(h / 6.0);
}

// Full step vs two half steps; the half-step result is kept.
template <class State, class F, class Norm>
State doubled_step(const F& f, double t, const State& y, double h, double step_tol, const Norm& norm,
                   const char* op) {
    const State full = rk4_step(f, t, y, h);
    const State half = rk4_step(f, t + 0.5 * h, rk4_step(f, t, y, 0.5 * h), 0.5 * h);
    const double err = norm(half - full) / 15.0;
    if (!(err <= step_tol)) {
        throw StepRejected(op, "step-doubling error estimate " + std::to_string(err) + " exceeds tolerance", t);
    }
    return half;
}

template <class State, class F, class Norm, class Out>
void march(const F& f, State y, double t0, std::span<const double> out_times, double dt, double step_tol,
           const Norm& norm, const char* op, const Out& emit) {
    if (!(dt > 0.0)) throw std::invalid_argument(std::string(op) + ": dt must be positive");
    double t = t0;
    for (double target : out_times) {
        if (target < t - 1e-15 * std::max(1.0, std::abs(t))) {
            throw std::invalid_argument(std::string(op) + ": output times must be ascending");
        }
        const double span = target - t;
        const auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
        if (n > 0) {
            const double h = span / static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k) {
                y = doubled_step(f, t + static_cast<double>(k) * h, y, h, step_tol, norm, op);
            }
        }
        t = target;
        emit(target, y);
    }
}

// (rho, u) pair for the memory-kernel oracle.
struct KernelState {
    Mat2 rho;
    Mat2 u;
    friend KernelState operator+(KernelState l, const KernelState& r) {
        l.rho += r.rho;
        l.u += r.u;
        return l;
    }
    friend KernelState operator-(KernelState l, const KernelState& r) {
        l.rho -= r.rho;
        l.u -= r.u;
        return l;
    }
    friend KernelState operator*(KernelState s, cplx k) {
        s.rho *= k;
        s.u *= k;
        return s;
    }
};

Mat2 damping_dissipator(const Mat2& rho) {
    const Mat2 sp = ops::sigma_plus();
    const Mat2 sm = ops::sigma_minus();
    const Mat2 pe = ops::excited_projector();
    return cplx(2.0) * (sm * rho * sp) - pe * rho - rho * pe;
}

Mat2 time_local_generator(const Mat2& rho, double gamma, double delta) {
    return cplx(0.0, -delta) * ops::commutator(ops::excited_projector(), rho) + cplx(gamma) * damping_dissipator(rho);
}

}  // namespace

// ---------------------------------------------------------------------------
// parameters

cplx TimeLocalParams::Omega() const { return std::sqrt(cplx(lambda * lambda - 4.0 * W * W, 0.0)); }

void TimeLocalParams::validate() const {
    if (!(W >= 0.0) || !(lambda > 0.0) || !(omega0 > 0.0) || !std::isfinite(W) || !std::isfinite(lambda)) {
        throw std::invalid_argument("time-local parameters require W >= 0, lambda > 0, omega0 > 0");
    }
}

TimeLocalParams TimeLocalParams::from_ratio(double W, double R, double omega0) {
    if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
    TimeLocalParams p{W, W / R, omega0};
    p.validate();
    return p;
}

cplx MemoryKernelParams::Omega() const { return std::sqrt(cplx(1.0 - 4.0 * C(), 0.0)); }

void MemoryKernelParams::validate() const {
    if (!(gamma0 >= 0.0) || !(gamma > 0.0) || !(omega0 > 0.0) || !std::isfinite(gamma0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("memory-kernel parameters require gamma0 >= 0, gamma > 0, omega0 > 0");
    }
}

MemoryKernelParams MemoryKernelParams::from_ratio(double gamma0, double C, double omega0) {
    if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
    MemoryKernelParams p{gamma0, gamma0 / C, omega0};
    p.validate();
    return p;
}

std::string model_name(const Model& m) {
    return std::holds_alternative<TimeLocalParams>(m) ? "time-local" : "memory-kernel";
}

double omega0_of(const Model& m) {
    return std::visit([](const auto& p) { return p.omega0; }, m);
}

void validate(const Model& m) {
    std::visit([](const auto& p) { p.validate(); }, m);
}

// ---------------------------------------------------------------------------
// time-local model

double lorentzian_density(double omega, const TimeLocalParams& p) {
    const double d = p.omega0 - omega;
    return p.W * p.W * p.lambda / (kPi * (d * d + p.lambda * p.lambda));
}

AmplitudeState amplitude_c(double t, const TimeLocalParams& p) {
    const TimeLocalCore k = time_local_core(t, p);
    const cplx a(0.5 * p.lambda, 0.5 * p.omega0);
    AmplitudeState s;
    s.c = k.decay * k.g;
    s.dc = k.decay * (k.dg - a * k.g);
    if (std::abs(s.c) > kPoleTol) {
        const cplx ratio = s.dc / s.c;
        s.gamma = -ratio.real();
        s.delta = -ratio.imag();
    }
    return s;
}

double amplitude_norm_rate(double t, const TimeLocalParams& p) {
    const TimeLocalCore k = time_local_core(t, p);
    return -2.0 * p.W * p.W * t * std::exp(-p.lambda * t) * (std::conj(k.g) * k.shc).real();
}

std::vector<double> amplitude_zeros(const TimeLocalParams& p, double t_max) {
    std::vector<double> zeros;
    const double disc = 4.0 * p.W * p.W - p.lambda * p.lambda;
    if (!(disc > 0.0)) return zeros;
    const double w = std::sqrt(disc);
    const double first = 2.0 * (kPi - std::atan(w / p.lambda)) / w;
    const double spacing = 2.0 * kPi / w;
    for (double t = first; t <= t_max; t += spacing) zeros.push_back(t);
    return zeros;
}

// ---------------------------------------------------------------------------
// memory-kernel model

double xi(double C, double tau) {
    const cplx x = std::sqrt(cplx(1.0 - 4.0 * C, 0.0)) * (0.5 * tau);
    return (std::exp(-0.5 * tau) * (std::cosh(x) + (0.5 * tau) * sinhc(x))).real();
}

double xi_dtau(double C, double tau) {
    const cplx x = std::sqrt(cplx(1.0 - 4.0 * C, 0.0)) * (0.5 * tau);
    return -C * tau * std::exp(-0.5 * tau) * sinhc(x).real();
}

// ---------------------------------------------------------------------------
// unified view

ChannelFactors channel_factors(const Model& m, double t) {
    return std::visit(
        overloaded{[t](const TimeLocalParams& p) {
                       const AmplitudeState a = amplitude_c(t, p);
                       return ChannelFactors{std::norm(a.c), amplitude_norm_rate(t, p), a.c, a.dc};
                   },
                   [t](const MemoryKernelParams& p) {
                       const double tau = p.tau(t);
                       const double C = p.C();
                       const cplx rot = std::polar(1.0, -p.omega0 * t);
                       const double x2 = xi(0.5 * C, tau);
                       const cplx q = rot * x2;
                       const cplx dq = rot * (cplx(0.0, -p.omega0) * x2 + p.gamma * xi_dtau(0.5 * C, tau));
                       return ChannelFactors{xi(C, tau), p.gamma * xi_dtau(C, tau), q, dq};
                   }},
        m);
}

DensityMatrix evolve_time_local(const DensityMatrix& rho0, double t, const TimeLocalParams& p) {
    const ExtractedPolar e = extract(rho0);
    const cplx c = amplitude_c(t, p).c;
    const double pop = 0.5 * (1.0 + e.r0 * std::cos(e.theta0)) * std::norm(c);
    const cplx coh = 0.5 * e.r0 * std::sin(e.theta0) * std::polar(1.0, e.phi_arg) * c;
    return assemble(pop, coh);
}

DensityMatrix evolve_memory_kernel(const DensityMatrix& rho0, double t, const MemoryKernelParams& p) {
    const ExtractedPolar e = extract(rho0);
    const double tau = p.tau(t);
    const double pop = 0.5 * (1.0 + e.r0 * std::cos(e.theta0)) * xi(p.C(), tau);
    const cplx coh = 0.5 * e.r0 * std::sin(e.theta0) * std::polar(1.0, -(p.omega0 * t + e.phi_az)) * xi(0.5 * p.C(), tau);
    return assemble(pop, coh);
}

DensityMatrix evolve(const Model& m, const DensityMatrix& rho0, double t) {
    return std::visit(overloaded{[&](const TimeLocalParams& p) { return evolve_time_local(rho0, t, p); },
                                 [&](const MemoryKernelParams& p) { return evolve_memory_kernel(rho0, t, p); }},
                      m);
}

Mat2 evolve_rate(const Model& m, const DensityMatrix& rho0, double t) {
    const ChannelFactors f = channel_factors(m, t);
    const double dpop = rho0(0, 0).real() * f.dP;
    const cplx dcoh = rho0(0, 1) * f.dQ;
    return Mat2{{dpop, dcoh, std::conj(dcoh), -dpop}};
}

double characteristic_time(const Model& m) {
    return std::visit(overloaded{[](const TimeLocalParams& p) {
                                     double tc = std::min(2.0 * kPi / p.omega0, 1.0 / p.lambda);
                                     if (p.W > 0.0) tc = std::min(tc, 1.0 / p.W);
                                     return tc;
                                 },
                                 [](const MemoryKernelParams& p) {
                                     double tc = std::min(2.0 * kPi / p.omega0, 1.0 / p.gamma);
                                     if (p.gamma0 > 0.0) tc = std::min(tc, 1.0 / std::sqrt(p.gamma * p.gamma0));
                                     return tc;
                                 }},
                      m);
}

// ---------------------------------------------------------------------------
// trajectories

Trajectory sample_trajectory(const Model& m, const DensityMatrix& rho0, std::span<const double> times) {
    if (times.empty() || times.front() != 0.0) {
        throw std::invalid_argument("trajectory times must start at t = 0");
    }
    Trajectory traj{m, rho0, {}, {}};
    traj.samples.reserve(times.size());
    double prev = -1.0;
    for (double t : times) {
        if (!(t > prev)) throw std::invalid_argument("trajectory times must increase strictly");
        traj.samples.push_back({t, t == 0.0 ? rho0 : evolve(m, rho0, t)});
        prev = t;
    }
    return traj;
}

Trajectory sample_uniform(const Model& m, const DensityMatrix& rho0, double t_end, std::size_t intervals) {
    if (!(t_end > 0.0) || intervals == 0) throw std::invalid_argument("sample_uniform needs t_end > 0 and intervals > 0");
    std::vector<double> times(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        times[k] = t_end * static_cast<double>(k) / static_cast<double>(intervals);
    }
    Trajectory traj = sample_trajectory(m, rho0, times);
    traj.step_info = "uniform intervals=" + std::to_string(intervals);
    return traj;
}

PositivityReport positivity_check(const Trajectory& traj, double tol) {
    if (traj.samples.empty()) throw std::invalid_argument("positivity_check needs a non-empty trajectory");
    PositivityReport rep;
    rep.min_eigenvalue.reserve(traj.samples.size());
    rep.worst = std::numeric_limits<double>::infinity();
    for (const Sample& s : traj.samples) {
        const double e = s.rho.min_eigenvalue();
        rep.min_eigenvalue.push_back(e);
        rep.worst = std::min(rep.worst, e);
        if (e < -tol && !rep.first_violation) rep.first_violation = s.t;
    }
    rep.positive = !rep.first_violation.has_value();
    return rep;
}

// ---------------------------------------------------------------------------
// ODE oracles

double default_ode_step(const Model& m) {
    return std::visit(overloaded{[](const TimeLocalParams& p) {
                                     return std::min(2.0 * kPi / p.omega0, 1.0 / p.lambda) / 200.0;
                                 },
                                 [](const MemoryKernelParams& p) {
                                     return std::min(2.0 * kPi / p.omega0, 1.0 / p.gamma) / 200.0;
                                 }},
                      m);
}

std::vector<Mat2> integrate_time_local(const Mat2& rho_start, double t_start, std::span<const double> out_times,
                                       const TimeLocalParams& p, double dt, double step_tol) {
    static constexpr const char* kOp = "ode_oracle_time_local";
    p.validate();
    if (!out_times.empty()) {
        for (double z : amplitude_zeros(p, out_times.back())) {
            if (z >= t_start) throw NumericalError(kOp, "zero of c(t) inside the integration interval", z);
        }
    }
    auto f = [&p](double t, const Mat2& rho) {
        const AmplitudeState a = amplitude_c(t, p);
        if (a.pole()) throw NumericalError(kOp, "rates diverge at a zero of c(t)", t);
        return time_local_generator(rho, *a.gamma, *a.delta);
    };
    std::vector<Mat2> out;
    out.reserve(out_times.size());
    march(f, rho_start, t_start, out_times, dt, step_tol, [](const Mat2& m) { return m.max_abs(); }, kOp,
          [&out](double, const Mat2& y) { out.push_back(y); });
    return out;
}

DensityMatrix ode_oracle_time_local(const DensityMatrix& rho0, double t, const TimeLocalParams& p, double dt) {
    const double times[] = {t};
    return DensityMatrix::from_matrix(integrate_time_local(rho0.matrix(), 0.0, times, p, dt).front());
}

std::vector<Mat2> integrate_memory_kernel(const Mat2& rho0, std::span<const double> out_times,
                                          const MemoryKernelParams& p, double dt, double step_tol) {
    static constexpr const char* kOp = "ode_oracle_memory_kernel";
    p.validate();
    const double half_gamma0 = 0.5 * p.gamma0;
    auto f = [&p, half_gamma0](double, const KernelState& s) {
        const Mat2 lrho = cplx(half_gamma0) * damping_dissipator(s.rho);
        return KernelState{s.u, cplx(p.gamma) * (lrho - s.u)};
    };
    auto norm = [](const KernelState& s) { return std::max(s.rho.max_abs(), s.u.max_abs()); };
    std::vector<Mat2> out;
    out.reserve(out_times.size());
    march(f, KernelState{rho0, Mat2{}}, 0.0, out_times, dt, step_tol, norm, kOp,
          [&out, &p](double t, const KernelState& y) {
              Mat2 rho = y.rho;
              const cplx rot = std::polar(1.0, -p.omega0 * t);
              rho(0, 1) *= rot;
              rho(1, 0) *= std::conj(rot);
              out.push_back(rho);
          });
    return out;
}

DensityMatrix ode_oracle_memory_kernel(const DensityMatrix& rho0, double t, const MemoryKernelParams& p, double dt) {
    const double times[] = {t};
    return DensityMatrix::from_matrix(integrate_memory_kernel(rho0.matrix(), times, p, dt).front());
}

OracleRun ode_oracle_converged(const Model& m, const DensityMatrix& rho0, std::span<const double> out_times,
                               const OdeOptions& opts) {
    auto run = [&](double dt) {
        return std::visit(
            overloaded{[&](const TimeLocalParams& p) {
                           return integrate_time_local(rho0.matrix(), 0.0, out_times, p, dt, opts.step_tol);
                       },
                       [&](const MemoryKernelParams& p) {
                           return integrate_memory_kernel(rho0.matrix(), out_times, p, dt, opts.step_tol);
                       }},
            m);
    };
    OracleRun res;
    res.dt = opts.dt > 0.0 ? opts.dt : default_ode_step(m);
    res.states = run(res.dt);
    res.last_change = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.max_halvings; ++k) {
        const double dt = 0.5 * res.dt;
        std::vector<Mat2> finer = run(dt);
        double change = 0.0;
        for (std::size_t i = 0; i < finer.size(); ++i) {
            change = std::max(change, (finer[i] - res.states[i]).max_abs());
        }
        res.states = std::move(finer);
        res.dt = dt;
        res.last_change = change;
        if (change < opts.converge_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double time_local_residual(const DensityMatrix& rho0, double t, const TimeLocalParams& p) {
    if (!(t > 0.0)) throw std::invalid_argument("time_local_residual needs t > 0");
    const AmplitudeState a = amplitude_c(t, p);
    if (a.pole()) throw NumericalError("time_local_residual", "rates diverge at a zero of c(t)", t);
    const double h = std::min(1e-3 * characteristic_time(Model{p}), 0.25 * t);
    auto at = [&](double s) { return evolve_time_local(rho0, s, p).matrix(); };
    const Mat2 deriv = (at(t - 2 * h) - at(t - h) * cplx(8.0) + at(t + h) * cplx(8.0) - at(t + 2 * h)) *
                       cplx(1.0 / (12.0 * h));
    const Mat2 gen = time_local_generator(at(t), *a.gamma, *a.delta);
    return (deriv - gen).max_abs();
}

}  // namespace qflow
