// channels.hpp: Exactly solvable damping models of a two-level system and their ODE oracles

#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qflow/qstate.hpp"

namespace qflow {

// Time-local (convolutionless) model with a Lorentzian bath.
struct TimeLocalParams {
    double W{0.1};       // coupling strength
    double lambda{1.0};  // spectral width
    double omega0{1.0};  // transition frequency

    double R() const { return W / lambda; }
    cplx Omega() const;  // sqrt(lambda^2 - 4 W^2), complex
    void validate() const;

    // Fixed coupling W, width lambda = W / R.
    static TimeLocalParams from_ratio(double W, double R, double omega0 = 1.0);
};

// Integro-differential model with the exponential kernel gamma e^{-gamma t}.
struct MemoryKernelParams {
    double gamma0{0.1};  // dissipation rate
    double gamma{1.0};   // inverse memory time
    double omega0{1.0};

    double C() const { return gamma0 / gamma; }
    double tau(double t) const { return gamma * t; }
    double memory_time() const { return 1.0 / gamma; }
    cplx Omega() const;  // sqrt(1 - 4C), complex
    void validate() const;

    // Fixed gamma0, gamma = gamma0 / C.
    static MemoryKernelParams from_ratio(double gamma0, double C, double omega0 = 1.0);
};

using Model = std::variant<TimeLocalParams, MemoryKernelParams>;

std::string model_name(const Model& m);
double omega0_of(const Model& m);
void validate(const Model& m);

// J(omega) = W^2 lambda / (pi ((omega0 - omega)^2 + lambda^2)).
double lorentzian_density(double omega, const TimeLocalParams& p);

struct AmplitudeState {
    cplx c{1.0};
    cplx dc{0.0};                 // dc/dt
    std::optional<double> gamma;  // -Re(dc/c); empty at a zero of c
    std::optional<double> delta;  // -Im(dc/c); empty at a zero of c

    bool pole() const { return !gamma.has_value(); }
};

// c(t) = e^{-(lambda + i omega0) t/2} (cosh(Omega t/2) + (lambda/Omega) sinh(Omega t/2)).
AmplitudeState amplitude_c(double t, const TimeLocalParams& p);

// d|c|^2/dt, evaluated without cancellation.
double amplitude_norm_rate(double t, const TimeLocalParams& p);

// Zeros of c in [0, t_max]; nonempty only for R > 1/2.
std::vector<double> amplitude_zeros(const TimeLocalParams& p, double t_max);

// xi(C, tau) = e^{-tau/2} [cosh(Omega tau/2) + sinh(Omega tau/2)/Omega], Omega = sqrt(1 - 4C).
double xi(double C, double tau);
// d xi / d tau = -C tau e^{-tau/2} sinh(Omega tau/2)/(Omega tau/2).
double xi_dtau(double C, double tau);

// Both models are phase covariant: rho00(t) = rho00(0) P(t), rho01(t) = rho01(0) Q(t).
struct ChannelFactors {
    double P{1.0};
    double dP{0.0};
    cplx Q{1.0};
    cplx dQ{0.0};
};

ChannelFactors channel_factors(const Model& m, double t);

// Analytic propagators. Arbitrary rho0 is accepted; (r0, theta0, phi0) are read off rho0
// with phi0 = arg(rho01(0)), the azimuth convention of the printed solution.
DensityMatrix evolve_time_local(const DensityMatrix& rho0, double t, const TimeLocalParams& p);
// Schroedinger picture; coherence carries e^{-i(omega0 t + phi0)} xi(C/2, tau).
DensityMatrix evolve_memory_kernel(const DensityMatrix& rho0, double t, const MemoryKernelParams& p);
DensityMatrix evolve(const Model& m, const DensityMatrix& rho0, double t);
// d rho / dt of the analytic solution.
Mat2 evolve_rate(const Model& m, const DensityMatrix& rho0, double t);

// Shortest intrinsic time scale of the model (system period, bath, oscillation).
double characteristic_time(const Model& m);

struct Sample {
    double t{0.0};
    DensityMatrix rho;
};

struct Trajectory {
    Model model;
    DensityMatrix rho0;
    std::vector<Sample> samples;
    std::string step_info;

    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

// Samples the analytic propagator. times must start at 0 and increase strictly.
Trajectory sample_trajectory(const Model& m, const DensityMatrix& rho0, std::span<const double> times);
Trajectory sample_uniform(const Model& m, const DensityMatrix& rho0, double t_end, std::size_t intervals);

struct PositivityReport {
    std::vector<double> min_eigenvalue;  // per sample
    std::optional<double> first_violation;
    double worst{0.0};
    bool positive{true};
};

PositivityReport positivity_check(const Trajectory& traj, double tol = kPositivityTol);

// ---------------------------------------------------------------------------
// ODE oracles

class StepRejected : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct OdeOptions {
    double dt{0.0};           // 0: model default
    double step_tol{1e-7};    // max local error estimate per step (step doubling)
    double converge_tol{1e-8};
    int max_halvings{12};
};

// Default step: min(2 pi/omega0, 1/lambda or 1/gamma) / 200.
double default_ode_step(const Model& m);

// Fixed-step RK4 of the time-local master equation
//   rho' = -i Delta [s+ s-, rho] + Gamma (2 s- rho s+ - s+ s- rho - rho s+ s-)
// from rho_start at t_start, reporting the state at each time in out_times (ascending, >= t_start).
// Throws NumericalError if a zero of c lies in [t_start, t_last], StepRejected if the
// step-doubling error estimate exceeds opts.step_tol.
std::vector<Mat2> integrate_time_local(const Mat2& rho_start, double t_start, std::span<const double> out_times,
                                       const TimeLocalParams& p, double dt, double step_tol = 1e-7);

DensityMatrix ode_oracle_time_local(const DensityMatrix& rho0, double t, const TimeLocalParams& p, double dt);

// Memory-kernel equation made local with u(t) = int_0^t gamma e^{-gamma s} L rho(t - s) ds:
//   rho' = u,  u' = gamma (L rho - u),  u(0) = 0   (interaction picture),
// then rotated back to the Schroedinger picture.
std::vector<Mat2> integrate_memory_kernel(const Mat2& rho0, std::span<const double> out_times,
                                          const MemoryKernelParams& p, double dt, double step_tol = 1e-7);

DensityMatrix ode_oracle_memory_kernel(const DensityMatrix& rho0, double t, const MemoryKernelParams& p, double dt);

struct OracleRun {
    std::vector<Mat2> states;
    double dt{0.0};
    double last_change{0.0};
    bool converged{false};
};

// Halves dt from the default until two successive runs differ by < converge_tol (max entry).
OracleRun ode_oracle_converged(const Model& m, const DensityMatrix& rho0, std::span<const double> out_times,
                               const OdeOptions& opts = {});

// Residual of the analytic time-local solution substituted into the master equation,
// using a five-point finite difference for d rho/dt.
double time_local_residual(const DensityMatrix& rho0, double t, const TimeLocalParams& p);

}  // namespace qflow
