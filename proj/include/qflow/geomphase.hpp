// geomphase.hpp: Mixed-state geometric phase and its closed, flow-coupled and perturbative forms

#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "qflow/channels.hpp"
#include "qflow/infoflow.hpp"

namespace qflow {

struct BranchTerm {
    double weight{0.0};      // sqrt(eps_i(0) eps_i(T))
    cplx overlap{0.0};       // <psi_i(0)|psi_i(T)>
    double connection{0.0};  // Im int <psi_i|d psi_i>, accumulated from the Pancharatnam product
    bool skipped{false};     // weight below 1e-14
};

struct PhaseResult {
    double raw{0.0};        // Arg-consistent value nearest the + branch's unwrapped phase
    double canonical{0.0};  // (-pi, pi]
    double figure{0.0};     // [0, 2 pi)
    std::array<BranchTerm, 2> branches{};  // {+, -}
    std::size_t intervals{0};
    double last_change{0.0};
    bool converged{false};
};

// Extra phase e^{i alpha(branch, t)} applied to the sampled eigenvectors (branch 0 = +, 1 = -).
using GaugeFn = std::function<double(int branch, double t)>;

double canonical_angle(double phi);   // (-pi, pi]
double figure_angle(double phi);      // [0, 2 pi)
double angle_distance(double a, double b);  // |a - b| modulo 2 pi, in [0, pi]

// One evaluation on the given samples:
//   Phi = Arg sum_i sqrt(eps_i(0) eps_i(T)) <psi_i(0)|psi_i(T)> prod_k conj(<psi_i(t_k)|psi_i(t_k+1)>)/|.|
// The literal basis uses the azimuth omega0 t + phi0 with phi0 the initial Bloch azimuth.
PhaseResult gp_discrete(const Trajectory& traj, BasisMode mode, const GaugeFn& gauge = {});

struct GpOptions {
    std::size_t initial_intervals{2000};  // per quasi-period
    double tol{1e-6};
    std::size_t max_intervals{std::size_t{1} << 22};
    GaugeFn gauge;
};

// Doubles the sampling from initial_intervals until successive phases agree to tol.
PhaseResult gp_mixed(const Model& m, const DensityMatrix& rho0, double T, BasisMode mode, const GpOptions& opts = {});

// Re-samples the trajectory's model on [0, traj.t_end()].
PhaseResult gp_mixed(const Trajectory& traj, BasisMode mode, const GpOptions& opts = {});

double quasi_period(double omega0, int n);  // 2 n pi / omega0

// -int_0^T omega0 cos^2(theta(t)/2) dt, T = 2 n pi/omega0, for a pure initial state.
double gp_pure(const InitialStateSpec& spec, const TimeLocalParams& p, int n);

// omega0 [1/2 + r_z / (2 sqrt(4 D^2 - 2 r_z - 1))]; throws on a radicand below -1e-10.
double flow_integrand(double omega0, double r_z, double distance);

// -int_0^T omega0 [1/2 + r_z/(2 sqrt(4 [D(0) + N(t) - M(t)]^2 - 2 r_z - 1))] dt over the ledger grid
// (composite Simpson); the ledger must come from flows() of the same pure initial state.
double gp_flow_form(const InitialStateSpec& spec, const TimeLocalParams& p, int n, const FlowLedger& ledger);

// -pi (1 + cos theta0)
double gp_closed(double theta0);

struct PerturbativeTerms {
    double phi0{0.0};              // unitary-evolution phase from gp_mixed at W = 0 (canonical)
    double phi0_closed_form{0.0};  // arctan(r0 tan(-pi (1 + cos theta0)))
    double kappa1{0.0};            // (1 - e^{-lambda T})/lambda^2 - T/lambda
    double kappa2{0.0};            // T/lambda^2 + (e^{-lambda T} - 1)/lambda^3 - T^2/(2 lambda)
    double c1{0.0};                // (r0 + r0 cos^2 + 2 cos)/4
    double c2{0.0};                // (1 + r0 sin^2 cos/2 - cos^2)/r0
    double total{0.0};             // first-order phase, consistent expansion
    double total_printed{0.0};     // phi0 - W^2 [tan(phi0) c1 kappa1 + omega0 cos^-2(phi0) c2 kappa2]
};

// First order in W^2 of the literal-basis phase over T = 2 n pi/omega0. With |c|^2 = 1 + 2 W^2 kappa(t),
// cos(theta_t) moves by 2 W^2 kappa c2 and the weighted branch ratio by W^2 kappa1 4 c1/(2 r0), giving
//   total = phi0 - W^2 [ -(2 c1/r0^2) sin(phi0) cos(phi0) kappa1
//                        + omega0 (r0 cos^2 phi0 + sin^2 phi0 / r0) c2 kappa2 ]
// where the kappa1 term is absent for pure states (the - branch carries no weight).
PerturbativeTerms gp_perturbative(const InitialStateSpec& spec, const TimeLocalParams& p, int n);

}  // namespace qflow
