// analysis.hpp: Parameter sweeps, figure presets and the critical-point search

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qflow/channels.hpp"
#include "qflow/geomphase.hpp"
#include "qflow/infoflow.hpp"

namespace qflow {

inline constexpr const char* kVersion = "1.0.0";

enum class Family { time_local, memory_kernel };

// How a sweep over R = W/lambda is realised for the time-local model.
enum class SweepAxis { lambda_at_fixed_W, W_at_fixed_lambda };

struct SweepOutputs {
    bool phase{true};
    bool N{true};
    bool M{true};
    bool D{false};
    bool A{false};
};

struct SweepSpec {
    std::string name{"custom"};
    Family family{Family::time_local};
    SweepAxis axis{SweepAxis::lambda_at_fixed_W};
    double coupling{0.1};  // W (time-local) or gamma0 (memory kernel)
    double lambda{1.0};    // only for SweepAxis::W_at_fixed_lambda
    double omega0{1.0};
    int n{1};              // T = 2 n pi / omega0
    double min{0.05};      // swept R or C
    double max{1.0};
    std::size_t steps{40};
    std::vector<double> z_values{0.25, 0.5, 0.75, 1.0};
    std::vector<double> vartheta_values{0.78539816339744828};
    double varphi0{1.0471975511965976};
    SweepOutputs outputs;
    BasisMode mode{BasisMode::literal};
    double gp_tol{1e-6};
    std::size_t threads{0};  // 0: QFLOW_THREADS or hardware concurrency

    void validate() const;  // throws std::invalid_argument
    std::vector<double> swept_values() const;
    Model model_at(double value) const;
    double T() const { return quasi_period(omega0, n); }
    bool crosses_quarter() const { return family == Family::memory_kernel && min < 0.25 && max > 0.25; }
    std::string axis_label() const { return family == Family::time_local ? "R" : "C"; }
};

struct Dataset {
    std::string name;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> status;  // "ok" or the failure message of that row

    std::size_t column(const std::string& name) const;  // throws std::out_of_range
    std::vector<double> series(const std::string& col) const;
};

// Rows are ordered by z, then vartheta0, then the swept value; each series is unwrapped
// along the swept axis in the phase_unwrapped_over_pi column.
Dataset run_sweep(const SweepSpec& spec);

std::vector<std::string> preset_names();
SweepSpec preset(const std::string& name);  // throws std::invalid_argument for unknown names

// A(t) = omega0 [1/2 + r_z / (2 sqrt(4 D^2 - 2 r_z - 1))] with D the distance to the ground state.
double integrand_A(double t, const InitialStateSpec& spec, const TimeLocalParams& p);

struct CriticalPointOptions {
    double W{0.6};
    double omega0{1.0};
    double R_min{0.1};
    double R_max{3.0};
    std::size_t steps{200};
    int n{1};
    double slope_step{1e-8};  // relative step of the centred differences evaluated at R*
};

struct CriticalPointReport {
    double r_star{0.0};
    double lambda_star{0.0};
    bool amplitude_zero{false};  // c(T, R*) vanishes
    double dc2_dR{0.0};          // d|c(T,R)|^2/dR at R*
    double dD_dR{0.0};           // centred difference at R*, divided by max |dD/dR| on the grid
    double dA_dR{0.0};           // same for A(T, R)
    double dM_dR_left{0.0};      // one-sided slopes of M(T, R) at R*, normalised
    double dM_dR_right{0.0};
    double onset_N{0.0};         // first grid R with N(T) > 1e-10
    double m_flat{0.0};          // first grid R from which the forward difference of M vanishes
    double grid_step{0.0};
    std::size_t resolution{0};
    double r_star_refined{0.0};  // same search on a grid twice as fine
    std::vector<double> R, N, M, D, A;  // grid values at t = T
};

// Scans the R grid for the first sign change of d|c(T,R)|^2/dR (R varied through lambda = W/R)
// and refines it by bisection; throws NumericalError when no bracket is found.
CriticalPointReport critical_point(const InitialStateSpec& spec, const CriticalPointOptions& opts = {});

}  // namespace qflow
