// infoflow.hpp: Trace-distance rate, forward/backward information flows and the BLP measure

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qflow/channels.hpp"

namespace qflow {

struct FlowSample {
    double t{0.0};
    double distance{0.0};  // D(t)
    double sigma{0.0};     // dD/dt
    double backward{0.0};  // N(t)
    double forward{0.0};   // M(t)
};

// Maximal interval on which D is monotone.
struct FlowSegment {
    double t_begin{0.0};
    double t_end{0.0};
    double d_begin{0.0};
    double d_end{0.0};
    int direction{0};  // +1 increasing (backflow), -1 decreasing, 0 plateau
};

struct FlowLedger {
    DensityMatrix standard_state;
    double initial_distance{0.0};
    std::vector<FlowSample> samples;  // uniform grid on [0, t_end]
    std::vector<FlowSegment> segments;
    std::optional<bool> positive;     // set for memory-kernel trajectories

    double N() const { return samples.empty() ? 0.0 : samples.back().backward; }
    double M() const { return samples.empty() ? 0.0 : samples.back().forward; }
    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
    // max_k |D(t_k) - D(0) - N(t_k) + M(t_k)|
    double ledger_residual() const;
};

// sigma = dD/dt for D(t) = D(rho(t), standard); positive means information flowing back.
double sigma(double t, const Model& m, const DensityMatrix& rho0, const DensityMatrix& standard = DensityMatrix::ground());
// Same quantity from a centred difference of D with step h (default 1e-6 * characteristic time).
double sigma_numeric(double t, const Model& m, const DensityMatrix& rho0,
                     const DensityMatrix& standard = DensityMatrix::ground(), double h = 0.0);

struct FlowOptions {
    std::size_t intervals{0};  // grid intervals (even); 0 picks from the model time scales
    double root_rel_tol{1e-10};
};

std::size_t default_flow_intervals(const Model& m, double t_end);

FlowLedger flows(const DensityMatrix& rho0, const Model& m, double t_end,
                 const DensityMatrix& standard = DensityMatrix::ground(), const FlowOptions& opts = {});

// ---------------------------------------------------------------------------
// BLP measure (grid heuristic)

struct BlochGrid {
    std::size_t n_theta{12};
    std::size_t n_phi{24};
    std::vector<double> radii{1.0 / 3.0, 2.0 / 3.0, 1.0};

    std::vector<PolarBloch> points() const;
};

struct BlpResult {
    double value{0.0};
    std::size_t best_pair{0};  // index into the evaluated pair list
    DensityMatrix best_first;
    DensityMatrix best_second;
    std::size_t pairs{0};
    std::size_t distinct_pairs{0};
    std::size_t intervals{0};
};

// max over pairs of the total increase of D(rho1(t), rho2(t)) on [0, t_end], both states evolving.
BlpResult blp_measure(const Model& m, const std::vector<std::pair<DensityMatrix, DensityMatrix>>& pairs, double t_end,
                      std::size_t threads = 0, std::size_t intervals = 0);
// All unordered pairs of distinct grid states.
BlpResult blp_measure(const Model& m, const BlochGrid& grid, double t_end, std::size_t threads = 0,
                      std::size_t intervals = 0);

// ---------------------------------------------------------------------------
// weak-coupling expansion (time-local model)

struct WeakCouplingFlows {
    double d0{0.0};             // D at W = 0
    double kappa{0.0};          // (1 - e^{-lambda t})/lambda^2 - t/lambda
    double n_minus_m{0.0};      // first order in W^2
    double m{0.0};              // -(n_minus_m), assuming N = 0
    double n_minus_m_printed{0.0};
    double m_printed{0.0};
    bool reliable{true};        // false when W/lambda > 0.2
};

// First-order expansion of D(t) - D(0) in W^2. With s = |c|^2 = 1 + 2 W^2 kappa + O(W^4) and
// D = 1/2 sqrt(a s + b s^2) (a = r0^2 sin^2 theta0, b = (1 + r0 cos theta0)^2):
//   N - M = W^2 kappa [r0^2 (1 + cos^2) + 4 r0 cos + 2] / (4 D0).
// The *_printed fields use the bracket r0^2 (1 + cos^2) + 2 r0 cos with ds/dW^2 = kappa.
WeakCouplingFlows weak_coupling_flows(const InitialStateSpec& spec, const TimeLocalParams& p, double t);

}  // namespace qflow
