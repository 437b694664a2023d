// analysis.cpp: Parameter sweeps, figure presets and the critical-point search

#include "qflow/analysis.hpp"
#include "qflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace qflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt(v[i]);
    return s;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

struct Point {
    double z;
    double vartheta0;
    double value;
};

}  // namespace

void SweepSpec::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("sweep: " + what); };
    if (steps < 2) fail("resolution must be at least 2");
    if (!(min > 0.0) || !(max > min)) fail("swept range must satisfy 0 < min < max");
    if (!(coupling > 0.0)) fail("coupling must be positive");
    if (!(omega0 > 0.0)) fail("omega0 must be positive");
    if (axis == SweepAxis::W_at_fixed_lambda && !(lambda > 0.0)) fail("lambda must be positive");
    if (n < 1) fail("n must be at least 1");
    if (z_values.empty() || vartheta_values.empty()) fail("initial-state set is empty");
    for (double z : z_values) {
        if (!(z >= 0.0 && z <= 1.0)) fail("z must lie in [0, 1]");
    }
    if (!(gp_tol > 0.0)) fail("phase tolerance must be positive");
}

std::vector<double> SweepSpec::swept_values() const { return linspace(min, max, steps); }

Model SweepSpec::model_at(double value) const {
    if (family == Family::memory_kernel) return MemoryKernelParams::from_ratio(coupling, value, omega0);
    if (axis == SweepAxis::W_at_fixed_lambda) return TimeLocalParams{value * lambda, lambda, omega0};
    return TimeLocalParams::from_ratio(coupling, value, omega0);
}

std::size_t Dataset::column(const std::string& col) const {
    const auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end()) throw std::out_of_range("dataset has no column '" + col + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Dataset::series(const std::string& col) const {
    const std::size_t j = column(col);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
}

double integrand_A(double t, const InitialStateSpec& spec, const TimeLocalParams& p) {
    const DensityMatrix rho = evolve_time_local(initial_state(spec), t, p);
    return flow_integrand(p.omega0, rho.bloch().z, trace_distance(rho, DensityMatrix::ground()));
}

Dataset run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> values = spec.swept_values();
    const double T = spec.T();
    const bool mk = spec.family == Family::memory_kernel;

    std::vector<Point> points;
    for (double z : spec.z_values) {
        for (double th : spec.vartheta_values) {
            for (double v : values) points.push_back({z, th, v});
        }
    }

    Dataset ds;
    ds.name = spec.name;
    const std::string ax = spec.axis_label();
    ds.columns = {ax, mk ? "gamma" : (spec.axis == SweepAxis::W_at_fixed_lambda ? "W" : "lambda"), "z", "vartheta0"};
    if (spec.outputs.phase) {
        for (const char* c : {"phase", "phase_over_pi", "phase_unwrapped_over_pi"}) ds.columns.emplace_back(c);
    }
    if (spec.outputs.N) ds.columns.emplace_back("N");
    if (spec.outputs.M) ds.columns.emplace_back("M");
    if (spec.outputs.D) ds.columns.emplace_back("D");
    if (spec.outputs.A && !mk) ds.columns.emplace_back("A");
    const bool need_flows = spec.outputs.N || spec.outputs.M;
    if (need_flows) ds.columns.emplace_back("ledger_residual");
    if (mk) ds.columns.emplace_back("positive");

    ds.rows.assign(points.size(), std::vector<double>(ds.columns.size(), kNaN));
    ds.status.assign(points.size(), "ok");

    parallel_for(points.size(), spec.threads, [&](std::size_t i) {
        const Point& pt = points[i];
        auto& row = ds.rows[i];
        const Model m = spec.model_at(pt.value);
        std::size_t j = 0;
        row[j++] = pt.value;
        row[j++] = mk ? std::get<MemoryKernelParams>(m).gamma
                      : (spec.axis == SweepAxis::W_at_fixed_lambda ? std::get<TimeLocalParams>(m).W
                                                                   : std::get<TimeLocalParams>(m).lambda);
        row[j++] = pt.z;
        row[j++] = pt.vartheta0;
        const InitialStateSpec is{pt.z, pt.vartheta0, spec.varphi0};
        std::string failure;
        auto guarded = [&](auto&& fn) {
            try {
                fn();
            } catch (const std::exception& e) {
                if (!failure.empty()) failure += "; ";
                failure += e.what();
            }
        };
        const DensityMatrix rho0 = initial_state(is);
        if (spec.outputs.phase) {
            guarded([&] {
                GpOptions go;
                go.tol = spec.gp_tol;
                const PhaseResult ph = gp_mixed(m, rho0, T, spec.mode, go);
                row[j] = ph.canonical;
                row[j + 1] = ph.figure / kPi;
            });
            j += 3;
        }
        std::optional<FlowLedger> ledger;
        if (need_flows) guarded([&] { ledger = flows(rho0, m, T); });
        if (spec.outputs.N) row[j++] = ledger ? ledger->N() : kNaN;
        if (spec.outputs.M) row[j++] = ledger ? ledger->M() : kNaN;
        if (spec.outputs.D) {
            guarded([&] { row[j] = trace_distance(evolve(m, rho0, T), DensityMatrix::ground()); });
            ++j;
        }
        if (spec.outputs.A && !mk) {
            guarded([&] { row[j] = integrand_A(T, is, std::get<TimeLocalParams>(m)); });
            ++j;
        }
        if (need_flows) row[j++] = ledger ? ledger->ledger_residual() : kNaN;
        if (mk) {
            const bool positive = ledger && ledger->positive ? *ledger->positive
                                                             : positivity_check(sample_uniform(m, rho0, T, 2000)).positive;
            row[j++] = positive ? 1.0 : 0.0;
        }
        if (!failure.empty()) ds.status[i] = failure;
    });

    if (spec.outputs.phase) {
        const std::size_t cp = ds.column("phase");
        const std::size_t cu = ds.column("phase_unwrapped_over_pi");
        for (std::size_t start = 0; start < points.size(); start += values.size()) {
            double prev = kNaN;
            for (std::size_t k = start; k < start + values.size(); ++k) {
                const double ph = ds.rows[k][cp];
                if (std::isnan(ph)) continue;
                const double u = std::isnan(prev) ? ph : prev + std::remainder(ph - prev, 2.0 * kPi);
                ds.rows[k][cu] = u / kPi;
                prev = u;
            }
        }
    }

    auto& md = ds.metadata;
    md.emplace_back("preset", spec.name);
    md.emplace_back("model", mk ? "memory-kernel" : "time-local");
    md.emplace_back("swept", ax);
    if (!mk) md.emplace_back("sweep_axis", spec.axis == SweepAxis::lambda_at_fixed_W ? "lambda=W/R" : "W=R*lambda");
    md.emplace_back(mk ? "gamma0" : (spec.axis == SweepAxis::lambda_at_fixed_W ? "W" : "lambda"),
                    fmt(spec.axis == SweepAxis::W_at_fixed_lambda && !mk ? spec.lambda : spec.coupling));
    md.emplace_back("omega0", fmt(spec.omega0));
    md.emplace_back("range", fmt(spec.min) + ":" + fmt(spec.max) + ":" + std::to_string(spec.steps));
    md.emplace_back("n", std::to_string(spec.n));
    md.emplace_back("T", fmt(T));
    md.emplace_back("z", join(spec.z_values));
    md.emplace_back("vartheta0", join(spec.vartheta_values));
    md.emplace_back("varphi0", fmt(spec.varphi0));
    md.emplace_back("mode", spec.mode == BasisMode::literal ? "literal" : "spectral");
    md.emplace_back("gp_tol", fmt(spec.gp_tol));
    if (spec.crosses_quarter()) md.emplace_back("caveat", "C > 1/4 in range: positivity not guaranteed");
    md.emplace_back("version", kVersion);
    return ds;
}

// ---------------------------------------------------------------------------
// presets

namespace {

SweepSpec base_preset(const std::string& name, double W, double r_min, double r_max) {
    SweepSpec s;
    s.name = name;
    s.coupling = W;
    s.min = r_min;
    s.max = r_max;
    s.outputs = {false, false, false, false, false};
    return s;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "appendix-nm", "appendix-ady"};
}

SweepSpec preset(const std::string& name) {
    SweepSpec s;
    if (name == "fig1" || name == "fig2") {
        s = base_preset(name, 0.1, 0.05, 2.0);
        s.outputs.phase = name == "fig1";
        s.outputs.M = name == "fig2";
    } else if (name == "fig3" || name == "fig4") {
        s = base_preset(name, 1.0, 0.1, 5.0);
        s.outputs.phase = name == "fig4";
        s.outputs.N = true;
    } else if (name == "fig5" || name == "fig6") {
        s = base_preset(name, 10.0, 0.1, 10.0);
        s.outputs.phase = name == "fig5";
        s.outputs.N = true;
    } else if (name == "fig7") {
        s = base_preset(name, 10.0, 0.1, 10.0);
        s.z_values = {0.5};
        s.varphi0 = kPi / 6.0;
        s.vartheta_values = linspace(0.0, kPi, 13);
        s.steps = 25;
        s.outputs.phase = true;
        s.outputs.N = true;
    } else if (name == "fig8" || name == "fig9") {
        s = base_preset(name, 0.1, 0.01, 0.25);
        s.family = Family::memory_kernel;
        s.steps = 25;
        s.outputs.phase = name == "fig8";
        s.outputs.M = name == "fig9";
    } else if (name == "appendix-nm" || name == "appendix-ady") {
        s = base_preset(name, 0.6, 0.1, 3.0);
        s.z_values = {1.0};
        s.vartheta_values = {kPi / 3.0};
        s.steps = 59;
        s.outputs.N = true;
        s.outputs.M = name == "appendix-nm";
        s.outputs.A = s.outputs.D = name == "appendix-ady";
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return s;
}

// ---------------------------------------------------------------------------
// critical point

namespace {

struct RModel {
    const InitialStateSpec& spec;
    const CriticalPointOptions& opts;
    double T;

    TimeLocalParams params(double R) const { return TimeLocalParams::from_ratio(opts.W, R, opts.omega0); }
    double c2(double R) const { return std::norm(amplitude_c(T, params(R)).c); }
    // Real factor of c(T) once the exponential envelope and carrier are removed; its sign
    // change marks a zero of the amplitude.
    double g(double R) const {
        const TimeLocalParams p = params(R);
        return (amplitude_c(T, p).c * std::polar(1.0, 0.5 * p.omega0 * T)).real();
    }
    double dc2(double R) const {
        const double h = 1e-6 * R;
        return (c2(R + h) - c2(R - h)) / (2.0 * h);
    }
    double D(double R) const {
        return trace_distance(evolve_time_local(initial_state(spec), T, params(R)), DensityMatrix::ground());
    }
    double A(double R) const { return integrand_A(T, spec, params(R)); }
};

template <class F>
double bisect(F f, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

struct Root {
    double R;
    bool amplitude_zero;
};

Root locate(const RModel& rm, std::size_t steps) {
    const std::vector<double> grid = linspace(rm.opts.R_min, rm.opts.R_max, steps);
    double prev = rm.dc2(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double cur = rm.dc2(grid[k]);
        if ((prev > 0.0) != (cur > 0.0)) {
            const double a = grid[k - 1];
            const double b = grid[k];
            if ((rm.g(a) > 0.0) != (rm.g(b) > 0.0)) return {bisect([&](double R) { return rm.g(R); }, a, b), true};
            return {bisect([&](double R) { return rm.dc2(R); }, a, b), false};
        }
        prev = cur;
    }
    throw NumericalError("critical_point", "no sign change of d|c(T,R)|^2/dR in the R range");
}

}  // namespace

CriticalPointReport critical_point(const InitialStateSpec& spec, const CriticalPointOptions& opts) {
    if (opts.steps < 3) throw std::invalid_argument("critical_point: at least 3 grid points required");
    if (!(opts.R_min > 0.0) || !(opts.R_max > opts.R_min)) throw std::invalid_argument("critical_point: bad R range");
    if (!(opts.W > 0.0)) throw std::invalid_argument("critical_point: W must be positive");
    const RModel rm{spec, opts, quasi_period(opts.omega0, opts.n)};

    CriticalPointReport rep;
    rep.resolution = opts.steps;
    rep.grid_step = (opts.R_max - opts.R_min) / static_cast<double>(opts.steps - 1);
    const Root root = locate(rm, opts.steps);
    rep.r_star = root.R;
    rep.amplitude_zero = root.amplitude_zero;
    rep.lambda_star = opts.W / root.R;
    rep.dc2_dR = rm.dc2(root.R);
    rep.r_star_refined = locate(rm, 2 * opts.steps - 1).R;

    rep.R = linspace(opts.R_min, opts.R_max, opts.steps);
    const std::size_t n = rep.R.size();
    rep.N.resize(n);
    rep.M.resize(n);
    rep.D.resize(n);
    rep.A.resize(n);
    const DensityMatrix rho0 = initial_state(spec);
    parallel_for(n, 0, [&](std::size_t k) {
        const FlowLedger led = flows(rho0, Model{rm.params(rep.R[k])}, rm.T);
        rep.N[k] = led.N();
        rep.M[k] = led.M();
        rep.D[k] = rm.D(rep.R[k]);
        rep.A[k] = rm.A(rep.R[k]);
    });

    auto max_slope = [&](const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t k = 1; k < n; ++k) s = std::max(s, std::abs(y[k] - y[k - 1]) / rep.grid_step);
        return s;
    };
    const double h = opts.slope_step * std::max(1.0, root.R);
    const double sD = max_slope(rep.D);
    const double sA = max_slope(rep.A);
    const double sM = max_slope(rep.M);
    rep.dD_dR = (rm.D(root.R + h) - rm.D(root.R - h)) / (2.0 * h) / sD;
    rep.dA_dR = (rm.A(root.R + h) - rm.A(root.R - h)) / (2.0 * h) / sA;

    FlowOptions tight;
    tight.root_rel_tol = 1e-14;
    auto M_at = [&](double R) { return flows(rho0, Model{rm.params(R)}, rm.T, DensityMatrix::ground(), tight).M(); };
    const double hm = 1e-6 * root.R;
    const double m0 = M_at(root.R);
    rep.dM_dR_left = (m0 - M_at(root.R - hm)) / hm / sM;
    rep.dM_dR_right = (M_at(root.R + hm) - m0) / hm / sM;

    rep.onset_N = kNaN;
    for (std::size_t k = 0; k < n; ++k) {
        if (rep.N[k] > 1e-10) {
            rep.onset_N = rep.R[k];
            break;
        }
    }
    rep.m_flat = kNaN;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(rep.M[k + 1] - rep.M[k]) / rep.grid_step <= 1e-6 * sM) {
            rep.m_flat = rep.R[k];
            break;
        }
    }
    return rep;
}

}  // namespace qflow
