// cli.cpp: Command-line front end: configuration, commands and dataset serialization

#include "qflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace qflow::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double degrees_to_radians(double v) { return v * kPi / 180.0; }

}  // namespace

Model RunConfig::model_params() const {
    if (model == "time-local") return TimeLocalParams{W, lambda, omega0};
    if (model == "memory-kernel") return MemoryKernelParams{gamma0, gamma, omega0};
    throw std::invalid_argument("unknown model '" + model + "'");
}

InitialStateSpec RunConfig::initial_spec() const {
    if (!(z >= 0.0 && z <= 1.0)) throw std::invalid_argument("z must lie in [0, 1]");
    return degrees ? InitialStateSpec{z, degrees_to_radians(vartheta0), degrees_to_radians(varphi0)}
                   : InitialStateSpec{z, vartheta0, varphi0};
}

BasisMode RunConfig::basis() const {
    if (mode == "literal") return BasisMode::literal;
    if (mode == "spectral") return BasisMode::spectral;
    throw std::invalid_argument("unknown basis mode '" + mode + "'");
}

double RunConfig::horizon() const {
    if (t_end < 0.0) throw std::invalid_argument("t-end must be non-negative");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    return t_end > 0.0 ? t_end : quasi_period(omega0, n);
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    return {{"command", command},
            {"model", model},
            {"W", num(W)},
            {"lambda", num(lambda)},
            {"omega0", num(omega0)},
            {"gamma0", num(gamma0)},
            {"gamma", num(gamma)},
            {"z", num(z)},
            {"vartheta0", num(vartheta0)},
            {"varphi0", num(varphi0)},
            {"degrees", degrees ? "true" : "false"},
            {"n", std::to_string(n)},
            {"t-end", num(t_end)},
            {"samples", std::to_string(samples)},
            {"R-min", num(R_min)},
            {"R-max", num(R_max)},
            {"R-steps", std::to_string(R_steps)},
            {"C-min", num(C_min)},
            {"C-max", num(C_max)},
            {"C-steps", std::to_string(C_steps)},
            {"sweep-axis", sweep_axis},
            {"figure", figure},
            {"mode", mode},
            {"format", format},
            {"tol", num(tol)}};
}

// ---------------------------------------------------------------------------
// commands

Dataset cmd_simulate(const RunConfig& cfg) {
    const Model m = cfg.model_params();
    validate(m);
    if (cfg.samples < 1) throw std::invalid_argument("samples must be at least 1");
    const DensityMatrix rho0 = initial_state(cfg.initial_spec());
    const Trajectory traj = sample_uniform(m, rho0, cfg.horizon(), cfg.samples);
    const PositivityReport pos = positivity_check(traj);
    const bool tl = std::holds_alternative<TimeLocalParams>(m);

    Dataset ds;
    ds.name = "simulate";
    ds.columns = {"t",       "rho00_re", "rho00_im", "rho01_re", "rho01_im", "rho10_re", "rho10_im", "rho11_re", "rho11_im",
                  "r_x",     "r_y",      "r_z",      tl ? "abs_c" : "xi", "Gamma", "Delta", "min_eigenvalue", "positive"};
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const Sample& s = traj.samples[k];
        const Mat2& r = s.rho.matrix();
        const BlochVector b = s.rho.bloch();
        double amp = kNaN, gam = kNaN, del = kNaN;
        if (tl) {
            const AmplitudeState a = amplitude_c(s.t, std::get<TimeLocalParams>(m));
            amp = std::abs(a.c);
            gam = a.gamma.value_or(kNaN);
            del = a.delta.value_or(kNaN);
        } else {
            const auto& p = std::get<MemoryKernelParams>(m);
            amp = xi(p.C(), p.tau(s.t));
        }
        const double ev = pos.min_eigenvalue[k];
        ds.rows.push_back({s.t, r(0, 0).real(), r(0, 0).imag(), r(0, 1).real(), r(0, 1).imag(), r(1, 0).real(),
                           r(1, 0).imag(), r(1, 1).real(), r(1, 1).imag(), b.x, b.y, b.z, amp, gam, del, ev,
                           ev >= -kPositivityTol ? 1.0 : 0.0});
    }
    ds.metadata = {{"model", model_name(m)}, {"positive", pos.positive ? "true" : "false"}};
    if (pos.first_violation) ds.metadata.emplace_back("first_violation", num(*pos.first_violation));
    if (!tl) ds.metadata.emplace_back("note", "Gamma and Delta are defined for the time-local model only");
    return ds;
}

Dataset cmd_flows(const RunConfig& cfg) {
    const Model m = cfg.model_params();
    const DensityMatrix rho0 = initial_state(cfg.initial_spec());
    const FlowLedger led = flows(rho0, m, cfg.horizon());
    Dataset ds;
    ds.name = "flows";
    ds.columns = {"t", "D", "sigma", "N", "M"};
    for (const FlowSample& s : led.samples) ds.rows.push_back({s.t, s.distance, s.sigma, s.backward, s.forward});
    ds.metadata = {{"model", model_name(m)},
                   {"standard_state", "ground"},
                   {"D0", num(led.initial_distance)},
                   {"N_T", num(led.N())},
                   {"M_T", num(led.M())},
                   {"ledger_residual", num(led.ledger_residual())},
                   {"segments", std::to_string(led.segments.size())}};
    if (led.positive) ds.metadata.emplace_back("positive", *led.positive ? "true" : "false");
    return ds;
}

Dataset cmd_gp(const RunConfig& cfg) {
    const Model m = cfg.model_params();
    const InitialStateSpec spec = cfg.initial_spec();
    const double T = cfg.horizon();
    GpOptions go;
    go.tol = cfg.tol;
    const PhaseResult ph = gp_mixed(m, initial_state(spec), T, cfg.basis(), go);

    Dataset ds;
    ds.name = "gp";
    ds.columns = {"T", "phase", "phase_over_pi", "figure_over_pi", "intervals", "last_change", "converged"};
    ds.rows.push_back({T, ph.canonical, ph.canonical / kPi, ph.figure / kPi, static_cast<double>(ph.intervals),
                       ph.last_change, ph.converged ? 1.0 : 0.0});
    auto add = [&](const std::string& col, double v) {
        ds.columns.push_back(col);
        ds.rows.back().push_back(v);
    };
    const double theta0 = spec.bloch().theta;
    if (const auto* p = std::get_if<TimeLocalParams>(&m)) {
        if (p->W == 0.0) add("closed_form", canonical_angle(p->omega0 * T / (2.0 * kPi) * gp_closed(theta0)));
        const bool quasi = cfg.t_end == 0.0;
        if (quasi && std::abs(spec.z - 1.0) <= 1e-12) {
            add("pure_integral", gp_pure(spec, *p, cfg.n));
            add("flow_form", gp_flow_form(spec, *p, cfg.n, flows(initial_state(spec), m, T)));
        }
    }
    ds.metadata = {{"model", model_name(m)}, {"theta0", num(theta0)}};
    return ds;
}

Dataset cmd_sweep(const RunConfig& cfg, const std::vector<std::string>& explicit_flags) {
    auto given = [&](const std::string& f) {
        return cfg.figure.empty() || std::find(explicit_flags.begin(), explicit_flags.end(), f) != explicit_flags.end();
    };
    SweepSpec s;
    if (!cfg.figure.empty()) {
        s = preset(cfg.figure);
    } else {
        s.family = cfg.model == "memory-kernel" ? Family::memory_kernel : Family::time_local;
        if (cfg.model != "memory-kernel" && cfg.model != "time-local") throw std::invalid_argument("unknown model '" + cfg.model + "'");
        s.outputs = {true, true, true, false, false};
    }
    const bool mk = s.family == Family::memory_kernel;
    if (!mk) {
        if (given("--W")) s.coupling = cfg.W;
        if (given("--lambda")) s.lambda = cfg.lambda;
        if (given("--sweep-axis")) {
            if (cfg.sweep_axis == "lambda") s.axis = SweepAxis::lambda_at_fixed_W;
            else if (cfg.sweep_axis == "W") s.axis = SweepAxis::W_at_fixed_lambda;
            else throw std::invalid_argument("sweep-axis must be 'lambda' or 'W'");
        }
        if (given("--R-min")) s.min = cfg.R_min;
        if (given("--R-max")) s.max = cfg.R_max;
        if (given("--R-steps")) s.steps = cfg.R_steps;
    } else {
        if (given("--gamma0")) s.coupling = cfg.gamma0;
        if (given("--C-min")) s.min = cfg.C_min;
        if (given("--C-max")) s.max = cfg.C_max;
        if (given("--C-steps")) s.steps = cfg.C_steps;
    }
    const InitialStateSpec is = cfg.initial_spec();
    if (given("--omega0")) s.omega0 = cfg.omega0;
    if (given("--n")) s.n = cfg.n;
    if (given("--z")) s.z_values = {is.z};
    if (given("--vartheta0")) s.vartheta_values = {is.vartheta0};
    if (given("--varphi0")) s.varphi0 = is.varphi0;
    if (given("--mode")) s.mode = cfg.basis();
    if (given("--tol")) s.gp_tol = cfg.tol;
    return run_sweep(s);
}

Dataset cmd_critical(const RunConfig& cfg) {
    CriticalPointOptions o;
    o.W = cfg.W;
    o.omega0 = cfg.omega0;
    o.n = cfg.n;
    o.R_min = cfg.R_min;
    o.R_max = cfg.R_max;
    o.steps = cfg.R_steps;
    const CriticalPointReport r = critical_point(cfg.initial_spec(), o);
    Dataset ds;
    ds.name = "critical";
    ds.columns = {"R", "N", "M", "D", "A"};
    for (std::size_t k = 0; k < r.R.size(); ++k) ds.rows.push_back({r.R[k], r.N[k], r.M[k], r.D[k], r.A[k]});
    ds.metadata = {{"R_star", num(r.r_star)},
                   {"lambda_star", num(r.lambda_star)},
                   {"amplitude_zero", r.amplitude_zero ? "true" : "false"},
                   {"dc2_dR", num(r.dc2_dR)},
                   {"dD_dR_normalized", num(r.dD_dR)},
                   {"dA_dR_normalized", num(r.dA_dR)},
                   {"dM_dR_left_normalized", num(r.dM_dR_left)},
                   {"dM_dR_right_normalized", num(r.dM_dR_right)},
                   {"onset_N", num(r.onset_N)},
                   {"M_flat", num(r.m_flat)},
                   {"grid_step", num(r.grid_step)},
                   {"resolution", std::to_string(r.resolution)},
                   {"R_star_refined", num(r.r_star_refined)}};
    return ds;
}

// ---------------------------------------------------------------------------
// serialization

void write_csv(const Dataset& ds, std::ostream& os) {
    for (const auto& [k, v] : ds.metadata) os << "# " << k << '=' << v << '\n';
    const bool with_status = !ds.status.empty();
    for (std::size_t j = 0; j < ds.columns.size(); ++j) os << (j ? "," : "") << ds.columns[j];
    if (with_status) os << ",status";
    os << '\n';
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        for (std::size_t j = 0; j < ds.rows[i].size(); ++j) os << (j ? "," : "") << num(ds.rows[i][j]);
        if (with_status) {
            std::string st = ds.status[i];
            std::replace(st.begin(), st.end(), ',', ';');
            std::replace(st.begin(), st.end(), '\n', ' ');
            os << ',' << st;
        }
        os << '\n';
    }
}

void write_json(const Dataset& ds, std::ostream& os) {
    nlohmann::ordered_json j;
    j["name"] = ds.name;
    nlohmann::ordered_json md = nlohmann::ordered_json::object();
    for (const auto& [k, v] : ds.metadata) md[k] = v;
    j["metadata"] = md;
    j["columns"] = ds.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : ds.rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (double v : r) {
            if (std::isfinite(v)) row.push_back(v);
            else row.push_back(nullptr);
        }
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    if (!ds.status.empty()) j["status"] = ds.status;
    os << j.dump(1) << '\n';
}

Dataset read_csv(std::istream& is) {
    Dataset ds;
    std::string line;
    bool header = false;
    bool with_status = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (!header && line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("malformed metadata line: " + line);
            ds.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (!header) {
            header = true;
            with_status = !cells.empty() && cells.back() == "status";
            if (with_status) cells.pop_back();
            ds.columns = cells;
            continue;
        }
        if (cells.size() != ds.columns.size() + (with_status ? 1 : 0)) throw std::invalid_argument("row width mismatch");
        std::vector<double> row;
        for (std::size_t j = 0; j < ds.columns.size(); ++j) {
            char* end = nullptr;
            row.push_back(std::strtod(cells[j].c_str(), &end));
            if (end == cells[j].c_str()) throw std::invalid_argument("non-numeric cell '" + cells[j] + "'");
        }
        ds.rows.push_back(std::move(row));
        if (with_status) ds.status.push_back(cells.back());
    }
    if (!header) throw std::invalid_argument("no header row");
    return ds;
}

// ---------------------------------------------------------------------------
// entry point

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Open two-level system simulator: trajectories, information flows and geometric phases", "qflow"};
    app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    app.add_option("command", cfg.command, "simulate | flows | gp | sweep | critical")
        ->required()
        ->check(CLI::IsMember({"simulate", "flows", "gp", "sweep", "critical"}));
    app.add_option("--model", cfg.model, "time-local | memory-kernel")
        ->capture_default_str()
        ->check(CLI::IsMember({"time-local", "memory-kernel"}));
    app.add_option("--W", cfg.W, "Coupling strength W of the Lorentzian bath")->capture_default_str();
    app.add_option("--lambda", cfg.lambda, "Spectral width lambda of the Lorentzian bath")->capture_default_str();
    app.add_option("--omega0", cfg.omega0, "Transition frequency omega0")->capture_default_str();
    app.add_option("--gamma0", cfg.gamma0, "Dissipation rate gamma0 of the memory-kernel model")->capture_default_str();
    app.add_option("--gamma", cfg.gamma, "Inverse memory time gamma of the memory-kernel model")->capture_default_str();
    app.add_option("--z", cfg.z, "Bloch radius of the initial state, 0 <= z <= 1")->capture_default_str();
    app.add_option("--vartheta0", cfg.vartheta0, "Initial polar parameter (Bloch polar angle is twice this)")->capture_default_str();
    app.add_option("--varphi0", cfg.varphi0, "Initial azimuthal angle")->capture_default_str();
    app.add_flag("--degrees", cfg.degrees, "Read --vartheta0 and --varphi0 in degrees");
    app.add_option("--n", cfg.n, "Number of quasi-periods T = 2 n pi / omega0")->capture_default_str();
    app.add_option("--t-end", cfg.t_end, "Explicit horizon for simulate/flows (0: n quasi-periods)")->capture_default_str();
    app.add_option("--samples", cfg.samples, "Trajectory intervals written by simulate")->capture_default_str();
    app.add_option("--R-min", cfg.R_min, "Lower end of the R = W/lambda sweep")->capture_default_str();
    app.add_option("--R-max", cfg.R_max, "Upper end of the R sweep")->capture_default_str();
    app.add_option("--R-steps", cfg.R_steps, "Number of R grid points")->capture_default_str();
    app.add_option("--C-min", cfg.C_min, "Lower end of the C = gamma0/gamma sweep")->capture_default_str();
    app.add_option("--C-max", cfg.C_max, "Upper end of the C sweep")->capture_default_str();
    app.add_option("--C-steps", cfg.C_steps, "Number of C grid points")->capture_default_str();
    app.add_option("--sweep-axis", cfg.sweep_axis, "R sweep varies lambda at fixed W ('lambda') or W at fixed lambda ('W')")
        ->capture_default_str()
        ->check(CLI::IsMember({"lambda", "W"}));
    std::string figure_help = "Named sweep preset:";
    for (const auto& p : preset_names()) figure_help += " " + p;
    app.add_option("--figure", cfg.figure, figure_help)->check(CLI::IsMember(preset_names()));
    app.add_option("--mode", cfg.mode, "Eigenbasis for the phase: literal | spectral")
        ->capture_default_str()
        ->check(CLI::IsMember({"literal", "spectral"}));
    app.add_option("--out", cfg.out, "Output path (default: standard output)");
    app.add_option("--format", cfg.format, "csv | json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol", cfg.tol, "Convergence tolerance of the geometric phase")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "qflow: " << e.what() << '\n';
        return kConfigError;
    }

    std::vector<std::string> explicit_flags;
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->count() > 0) explicit_flags.push_back(opt->get_name());
    }

    Dataset ds;
    try {
        if (cfg.command == "simulate") ds = cmd_simulate(cfg);
        else if (cfg.command == "flows") ds = cmd_flows(cfg);
        else if (cfg.command == "gp") ds = cmd_gp(cfg);
        else if (cfg.command == "sweep") ds = cmd_sweep(cfg, explicit_flags);
        else ds = cmd_critical(cfg);
    } catch (const NumericalError& e) {
        err << "qflow: numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "qflow: configuration error: " << e.what() << '\n';
        return kConfigError;
    }

    std::vector<std::pair<std::string, std::string>> preamble;
    for (auto& [k, v] : cfg.echo()) preamble.emplace_back("config." + k, v);
    preamble.emplace_back("version", kVersion);
    preamble.insert(preamble.end(), ds.metadata.begin(), ds.metadata.end());
    ds.metadata = std::move(preamble);

    std::ofstream file;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) {
            err << "qflow: configuration error: cannot open '" << cfg.out << "' for writing\n";
            return kConfigError;
        }
    }
    std::ostream& os = cfg.out.empty() ? out : file;
    if (cfg.format == "json") write_json(ds, os);
    else write_csv(ds, os);
    return kOk;
}

}  // namespace qflow::cli
