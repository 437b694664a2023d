// cli.hpp: Command-line front end: configuration, commands and dataset serialization

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qflow/analysis.hpp"

namespace qflow::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct RunConfig {
    std::string command;
    std::string model{"time-local"};
    double W{0.1};
    double lambda{1.0};
    double omega0{1.0};
    double gamma0{0.1};
    double gamma{1.0};
    double z{1.0};
    double vartheta0{0.78539816339744828};
    double varphi0{1.0471975511965976};
    int n{1};
    double t_end{0.0};        // 0: n quasi-periods
    std::size_t samples{1000};
    double R_min{0.05};
    double R_max{1.0};
    std::size_t R_steps{40};
    double C_min{0.01};
    double C_max{0.25};
    std::size_t C_steps{25};
    std::string sweep_axis{"lambda"};
    std::string figure;
    std::string mode{"literal"};
    std::string out;          // empty: standard output
    std::string format{"csv"};
    double tol{1e-6};
    bool degrees{false};

    Model model_params() const;
    InitialStateSpec initial_spec() const;
    BasisMode basis() const;
    double horizon() const;  // t_end or n quasi-periods
    std::vector<std::pair<std::string, std::string>> echo() const;
};

Dataset cmd_simulate(const RunConfig& cfg);
Dataset cmd_flows(const RunConfig& cfg);
Dataset cmd_gp(const RunConfig& cfg);
Dataset cmd_sweep(const RunConfig& cfg, const std::vector<std::string>& explicit_flags = {});
Dataset cmd_critical(const RunConfig& cfg);

// '#'-prefixed key=value metadata, a header row, then rows at 17 significant digits.
void write_csv(const Dataset& ds, std::ostream& os);
void write_json(const Dataset& ds, std::ostream& os);
// Inverse of write_csv.
Dataset read_csv(std::istream& is);

// Full entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qflow::cli
