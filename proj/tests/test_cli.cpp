// test_cli.cpp: Command-line parsing, commands, exit codes and serialization

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qflow/cli.hpp"

using namespace qflow;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qflow");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

Dataset parse(const std::string& csv) {
    std::istringstream is(csv);
    return cli::read_csv(is);
}

std::string meta(const Dataset& d, const std::string& key) {
    for (const auto& [k, v] : d.metadata) {
        if (k == key) return v;
    }
    return {};
}

std::string temp_path(const std::string& name) { return "/tmp/qflow_test_" + name; }

}  // namespace

TEST_CASE("help lists every flag") {
    const Outcome o = run_cli({"--help"});
    CHECK(o.code == 0);
    for (const char* flag : {"--model", "--W", "--lambda", "--omega0", "--gamma0", "--gamma", "--z", "--vartheta0",
                             "--varphi0", "--n", "--R-min", "--R-max", "--R-steps", "--C-min", "--C-max", "--C-steps",
                             "--figure", "--mode", "--out", "--format", "--tol", "--degrees", "--config"}) {
        CAPTURE(flag);
        CHECK(o.out.find(flag) != std::string::npos);
    }
}

TEST_CASE("exit codes") {
    CHECK(run_cli({}).code == cli::kConfigError);
    CHECK(run_cli({"gp", "--no-such-flag"}).code == cli::kConfigError);
    CHECK(run_cli({"gp", "--model", "other"}).code == cli::kConfigError);
    CHECK(run_cli({"gp", "--z", "2"}).code == cli::kConfigError);
    CHECK(run_cli({"sweep", "--figure", "fig42"}).code == cli::kConfigError);
    const Outcome o = run_cli({"gp", "--W", "10", "--lambda", "10", "--z", "0.5", "--vartheta0", "0"});
    CHECK(o.code == cli::kNumericalFailure);
    CHECK(o.err.find("gp_mixed") != std::string::npos);
    CHECK(o.err.find("t = ") != std::string::npos);
}

TEST_CASE("gp of a closed system") {
    const Outcome o = run_cli({"gp", "--model", "time-local", "--W", "0", "--z", "1", "--vartheta0", "0.7854"});
    REQUIRE(o.code == 0);
    const Dataset d = parse(o.out);
    const double phase = d.rows[0][d.column("phase")];
    CHECK(angle_distance(phase, -kPi) < 1e-4);
    CHECK(d.rows[0][d.column("pure_integral")] == doctest::Approx(-kPi).epsilon(1e-4));
    CHECK(meta(d, "config.command") == "gp");
}

TEST_CASE("simulate: initial row, round trip and bit stability") {
    const Outcome o = run_cli({"simulate", "--samples", "50"});
    REQUIRE(o.code == 0);
    const Dataset d = parse(o.out);
    CHECK(d.rows.size() == 51);
    CHECK(d.rows[0][d.column("t")] == 0.0);
    const DensityMatrix rho0 = initial_state({1.0, 0.78539816339744828, 1.0471975511965976});
    CHECK(d.rows[0][d.column("rho00_re")] == doctest::Approx(rho0(0, 0).real()));
    CHECK(d.rows[0][d.column("rho01_im")] == doctest::Approx(rho0(0, 1).imag()));
    CHECK(d.rows[0][d.column("abs_c")] == 1.0);

    const Trajectory tr = sample_uniform(TimeLocalParams{0.1, 1.0, 1.0}, rho0, 2.0 * kPi, 50);
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        CHECK(d.rows[k][d.column("t")] == tr.samples[k].t);
        CHECK(d.rows[k][d.column("rho01_re")] == tr.samples[k].rho(0, 1).real());
        CHECK(d.rows[k][d.column("rho11_re")] == tr.samples[k].rho(1, 1).real());
    }
    std::ostringstream again;
    cli::write_csv(d, again);
    CHECK(again.str() == o.out);
    CHECK(run_cli({"simulate", "--samples", "50"}).out == o.out);
}

TEST_CASE("simulate flags a positivity violation of the memory-kernel model") {
    const Outcome o = run_cli({"simulate", "--model", "memory-kernel", "--gamma0", "0.1", "--gamma", "0.1", "--z", "1",
                               "--vartheta0", "0", "--t-end", "200", "--samples", "2000"});
    REQUIRE(o.code == 0);
    const Dataset d = parse(o.out);
    CHECK(meta(d, "positive") == "false");
    bool violation = false;
    for (double v : d.series("positive")) violation = violation || v == 0.0;
    CHECK(violation);
}

TEST_CASE("config file merges with flags, flags win") {
    const std::string path = temp_path("config.toml");
    {
        std::ofstream f(path);
        f << "W = 0.3\nz = 0.5\nsamples = 4\n";
    }
    const Outcome o = run_cli({"simulate", "--config", path, "--z", "0.75"});
    REQUIRE(o.code == 0);
    const Dataset d = parse(o.out);
    CHECK(meta(d, "config.W") == "0.29999999999999999");
    CHECK(meta(d, "config.z") == "0.75");
    CHECK(d.rows.size() == 5);

    const std::string bad = temp_path("bad.toml");
    {
        std::ofstream f(bad);
        f << "unknown_key = 1\n";
    }
    CHECK(run_cli({"simulate", "--config", bad}).code == cli::kConfigError);
    std::remove(path.c_str());
    std::remove(bad.c_str());
}

TEST_CASE("degrees flag converts angles") {
    const Outcome a = run_cli({"gp", "--W", "0.2", "--vartheta0", "30", "--varphi0", "60", "--degrees"});
    const Outcome b = run_cli({"gp", "--W", "0.2", "--vartheta0", "0.52359877559829882", "--varphi0", "1.0471975511965976"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const Dataset da = parse(a.out), db = parse(b.out);
    CHECK(da.rows[0][da.column("phase")] == doctest::Approx(db.rows[0][db.column("phase")]).epsilon(1e-12));
}

TEST_CASE("flows command and JSON output") {
    const Outcome o = run_cli({"flows", "--W", "1", "--lambda", "0.5", "--format", "json"});
    REQUIRE(o.code == 0);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["columns"][0] == "t");
    CHECK(std::stod(j["metadata"]["N_T"].get<std::string>()) > 0.0);
    CHECK(std::stod(j["metadata"]["ledger_residual"].get<std::string>()) < 1e-10);
    CHECK(j["rows"].size() > 100);
}

TEST_CASE("output file") {
    const std::string path = temp_path("out.csv");
    CHECK(run_cli({"gp", "--W", "0.1", "--out", path}).code == 0);
    std::ifstream f(path);
    const Dataset d = cli::read_csv(f);
    CHECK(d.rows.size() == 1);
    std::remove(path.c_str());
    CHECK(run_cli({"gp", "--out", "/nonexistent/dir/x.csv"}).code == cli::kConfigError);
}

TEST_CASE("sweep with a figure preset") {
    const Outcome o = run_cli({"sweep", "--figure", "fig1", "--R-steps", "3"});
    REQUIRE(o.code == 0);
    const Dataset d = parse(o.out);
    CHECK(d.rows.size() == 12);
    CHECK(meta(d, "preset") == "fig1");
    CHECK(meta(d, "W") == "0.10000000000000001");
    for (double v : d.series("phase_over_pi")) {
        CHECK(v >= 0.0);
        CHECK(v < 2.0);
    }
    CHECK(d.status.size() == 12);
}

TEST_CASE("critical command reports the root and residuals") {
    const Outcome o = run_cli({"critical", "--W", "0.6", "--vartheta0", "1.0472", "--R-min", "0.1", "--R-max", "3",
                               "--R-steps", "60"});
    REQUIRE(o.code == 0);
    const Dataset d = parse(o.out);
    CHECK(std::stod(meta(d, "R_star")) > 0.5);
    CHECK(std::abs(std::stod(meta(d, "dc2_dR"))) < 1e-8);
    CHECK(d.rows.size() == 60);
}
