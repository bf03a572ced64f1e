#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "runner.hpp"
#include "singlab/errors.hpp"

using namespace singlab;
using namespace singlab::app;

int main(int argc, char** argv) {
    CLI::App app{"singlab: profiles, strip solves and checks for -Delta u = f(u) with singular f"};
    app.require_subcommand(1);
    unsigned long seed = 0;
    app.add_option("--seed", seed, "Reserved; no component is stochastic");

    std::string scenario_path;
    std::string field_path;
    std::string axis;
    std::string results_dir;

    auto* profile = app.add_subcommand("profile", "Tabulate the scenario's profile and run profile checks");
    profile->add_option("scenario", scenario_path, "Scenario JSON")->required();
    auto* solve = app.add_subcommand("solve", "Solve the scenario's strip problem");
    solve->add_option("scenario", scenario_path, "Scenario JSON")->required();
    auto* verify = app.add_subcommand("verify", "Run every check of the scenario");
    verify->add_option("scenario", scenario_path, "Scenario JSON")->required();
    verify->add_option("--field", field_path, "Check this field CSV instead of solving");
    auto* sweep = app.add_subcommand("sweep", "Verify a template over one axis of values");
    sweep->add_option("template", scenario_path, "Template scenario JSON")->required();
    sweep->add_option("--axis", axis, "key=v1,v2,... with a dotted key path")->required();
    auto* report = app.add_subcommand("report", "Print a markdown summary of a results directory");
    report->add_option("dir", results_dir, "Results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    RunOptions options;
    options.output_dir = default_output_dir();
    if (!field_path.empty()) options.field_csv = field_path;

    try {
        if (*report) {
            std::cout << make_report(results_dir);
            return kAllPassed;
        }
        if (*sweep) return run_sweep(load_json(scenario_path), axis, options, std::cout);
        const Scenario scenario = load_scenario(scenario_path);
        if (*profile) return run_profile(scenario, options, std::cout);
        if (*solve) return run_solve(scenario, options, std::cout);
        return run_verify(scenario, options, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
