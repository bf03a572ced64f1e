#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scenario.hpp"
#include "singlab/profile.hpp"
#include "singlab/strip.hpp"
#include "singlab/verifier.hpp"

namespace singlab::app {

enum ExitCode : int { kAllPassed = 0, kCheckFailed = 1, kSolverFailure = 2, kConfigError = 3 };

struct RunOptions {
    std::filesystem::path output_dir = "results";
    /// Verify against this field CSV instead of solving.
    std::optional<std::filesystem::path> field_csv;
};

/// Output directory from SINGLAB_OUTPUT_DIR, "results" when unset.
std::filesystem::path default_output_dir();

ProfileTable build_profile(const Scenario& scenario);
BoundaryData build_boundary(const Scenario& scenario, const Mesh& mesh);
SolveResult solve_scenario(const Scenario& scenario);
Field read_field_csv(const std::filesystem::path& path, const Scenario& scenario);

std::vector<CheckReport> run_profile_checks(const Scenario& scenario, const ProfileTable& table);
std::vector<CheckReport> run_field_checks(const Scenario& scenario, const Field& field);

/// Profile and field checks of `scenario`, with artifacts and the reports
/// file written to `options.output_dir`.
std::vector<CheckReport> verify_scenario(const Scenario& scenario, const RunOptions& options);

/// The subcommands. Each writes its artifacts below `options.output_dir`,
/// prints a summary to `out` and returns an ExitCode. Library errors
/// propagate; `main` maps them to exit codes.
int run_profile(const Scenario& scenario, const RunOptions& options, std::ostream& out);
int run_solve(const Scenario& scenario, const RunOptions& options, std::ostream& out);
int run_verify(const Scenario& scenario, const RunOptions& options, std::ostream& out);
int run_sweep(const Json& template_doc, const std::string& axis, const RunOptions& options,
              std::ostream& out);

/// Markdown summary of every *_reports.json and *_sweep.csv in `dir`.
std::string make_report(const std::filesystem::path& dir);

}  // namespace singlab::app
