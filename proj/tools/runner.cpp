#include "runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "singlab/compare.hpp"
#include "singlab/errors.hpp"
#include "singlab/io.hpp"

namespace singlab::app {
namespace {

constexpr double kPi = 3.14159265358979323846;

template <typename T>
T param(const CheckSpec& check, const std::string& key, T fallback) {
    if (!check.params.contains(key)) return fallback;
    try {
        return check.params.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad value for '" + key + "' in check '" + check.name + "'");
    }
}

std::optional<Window> window_param(const CheckSpec& check) {
    if (!check.params.contains("window")) return std::nullopt;
    const auto w = param<std::vector<double>>(check, "window", {});
    if (w.size() != 2 || !(w[0] < w[1])) {
        throw ConfigError("'window' in check '" + check.name + "' must be [lo, hi] with lo < hi");
    }
    return Window{w[0], w[1]};
}

double required_M(const Scenario& scenario, const CheckSpec& check) {
    if (check.params.contains("M")) return param<double>(check, "M", 0.0);
    const auto M = reference_M(scenario);
    if (!M) throw ConfigError("check '" + check.name + "' needs a reference M");
    return *M;
}

CheckReport failed_report(const std::string& name, const std::exception& e) {
    CheckReport r;
    r.name = name;
    r.passed = false;
    r.note("error", e.what());
    return r;
}

// Runs one check body; violated check preconditions become failed reports.
template <typename Body>
void run_guarded(std::vector<CheckReport>& out, const std::string& name, Body body) {
    try {
        body(out);
    } catch (const ConfigError&) {
        throw;
    } catch (const SolverError&) {
        throw;
    } catch (const Error& e) {
        out.push_back(failed_report(name, e));
    }
}

double closed_form(const NonlinearitySpec& spec, double M, double t) {
    if (spec.gamma == 3.0) return std::sqrt(2.0 * M * t * t + 2.0 * t * std::sqrt(spec.c_sing));
    return std::pow(spec.c_sing, 1.0 / (spec.gamma + 1.0)) * pure_exact(spec.gamma, t);
}

CheckReport first_integral_check(const ProfileTable& table, const CheckSpec& check) {
    const double tol = param(check, "tolerance", 1e-6);
    const double t_min = param(check, "t_min", 0.01);
    const auto& params = table.params();
    double drift = 0.0;
    std::size_t nodes = 0;
    for (std::size_t k = 0; k < table.size(); ++k) {
        const double t = table.t()[k];
        if (!(t > 0.0) || t < t_min) continue;
        const double vp = table.v_prime()[k];
        drift = std::max(drift, std::abs(0.5 * vp * vp - tail_primitive(params.spec, table.v()[k]) - params.M));
        ++nodes;
    }
    if (nodes == 0) throw WindowError("no profile nodes above t_min");
    CheckReport r;
    r.name = "first_integral";
    r.passed = drift <= tol;
    r.metric("max_drift", drift).metric("tolerance", tol).metric("nodes", static_cast<double>(nodes));
    return r;
}

CheckReport ode_residual_check(const ProfileTable& table, const CheckSpec& check) {
    const double tol = param(check, "tolerance", 1e-3);
    const double t_max = table.t().back();
    const Window w = window_param(check).value_or(Window{0.1 * t_max, t_max});
    const double residual = ode_residual(table, w);
    CheckReport r;
    r.name = "ode_residual";
    r.passed = residual <= tol;
    r.metric("residual", residual).metric("tolerance", tol).metric("window_lo", w.lo).metric("window_hi", w.hi);
    return r;
}

CheckReport asymptotic_slope_check(const ProfileTable& table, const CheckSpec& check) {
    const auto T = param<std::vector<double>>(check, "T", {10.0, 100.0, 1000.0});
    if (T.size() < 2) throw ConfigError("asymptotic_slope needs at least two heights");
    const auto& params = table.params();
    const double limit = std::sqrt(2.0 * params.M);
    CheckReport r;
    r.name = "asymptotic_slope";
    r.passed = true;
    double previous = std::numeric_limits<double>::infinity();
    for (double t : T) {
        const double gap = std::abs(profile_derivative(t, params) - limit);
        if (!(gap < previous)) r.passed = false;
        previous = gap;
        r.metric("gap_T_" + format_real(t), gap);
    }
    r.metric("limit_slope", limit);
    return r;
}

CheckReport closed_form_check(const ProfileTable& table, const CheckSpec& check) {
    const auto& params = table.params();
    const auto& spec = params.spec;
    if (spec.kind != NonlinearityKind::PurePower || (spec.gamma != 3.0 && params.M != 0.0)) {
        throw ConfigError("closed_form needs PurePower with gamma = 3 or M = 0");
    }
    const double tol = param(check, "tolerance", 1e-8);
    double worst = 0.0;
    double worst_t = 0.0;
    for (std::size_t k = 0; k < table.size(); ++k) {
        const double t = table.t()[k];
        if (!(t > 0.0)) continue;
        const double exact = closed_form(spec, params.M, t);
        const double rel = std::abs(table.v()[k] - exact) / exact;
        if (rel > worst) {
            worst = rel;
            worst_t = t;
        }
    }
    CheckReport r;
    r.name = "closed_form";
    r.passed = worst <= tol;
    r.metric("max_relative_error", worst).metric("at_t", worst_t).metric("tolerance", tol);
    return r;
}

Field shifted(const Field& field, double shift) {
    Field out = field;
    for (double& v : out.values()) v += shift;
    return out;
}

CheckReport comparison_check(const Scenario& scenario, const Field& field, const CheckSpec& check) {
    const double shift = param(check, "shift", 0.1);
    const auto mode = param<std::string>(check, "mode", "shift");
    const double lambda = param(check, "lambda", field.domain().lambda);
    const double sign_tol = param(check, "sign_tolerance", kResidualSignTolerance);
    if (!(shift >= 0.0)) throw ConfigError("comparison shift must be non-negative");
    if (mode == "shift") {
        return discrete_comparison_test(field, shifted(field, shift), scenario.nonlinearity, lambda, sign_tol);
    }
    if (mode != "resolve") throw ConfigError("comparison mode must be 'shift' or 'resolve'");
    BoundaryData bc = build_boundary(scenario, field.mesh());
    const auto base_top = bc.top;
    bc.top = [base_top, shift](double x) { return base_top(x) + shift; };
    // Continue from the solved field at the final regularisation value.
    SolverConfig config = scenario.solver;
    config.delta_schedule = {config.delta_schedule.back()};
    const SolveResult upper = newton_solve(field.domain(), scenario.nonlinearity, bc, config, field);
    return discrete_comparison_test(field, upper.field, scenario.nonlinearity, lambda, sign_tol);
}

CheckReport estimate_M_check(const Scenario& scenario, const Field& field, const CheckSpec& check) {
    const double expected = required_M(scenario, check);
    const double rel_tol = param(check, "rel_tol", 0.01);
    const double abs_tol = param(check, "abs_tol", 0.01);
    const double M_hat = estimate_M(field, scenario.nonlinearity, window_param(check));
    const double error = std::abs(M_hat - expected);
    CheckReport r;
    r.name = "estimate_M";
    r.passed = expected > 0.0 ? error <= rel_tol * expected : error <= abs_tol;
    r.metric("M_hat", M_hat).metric("M_expected", expected).metric("abs_error", error);
    r.metric("tolerance", expected > 0.0 ? rel_tol * expected : abs_tol);
    return r;
}

CheckReport profile_error_check(const Scenario& scenario, const Field& field, const CheckSpec& check) {
    ProfileParams params{scenario.nonlinearity, required_M(scenario, check)};
    const double tol = param(check, "tolerance", 5e-3);
    const Window w = window_param(check).value_or(Window{0.0, field.domain().lambda});
    const double error = field_error(
        field, [&](double, double xn) { return xn > 0.0 ? profile_value(xn, params) : 0.0; }, w.lo, w.hi);
    CheckReport r;
    r.name = "profile_error";
    r.passed = error <= tol;
    r.metric("sup_error", error).metric("tolerance", tol).metric("M", params.M);
    r.metric("window_lo", w.lo).metric("window_hi", w.hi);
    return r;
}

CheckReport residual_check(const Scenario& scenario, const Field& field, const CheckSpec& check) {
    const double tol = param(check, "tolerance", scenario.solver.newton_tol);
    const auto residual = interior_residual(field, scenario.nonlinearity);
    const double norm = scaled_residual_norm(field, residual, scenario.nonlinearity);
    CheckReport r;
    r.name = "residual";
    r.passed = norm <= tol;
    r.metric("scaled_residual", norm).metric("tolerance", tol);
    return r;
}

std::string scenario_summary(const std::vector<CheckReport>& reports) {
    std::ostringstream os;
    for (const CheckReport& r : reports) {
        os << (r.passed ? "PASS " : "FAIL ") << r.name;
        for (const auto& [k, v] : r.metrics) os << ' ' << k << '=' << format_real(v);
        for (const auto& [k, v] : r.notes) os << " [" << k << ": " << v << ']';
        os << '\n';
    }
    return os.str();
}

bool all_passed(const std::vector<CheckReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed; });
}

void write_reports(const RunOptions& options, const std::string& name, const std::vector<CheckReport>& reports) {
    write_file_atomic(options.output_dir / (name + "_reports.json"), reports_to_json(reports));
}

void write_profile(const RunOptions& options, const std::string& name, const ProfileTable& table) {
    std::ostringstream csv;
    table.write_csv(csv);
    write_file_atomic(options.output_dir / (name + "_profile.csv"), csv.str());
}

void write_solve(const RunOptions& options, const std::string& name, const SolveResult& result) {
    std::ostringstream field;
    result.field.write_csv(field);
    write_file_atomic(options.output_dir / (name + "_field.csv"), field.str());
    std::ostringstream trace;
    write_trace_jsonl(result.trace, trace);
    write_file_atomic(options.output_dir / (name + "_trace.jsonl"), trace.str());
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

std::string sanitize(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
        if (!keep) c = '_';
    }
    return out;
}

std::string csv_text(double v) { return format_real(v); }

}  // namespace

std::filesystem::path default_output_dir() {
    const char* env = std::getenv("SINGLAB_OUTPUT_DIR");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("results");
}

ProfileTable build_profile(const Scenario& scenario) {
    if (!scenario.profile) throw ConfigError("scenario '" + scenario.name + "' has no 'profile' block");
    ProfileParams params{scenario.nonlinearity, scenario.profile->M};
    try {
        params.validate();
    } catch (const IntegrabilityError& e) {
        throw ConfigError(e.what());
    }
    const auto grid = uniform_grid(scenario.profile->t_max, static_cast<std::size_t>(scenario.profile->n_samples));
    return tabulate(params, grid);
}

BoundaryData build_boundary(const Scenario& scenario, const Mesh& mesh) {
    if (!scenario.domain || !scenario.boundary) {
        throw ConfigError("scenario '" + scenario.name + "' needs 'domain' and 'boundary' blocks");
    }
    const StripDomain& d = *scenario.domain;
    const BoundaryBlock& b = *scenario.boundary;
    BoundaryData bc;
    bc.bottom = scenario.solver.delta_schedule.front();
    double mean = b.top.value;
    if (b.top.kind == TopKind::Profile) {
        mean = profile_value(d.lambda, ProfileParams{scenario.nonlinearity, *b.top.M});
    }
    if (!(mean > std::abs(b.top.amplitude))) throw ConfigError("top boundary data must stay positive");
    const double amp = b.top.amplitude;
    const double k = 2.0 * kPi * b.top.mode / d.L;
    bc.top = [mean, amp, k](double x1) { return amp == 0.0 ? mean : mean + amp * std::sin(k * x1); };
    bc.sides = b.sides.kind;
    if (b.sides.kind == SideKind::DirichletProfile) {
        ProfileParams params{scenario.nonlinearity, b.sides.M};
        bc.side_profile = std::make_shared<ProfileTable>(tabulate(params, mesh.xn));
    }
    return bc;
}

SolveResult solve_scenario(const Scenario& scenario) {
    if (!scenario.domain) throw ConfigError("scenario '" + scenario.name + "' has no 'domain' block");
    const bool periodic = scenario.boundary->sides.kind == SideKind::Periodic;
    const Mesh mesh = build_mesh(*scenario.domain, periodic);
    const BoundaryData bc = build_boundary(scenario, mesh);
    return newton_solve(*scenario.domain, scenario.nonlinearity, bc, scenario.solver);
}

Field read_field_csv(const std::filesystem::path& path, const Scenario& scenario) {
    if (!scenario.domain) throw ConfigError("scenario '" + scenario.name + "' has no 'domain' block");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file '" + path.string() + "'");
    const bool periodic = scenario.boundary->sides.kind == SideKind::Periodic;
    Field field(*scenario.domain, build_mesh(*scenario.domain, periodic));
    std::string line;
    std::getline(in, line);
    if (line != "x1,xN,u") throw ConfigError("field file '" + path.string() + "' lacks the x1,xN,u header");
    std::size_t k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 3 || k >= field.values().size()) {
            throw ConfigError("field file '" + path.string() + "' does not match the scenario mesh");
        }
        try {
            field.values()[k++] = std::stod(cells[2]);
        } catch (const std::exception&) {
            throw ConfigError("unreadable value in field file '" + path.string() + "'");
        }
    }
    if (k != field.values().size()) {
        throw ConfigError("field file '" + path.string() + "' does not match the scenario mesh");
    }
    return field;
}

std::vector<CheckReport> run_profile_checks(const Scenario& scenario, const ProfileTable& table) {
    std::vector<CheckReport> out;
    for (const CheckSpec& check : scenario.checks) {
        if (!is_profile_check(check.name)) continue;
        run_guarded(out, check.name, [&](std::vector<CheckReport>& reports) {
            if (check.name == "first_integral") {
                reports.push_back(first_integral_check(table, check));
            } else if (check.name == "ode_residual") {
                reports.push_back(ode_residual_check(table, check));
            } else if (check.name == "asymptotic_slope") {
                reports.push_back(asymptotic_slope_check(table, check));
            } else if (check.name == "closed_form") {
                reports.push_back(closed_form_check(table, check));
            } else if (check.name == "profile_exponent") {
                auto boundary = fit_boundary_exponent(table, window_param(check));
                boundary.name = "profile_boundary_exponent";
                auto gradient = fit_gradient_exponent(table, DirectionVector::normal(), window_param(check));
                gradient.name = "profile_gradient_exponent";
                reports.push_back(std::move(boundary));
                reports.push_back(std::move(gradient));
            }
        });
    }
    return out;
}

std::vector<CheckReport> run_field_checks(const Scenario& scenario, const Field& field) {
    std::vector<CheckReport> out;
    const NonlinearitySpec& spec = scenario.nonlinearity;
    for (const CheckSpec& check : scenario.checks) {
        if (!is_field_check(check.name)) continue;
        run_guarded(out, check.name, [&](std::vector<CheckReport>& reports) {
            const std::string& n = check.name;
            if (n == "monotone_xn") {
                reports.push_back(check_monotone_xn(field, param(check, "fraction", 0.9)));
            } else if (n == "moving_plane") {
                const auto levels =
                    param<std::vector<double>>(check, "levels", default_plane_levels(field.domain().lambda));
                reports.push_back(moving_plane_check(field, levels));
            } else if (n == "boundary_exponent") {
                reports.push_back(fit_boundary_exponent(field, spec, window_param(check)));
            } else if (n == "gradient_exponent") {
                const auto dir = DirectionVector::from_degrees(param(check, "theta_deg", 90.0));
                reports.push_back(fit_gradient_exponent(field, spec, dir, window_param(check)));
            } else if (n == "lower_bounds") {
                std::optional<double> t0;
                if (check.params.contains("t0")) t0 = param(check, "t0", 0.0);
                reports.push_back(check_lower_bounds(field, spec, t0));
            } else if (n == "rigidity") {
                RigidityOptions opts;
                opts.tolerance = param(check, "tolerance", opts.tolerance);
                opts.lower_half_only = param(check, "lower_half_only", opts.lower_half_only);
                reports.push_back(rigidity_deviation(field, ProfileParams{spec, reference_M(scenario).value_or(0.0)}, opts));
            } else if (n == "estimate_M") {
                reports.push_back(estimate_M_check(scenario, field, check));
            } else if (n == "rescale") {
                RescaleOptions opts;
                opts.window = window_param(check);
                opts.tolerance = param(check, "tolerance", opts.tolerance);
                reports.push_back(rescale_check(field, param(check, "epsilon", 0.5), spec, opts));
            } else if (n == "comparison") {
                reports.push_back(comparison_check(scenario, field, check));
            } else if (n == "upper_barrier") {
                if (!check.params.contains("mu")) throw ConfigError("upper_barrier needs 'mu'");
                const double rho = param(check, "rho", std::numeric_limits<double>::infinity());
                reports.push_back(upper_barrier_residual(param(check, "mu", 1.0), singular_envelope(spec).exponent,
                                                         spec, field.mesh().xn, rho));
            } else if (n == "profile_error") {
                reports.push_back(profile_error_check(scenario, field, check));
            } else if (n == "residual") {
                reports.push_back(residual_check(scenario, field, check));
            }
        });
    }
    return out;
}

int run_profile(const Scenario& scenario, const RunOptions& options, std::ostream& out) {
    const ProfileTable table = build_profile(scenario);
    const auto reports = run_profile_checks(scenario, table);
    write_profile(options, scenario.name, table);
    write_reports(options, scenario.name, reports);
    out << scenario_summary(reports);
    return all_passed(reports) ? kAllPassed : kCheckFailed;
}

int run_solve(const Scenario& scenario, const RunOptions& options, std::ostream& out) {
    const SolveResult result = solve_scenario(scenario);
    write_solve(options, scenario.name, result);
    out << "solved " << scenario.name << ": " << result.trace.size()
        << " Newton steps, scaled residual " << format_real(result.residual_norm) << '\n';
    return kAllPassed;
}

std::vector<CheckReport> verify_scenario(const Scenario& scenario, const RunOptions& options) {
    std::vector<CheckReport> reports;
    if (scenario.profile) {
        const ProfileTable table = build_profile(scenario);
        write_profile(options, scenario.name, table);
        reports = run_profile_checks(scenario, table);
    }
    if (scenario.domain) {
        std::optional<Field> field;
        if (options.field_csv) {
            field = read_field_csv(*options.field_csv, scenario);
        } else {
            SolveResult result = solve_scenario(scenario);
            write_solve(options, scenario.name, result);
            field = std::move(result.field);
        }
        auto field_reports = run_field_checks(scenario, *field);
        reports.insert(reports.end(), field_reports.begin(), field_reports.end());
    }
    write_reports(options, scenario.name, reports);
    return reports;
}

int run_verify(const Scenario& scenario, const RunOptions& options, std::ostream& out) {
    const auto reports = verify_scenario(scenario, options);
    out << scenario_summary(reports);
    return all_passed(reports) ? kAllPassed : kCheckFailed;
}

int run_sweep(const Json& template_doc, const std::string& axis, const RunOptions& options, std::ostream& out) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("sweep axis must read key=v1,v2,...");
    const std::string key = axis.substr(0, eq);
    const auto values = split(axis.substr(eq + 1), ',');
    if (values.empty()) throw ConfigError("sweep axis has no values");
    if (!template_doc.is_object() || !template_doc.contains("name") || !template_doc.at("name").is_string()) {
        throw ConfigError("sweep template needs a string 'name'");
    }
    const std::string base = template_doc.at("name").get<std::string>();

    struct Cell {
        std::string value;
        std::string status;
        std::vector<CheckReport> reports;
    };
    std::vector<Cell> cells;
    int worst = kAllPassed;
    for (const std::string& value : values) {
        Json doc = template_doc;
        set_path(doc, key, parse_axis_value(value));
        doc["name"] = base + "_" + sanitize(key) + "_" + sanitize(value);
        Cell cell{value, "passed", {}};
        int code = kAllPassed;
        try {
            const Scenario scenario = parse_scenario(doc);
            cell.reports = verify_scenario(scenario, options);
            if (!all_passed(cell.reports)) {
                cell.status = "failed";
                code = kCheckFailed;
            }
        } catch (const ConfigError& e) {
            cell.status = "config_error";
            cell.reports.push_back(failed_report("config", e));
            code = kConfigError;
        } catch (const SolverError& e) {
            cell.status = "solver_failure";
            cell.reports.push_back(failed_report("solve", e));
            code = kSolverFailure;
        }
        worst = std::max(worst, code);
        out << key << '=' << value << ": " << cell.status << '\n';
        cells.push_back(std::move(cell));
    }

    // Metric columns in first-seen order across cells.
    std::vector<std::string> columns;
    std::set<std::string> seen;
    for (const Cell& cell : cells) {
        for (const CheckReport& r : cell.reports) {
            for (const auto& [k, v] : r.metrics) {
                const std::string column = r.name + "." + k;
                if (seen.insert(column).second) columns.push_back(column);
            }
        }
    }
    std::ostringstream csv;
    csv << key << ",status,checks_passed,checks_failed";
    for (const std::string& c : columns) csv << ',' << c;
    csv << '\n';
    std::vector<ComparisonRow> comparisons;
    for (const Cell& cell : cells) {
        const auto passed = std::count_if(cell.reports.begin(), cell.reports.end(),
                                          [](const CheckReport& r) { return r.passed; });
        csv << cell.value << ',' << cell.status << ',' << passed << ','
            << static_cast<long>(cell.reports.size()) - passed;
        for (const std::string& c : columns) {
            csv << ',';
            const auto dot = c.find('.');
            const std::string check = c.substr(0, dot);
            const std::string metric = c.substr(dot + 1);
            for (const CheckReport& r : cell.reports) {
                if (r.name == check && r.has_metric(metric)) {
                    csv << csv_text(r.metric(metric));
                    break;
                }
            }
        }
        csv << '\n';
        for (const CheckReport& r : cell.reports) {
            if (r.name == "comparison" && r.has_metric("lambda")) {
                comparisons.push_back({r.metric("lambda"), r.metric("C_M"), r.metric("lambda_star"),
                                       r.metric("held") != 0.0});
            }
        }
    }
    write_file_atomic(options.output_dir / (base + "_sweep.csv"), csv.str());
    if (!comparisons.empty()) {
        std::ostringstream cmp;
        write_comparison_csv(comparisons, cmp);
        write_file_atomic(options.output_dir / (base + "_comparison.csv"), cmp.str());
    }
    return worst;
}

std::string make_report(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("'" + dir.string() + "' is not a directory");
    std::vector<std::filesystem::path> reports;
    std::vector<std::filesystem::path> sweeps;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string file = entry.path().filename().string();
        const auto ends_with = [&](const std::string& suffix) {
            return file.size() > suffix.size() && file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0;
        };
        if (ends_with("_reports.json")) reports.push_back(entry.path());
        if (ends_with("_sweep.csv") || ends_with("_comparison.csv")) sweeps.push_back(entry.path());
    }
    std::sort(reports.begin(), reports.end());
    std::sort(sweeps.begin(), sweeps.end());

    std::ostringstream md;
    md << "# singlab results\n\n";
    std::size_t total = 0;
    std::size_t failed = 0;
    for (const auto& path : reports) {
        std::ifstream in(path);
        std::stringstream text;
        text << in.rdbuf();
        std::vector<CheckReport> parsed;
        try {
            parsed = reports_from_json(text.str());
        } catch (const std::exception& e) {
            throw ConfigError("cannot read '" + path.string() + "': " + e.what());
        }
        const std::string file = path.filename().string();
        md << "## " << file.substr(0, file.size() - std::string("_reports.json").size()) << "\n\n";
        md << "| check | result | metrics |\n|---|---|---|\n";
        for (const CheckReport& r : parsed) {
            ++total;
            if (!r.passed) ++failed;
            md << "| " << r.name << " | " << (r.passed ? "pass" : "**FAIL**") << " | ";
            bool first = true;
            for (const auto& [k, v] : r.metrics) {
                md << (first ? "" : ", ") << k << "=" << format_real(v);
                first = false;
            }
            for (const auto& [k, v] : r.notes) {
                md << (first ? "" : ", ") << k << ": " << v;
                first = false;
            }
            md << " |\n";
        }
        md << '\n';
    }
    if (!sweeps.empty()) {
        md << "## Sweep tables\n\n";
        for (const auto& path : sweeps) {
            std::ifstream in(path);
            std::string line;
            std::size_t rows = 0;
            while (std::getline(in, line)) ++rows;
            md << "- `" << path.filename().string() << "`: " << (rows ? rows - 1 : 0) << " rows\n";
        }
        md << '\n';
    }
    md << "**" << total - failed << " of " << total << " checks passed across " << reports.size()
       << " scenarios.**\n";
    return md.str();
}

}  // namespace singlab::app
