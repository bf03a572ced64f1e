#include "scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "singlab/errors.hpp"

namespace singlab::app {
namespace {

const std::map<std::string, std::set<std::string>>& profile_checks() {
    static const std::map<std::string, std::set<std::string>> checks{
        {"first_integral", {"tolerance", "t_min"}},
        {"ode_residual", {"tolerance", "window"}},
        {"asymptotic_slope", {"T"}},
        {"profile_exponent", {"window"}},
        {"closed_form", {"tolerance"}},
    };
    return checks;
}

const std::map<std::string, std::set<std::string>>& field_checks() {
    static const std::map<std::string, std::set<std::string>> checks{
        {"monotone_xn", {"fraction"}},
        {"moving_plane", {"levels"}},
        {"boundary_exponent", {"window"}},
        {"gradient_exponent", {"theta_deg", "window"}},
        {"lower_bounds", {"t0"}},
        {"rigidity", {"tolerance", "lower_half_only", "M"}},
        {"estimate_M", {"M", "rel_tol", "abs_tol", "window"}},
        {"rescale", {"epsilon", "tolerance", "window"}},
        {"comparison", {"shift", "mode", "lambda", "sign_tolerance"}},
        {"upper_barrier", {"mu", "rho"}},
        {"profile_error", {"tolerance", "M", "window"}},
        {"residual", {"tolerance"}},
    };
    return checks;
}

void expect_object(const Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
}

void expect_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    expect_object(j, where);
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
    }
}

template <typename T>
T get(const Json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad or missing '" + key + "' in '" + where + "': " + e.what());
    }
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    return get<T>(j, key, where);
}

NonlinearitySpec parse_nonlinearity(const Json& j) {
    expect_keys(j, {"kind", "gamma", "c_sing", "poly_coeffs", "beta", "d_sing"}, "nonlinearity");
    const auto kind_name = get<std::string>(j, "kind", "nonlinearity");
    NonlinearityKind kind;
    try {
        kind = nonlinearity_kind_from_string(kind_name);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const double gamma = get<double>(j, "gamma", "nonlinearity");
    const double c = get_or<double>(j, "c_sing", 1.0, "nonlinearity");
    NonlinearitySpec spec;
    try {
        switch (kind) {
            case NonlinearityKind::PurePower:
                spec = NonlinearitySpec::pure_power(gamma, c);
                break;
            case NonlinearityKind::PowerPlusPolynomial:
                spec = NonlinearitySpec::power_plus_polynomial(
                    gamma, c, get<std::vector<double>>(j, "poly_coeffs", "nonlinearity"));
                break;
            case NonlinearityKind::DoublePower:
                spec = NonlinearitySpec::double_power(gamma, c, get<double>(j, "beta", "nonlinearity"),
                                                      get<double>(j, "d_sing", "nonlinearity"));
                break;
            case NonlinearityKind::Custom:
                throw ConfigError("Custom nonlinearities cannot be given in a scenario file");
        }
        spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid nonlinearity: ") + e.what());
    }
    return spec;
}

ProfileBlock parse_profile(const Json& j) {
    expect_keys(j, {"M", "t_max", "n_samples"}, "profile");
    ProfileBlock p;
    p.M = get_or<double>(j, "M", p.M, "profile");
    p.t_max = get_or<double>(j, "t_max", p.t_max, "profile");
    p.n_samples = get_or<int>(j, "n_samples", p.n_samples, "profile");
    if (!(p.M >= 0.0)) throw ConfigError("profile.M must be non-negative");
    if (!(p.t_max > 0.0)) throw ConfigError("profile.t_max must be positive");
    if (p.n_samples < 3) throw ConfigError("profile.n_samples must be at least 3");
    return p;
}

StripDomain parse_domain(const Json& j, const NonlinearitySpec& spec) {
    expect_keys(j, {"L", "lambda", "nx", "ny", "q"}, "domain");
    StripDomain d;
    d.L = get_or<double>(j, "L", d.L, "domain");
    d.lambda = get_or<double>(j, "lambda", d.lambda, "domain");
    d.nx = get_or<int>(j, "nx", d.nx, "domain");
    d.ny = get_or<int>(j, "ny", d.ny, "domain");
    d.q = get_or<double>(j, "q", 0.5 * (singular_envelope(spec).exponent + 1.0), "domain");
    try {
        d.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }
    return d;
}

BoundaryBlock parse_boundary(const Json& j) {
    expect_keys(j, {"top", "sides"}, "boundary");
    BoundaryBlock b;
    if (j.contains("top")) {
        const Json& t = j.at("top");
        expect_keys(t, {"kind", "M", "value", "amplitude", "mode"}, "boundary.top");
        const auto kind = get_or<std::string>(t, "kind", "constant", "boundary.top");
        if (kind == "profile") {
            b.top.kind = TopKind::Profile;
        } else if (kind == "constant") {
            b.top.kind = TopKind::Constant;
        } else {
            throw ConfigError("boundary.top.kind must be 'profile' or 'constant'");
        }
        if (t.contains("M")) b.top.M = get<double>(t, "M", "boundary.top");
        b.top.value = get_or<double>(t, "value", 1.0, "boundary.top");
        b.top.amplitude = get_or<double>(t, "amplitude", 0.0, "boundary.top");
        b.top.mode = get_or<int>(t, "mode", 1, "boundary.top");
        if (b.top.M && *b.top.M < 0.0) throw ConfigError("boundary.top.M must be non-negative");
        if (b.top.kind == TopKind::Constant && !(b.top.value > std::abs(b.top.amplitude))) {
            throw ConfigError("boundary.top data must stay positive");
        }
    }
    if (j.contains("sides")) {
        const Json& s = j.at("sides");
        expect_keys(s, {"kind", "M"}, "boundary.sides");
        const auto kind = get_or<std::string>(s, "kind", "periodic", "boundary.sides");
        if (kind == "periodic") {
            b.sides.kind = SideKind::Periodic;
        } else if (kind == "profile") {
            b.sides.kind = SideKind::DirichletProfile;
        } else {
            throw ConfigError("boundary.sides.kind must be 'periodic' or 'profile'");
        }
        b.sides.M = get_or<double>(s, "M", 0.0, "boundary.sides");
        if (b.sides.M < 0.0) throw ConfigError("boundary.sides.M must be non-negative");
    }
    if (!b.top.M) b.top.M = b.sides.kind == SideKind::DirichletProfile ? b.sides.M : 0.0;
    return b;
}

SolverConfig parse_solver(const Json& j) {
    expect_keys(j, {"newton_tol", "max_iters", "damping", "floor_fraction", "delta_schedule"}, "solver");
    SolverConfig c;
    c.newton_tol = get_or<double>(j, "newton_tol", c.newton_tol, "solver");
    c.max_iters = get_or<int>(j, "max_iters", c.max_iters, "solver");
    c.damping = get_or<double>(j, "damping", c.damping, "solver");
    c.floor_fraction = get_or<double>(j, "floor_fraction", c.floor_fraction, "solver");
    c.delta_schedule = get_or<std::vector<double>>(j, "delta_schedule", c.delta_schedule, "solver");
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid solver settings: ") + e.what());
    }
    return c;
}

CheckSpec parse_check(const Json& j) {
    expect_object(j, "checks[]");
    CheckSpec c;
    c.name = get<std::string>(j, "name", "checks[]");
    const auto* allowed = profile_checks().count(c.name) ? &profile_checks().at(c.name)
                          : field_checks().count(c.name) ? &field_checks().at(c.name)
                                                         : nullptr;
    if (!allowed) throw ConfigError("unknown check '" + c.name + "'");
    for (const auto& [key, value] : j.items()) {
        if (key == "name") continue;
        if (!allowed->count(key)) throw ConfigError("unknown parameter '" + key + "' for check '" + c.name + "'");
        c.params[key] = value;
    }
    return c;
}

}  // namespace

bool is_profile_check(const std::string& name) { return profile_checks().count(name) > 0; }

bool is_field_check(const std::string& name) { return field_checks().count(name) > 0; }

Scenario parse_scenario(const Json& doc) {
    expect_keys(doc, {"name", "nonlinearity", "profile", "domain", "boundary", "solver", "checks"}, "scenario");
    Scenario s;
    s.name = get<std::string>(doc, "name", "scenario");
    if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) {
        throw ConfigError("scenario name must be a non-empty file stem");
    }
    s.nonlinearity = parse_nonlinearity(doc.contains("nonlinearity") ? doc.at("nonlinearity")
                                                                    : throw ConfigError("missing 'nonlinearity'"));
    if (doc.contains("profile")) s.profile = parse_profile(doc.at("profile"));
    if (doc.contains("domain")) s.domain = parse_domain(doc.at("domain"), s.nonlinearity);
    if (doc.contains("boundary")) s.boundary = parse_boundary(doc.at("boundary"));
    if (doc.contains("solver")) s.solver = parse_solver(doc.at("solver"));
    if (doc.contains("checks")) {
        if (!doc.at("checks").is_array()) throw ConfigError("'checks' must be an array");
        for (const Json& c : doc.at("checks")) s.checks.push_back(parse_check(c));
    }
    if (s.domain.has_value() != s.boundary.has_value()) {
        throw ConfigError("'domain' and 'boundary' must be given together");
    }
    for (const CheckSpec& c : s.checks) {
        if (is_profile_check(c.name) && !s.profile) {
            throw ConfigError("check '" + c.name + "' needs a 'profile' block");
        }
        if (is_field_check(c.name) && !s.domain) {
            throw ConfigError("check '" + c.name + "' needs 'domain' and 'boundary' blocks");
        }
    }
    return s;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

Scenario load_scenario(const std::string& path) { return parse_scenario(load_json(path)); }

void set_path(Json& doc, const std::string& dotted, const Json& value) {
    Json* node = &doc;
    std::stringstream parts(dotted);
    std::string part;
    std::vector<std::string> keys;
    while (std::getline(parts, part, '.')) keys.push_back(part);
    if (keys.empty()) throw ConfigError("empty sweep axis key");
    for (std::size_t k = 0; k < keys.size(); ++k) {
        const bool last = k + 1 == keys.size();
        const std::string& key = keys[k];
        if (node->is_array()) {
            std::size_t index = 0;
            try {
                index = std::stoul(key);
            } catch (const std::exception&) {
                throw ConfigError("'" + key + "' is not an array index in '" + dotted + "'");
            }
            if (index >= node->size()) throw ConfigError("index out of range in '" + dotted + "'");
            node = &(*node)[index];
        } else if (node->is_object()) {
            if (last) {
                (*node)[key] = value;
                return;
            }
            if (!node->contains(key)) throw ConfigError("no key '" + key + "' along '" + dotted + "'");
            node = &(*node)[key];
        } else {
            throw ConfigError("cannot descend into '" + key + "' along '" + dotted + "'");
        }
        if (last) *node = value;
    }
}

Json parse_axis_value(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        return Json(text);
    }
}

std::optional<double> reference_M(const Scenario& scenario) {
    if (scenario.boundary) {
        if (scenario.boundary->sides.kind == SideKind::DirichletProfile) return scenario.boundary->sides.M;
        if (scenario.boundary->top.kind == TopKind::Profile) return *scenario.boundary->top.M;
    }
    if (scenario.profile) return scenario.profile->M;
    return std::nullopt;
}

}  // namespace singlab::app
