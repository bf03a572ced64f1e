#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "singlab/nonlinearity.hpp"
#include "singlab/strip.hpp"

namespace singlab::app {

using Json = nlohmann::ordered_json;

struct ProfileBlock {
    double M = 0.0;
    double t_max = 10.0;
    int n_samples = 1001;
};

enum class TopKind { Profile, Constant };

struct TopBlock {
    TopKind kind = TopKind::Constant;
    /// Defaults to the side profile's M.
    std::optional<double> M;
    double value = 1.0;
    double amplitude = 0.0;
    int mode = 1;
};

struct SidesBlock {
    SideKind kind = SideKind::Periodic;
    double M = 0.0;
};

struct BoundaryBlock {
    TopBlock top;
    SidesBlock sides;
};

struct CheckSpec {
    std::string name;
    Json params = Json::object();
};

/// One scenario document. Profile checks need `profile`; field checks need
/// `domain` and `boundary`.
struct Scenario {
    std::string name;
    NonlinearitySpec nonlinearity;
    std::optional<ProfileBlock> profile;
    std::optional<StripDomain> domain;
    std::optional<BoundaryBlock> boundary;
    SolverConfig solver;
    std::vector<CheckSpec> checks;
};

bool is_profile_check(const std::string& name);
bool is_field_check(const std::string& name);

/// Throws ConfigError on unknown keys, missing blocks, bad values or unknown
/// check names.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::string& path);
Json load_json(const std::string& path);

/// Sets `doc[a][b]...` for the dotted path "a.b...". Array elements are
/// addressed by index ("checks.0.tolerance"). Throws ConfigError when an
/// intermediate key does not exist.
void set_path(Json& doc, const std::string& dotted, const Json& value);

/// Parses a sweep value: JSON literal if it parses, string otherwise.
Json parse_axis_value(const std::string& text);

/// First-integral constant of the reference profile: boundary side data,
/// then top data, then the profile block.
std::optional<double> reference_M(const Scenario& scenario);

}  // namespace singlab::app
