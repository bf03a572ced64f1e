#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "singlab/nonlinearity.hpp"
#include "singlab/profile.hpp"
#include "singlab/strip.hpp"

namespace singlab {

/// Result of one quantitative check. Metrics and notes keep insertion order
/// so serialised reports are reproducible.
struct CheckReport {
    std::string name;
    bool passed = false;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, std::string>> notes;

    CheckReport& metric(std::string key, double value);
    CheckReport& note(std::string key, std::string value);
    /// Throws std::out_of_range for an unknown key.
    double metric(const std::string& key) const;
    bool has_metric(const std::string& key) const;
    std::string note(const std::string& key) const;
};

/// JSON array of {"name", "passed", "metrics": {...}, "notes": {...}}.
std::string reports_to_json(std::span<const CheckReport> reports);
std::vector<CheckReport> reports_from_json(const std::string& text);

/// Unit direction (cos theta, sin theta) in the (x1, x_N) plane. The vertical
/// component must be at least `beta_min`.
class DirectionVector {
public:
    explicit DirectionVector(double theta, double beta_min = 0.1);
    static DirectionVector from_degrees(double degrees, double beta_min = 0.1);
    static DirectionVector normal() { return DirectionVector(1.5707963267948966); }

    double theta() const { return theta_; }
    double horizontal() const { return horizontal_; }
    double vertical() const { return vertical_; }

private:
    double theta_;
    double horizontal_;
    double vertical_;
};

/// Strictly positive vertical forward differences on rows up to `fraction`
/// of the strip height.
CheckReport check_monotone_xn(const Field& field, double fraction = 0.9);

/// Default reflection heights: lambda * {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}.
std::vector<double> default_plane_levels(double lambda);

/// u(x1, x_N) <= u(x1, 2 mu - x_N) + tol_interp for every x_N < mu and every
/// level mu, where the reflected value comes from a monotone cubic along the
/// column and tol_interp is ten times the local undivided fourth difference.
CheckReport moving_plane_check(const Field& field, std::span<const double> levels);

/// Exponent-fit tolerance on 2/(gamma+1) and (1-gamma)/(gamma+1).
inline constexpr double kExponentTolerance = 0.05;

/// Default fit window [max(5 delta, x_N(3)), lambda/4].
Window default_fit_window(const Field& field);
Window default_fit_window(const ProfileTable& table);

/// Log-log slope of u against x_N per column, averaged over x1, compared
/// with 2/(gamma0+1) for the leading singular exponent gamma0 of `spec`.
/// Throws WindowError when fewer than six layers fall in the window.
CheckReport fit_boundary_exponent(const Field& field, const NonlinearitySpec& spec,
                                  std::optional<Window> window = std::nullopt);
CheckReport fit_boundary_exponent(const ProfileTable& table,
                                  std::optional<Window> window = std::nullopt);

/// Log-log slope of the directional derivative against x_N, compared with
/// (1-gamma0)/(gamma0+1). Throws SignError if the derivative is not positive
/// somewhere in the window.
CheckReport fit_gradient_exponent(const Field& field, const NonlinearitySpec& spec,
                                  const DirectionVector& direction,
                                  std::optional<Window> window = std::nullopt);
CheckReport fit_gradient_exponent(const ProfileTable& table, const DirectionVector& direction,
                                  std::optional<Window> window = std::nullopt);

/// Largest C with u >= min{C x_N^(2/(gamma+1)), t0} and u >= min{C x_N, t0};
/// the bounds asserted follow the spec's hypothesis flags. `t0` defaults to
/// the field maximum. Throws PreconditionError when neither hypothesis holds.
CheckReport check_lower_bounds(const Field& field, const NonlinearitySpec& spec,
                               std::optional<double> t0 = std::nullopt);

struct RigidityOptions {
    double tolerance = 5e-3;
    /// Apply the pass criterion to rows with x_N <= lambda/2 only.
    bool lower_half_only = false;
};

/// Horizontal oscillation max_j (max_i u - min_i u) and the distance of the
/// row average from v_M for the best-fit M.
CheckReport rigidity_deviation(const Field& field, const ProfileParams& params,
                               const RigidityOptions& options = {});

/// Median over sample heights of (d_N u)^2 / 2 - F(u) on the horizontal
/// average. The default window is [lambda/4, 3 lambda/4].
double estimate_M(const Field& field, const NonlinearitySpec& spec,
                  std::optional<Window> window = std::nullopt);
double estimate_M(const ProfileTable& table, std::optional<Window> window = std::nullopt);

struct RescaleOptions {
    std::optional<Window> window;
    double tolerance = 2e-2;
};

/// Forms w(x) = eps^(-2/(gamma+1)) u(eps x) by spline interpolation and
/// measures its discrete residual against
/// -Delta w = eps^(2 gamma/(gamma+1)) f(eps^(2/(gamma+1)) w),
/// which for f = t^-gamma + g reads -Delta w = w^-gamma + eps^(2gamma/(gamma+1)) g(...).
/// Throws WindowError for eps outside (0, 1] or a window leaving the strip.
CheckReport rescale_check(const Field& field, double epsilon, const NonlinearitySpec& spec,
                          const RescaleOptions& options = {});

}  // namespace singlab
