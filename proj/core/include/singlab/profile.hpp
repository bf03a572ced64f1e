#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "singlab/interpolation.hpp"
#include "singlab/nonlinearity.hpp"

namespace singlab {

/// Parameters of the one-dimensional solution v_M of -v'' = f(v), v(0) = 0,
/// characterised by the first integral (v')^2 / 2 - F(v) = M.
struct ProfileParams {
    NonlinearitySpec spec;
    double M = 0.0;

    /// Throws DomainError for M < 0 and IntegrabilityError when F is undefined.
    void validate() const;
};

/// K_gamma = (gamma+1)^(2/(gamma+1)) / (2 gamma - 2)^(1/(gamma+1)).
double pure_constant(double gamma);

/// The explicit half-space solution K_gamma x^(2/(gamma+1)) of -u'' = u^-gamma.
/// Throws DomainError for gamma <= 1 or x < 0.
double pure_exact(double gamma, double x);

/// Small-t behaviour of v_M: the pure solution rescaled to the leading
/// singular envelope c0 t^-gamma0 of f.
double profile_asymptote(const NonlinearitySpec& spec, double t);

/// Phi(v) = integral over (0, v) of ds / sqrt(M + F(s)).
double phi(double v, const ProfileParams& params);

/// The v solving Phi(v) = sqrt(2) t.
double profile_value(double t, const ProfileParams& params);

/// v'(t) = sqrt(2 (M + F(v(t)))). Requires t > 0.
double profile_derivative(double t, const ProfileParams& params);

/// Sampled profile. Node values are stored verbatim; `value_at` and
/// `derivative_at` interpolate between nodes with a monotone cubic that uses
/// the stored derivatives as Hermite slopes.
class ProfileTable {
public:
    ProfileTable(ProfileParams params, std::vector<double> t, std::vector<double> v,
                 std::vector<double> v_prime);

    const ProfileParams& params() const { return params_; }
    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& v() const { return v_; }
    const std::vector<double>& v_prime() const { return v_prime_; }
    std::size_t size() const { return t_.size(); }

    double value_at(double t) const;
    double derivative_at(double t) const;

    /// max over nodes with t > 0 of |v'^2/2 - F(v) - M|.
    double first_integral_drift() const;

    /// t,v,v_prime with 17 significant digits, LF line endings.
    void write_csv(std::ostream& out) const;

private:
    ProfileParams params_;
    std::vector<double> t_;
    std::vector<double> v_;
    std::vector<double> v_prime_;
    MonotoneCubic interp_;
};

/// Evaluates profile_value / profile_derivative at every node. Each node is
/// computed independently of the others.
ProfileTable tabulate(const ProfileParams& params, std::span<const double> t_grid);

/// `count` equally spaced nodes on [0, t_max].
std::vector<double> uniform_grid(double t_max, std::size_t count);

/// The table of t -> lambda^(-2/(gamma+1)) v(lambda t), realised on the nodes
/// t_j / lambda, together with the rescaled first-integral constant. Only
/// defined for PurePower, the one kind whose equation is scale invariant.
ProfileTable scaled_family(double lambda, const ProfileTable& base);

struct Window {
    double lo;
    double hi;
};

/// max over interior nodes of |(-v(t-h) + 2 v(t) - v(t+h)) / h^2 - f(v(t))|,
/// restricted to nodes with equal neighbour spacing whose stencil lies in
/// `window` (the whole table by default). Throws DomainError when no
/// three-node stencil qualifies.
double ode_residual(const ProfileTable& table, std::optional<Window> window = std::nullopt);

}  // namespace singlab
