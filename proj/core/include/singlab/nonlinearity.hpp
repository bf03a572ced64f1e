#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace singlab {

enum class NonlinearityKind { PurePower, PowerPlusPolynomial, DoublePower, Custom };

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(const std::string& name);

/// The envelope `coeff * t^(-exponent)`.
struct PowerEnvelope {
    double coeff = 1.0;
    double exponent = 1.0;

    double operator()(double t) const;
};

/// Declared behaviour of `f` for t > start: nonincreasing with f <= envelope.
struct TailModel {
    PowerEnvelope envelope;
    double start = 1.0;
};

/// A black-box nonlinearity. The envelopes are declarations, not inferences:
/// hypotheses about a callable's behaviour at 0 and infinity cannot be read
/// off finitely many samples.
struct CustomModel {
    std::function<double(double)> eval;
    PowerEnvelope singular;
    TailModel tail;
};

/// f(t) = c_sing t^-gamma + g(t)  or  c_sing t^-gamma + d_sing t^-beta  or a custom callable.
///
/// `poly_coeffs` holds g lowest degree first. For Custom, `gamma` and
/// `c_sing` mirror the declared singular envelope.
struct NonlinearitySpec {
    NonlinearityKind kind = NonlinearityKind::PurePower;
    double gamma = 3.0;
    double c_sing = 1.0;
    std::vector<double> poly_coeffs;
    double beta = 0.0;
    double d_sing = 0.0;
    std::shared_ptr<const CustomModel> custom;

    static NonlinearitySpec pure_power(double gamma, double c_sing = 1.0);
    static NonlinearitySpec power_plus_polynomial(double gamma, double c_sing,
                                                  std::vector<double> poly_coeffs);
    static NonlinearitySpec double_power(double gamma, double c_sing, double beta, double d_sing);
    static NonlinearitySpec make_custom(CustomModel model);

    /// Throws DomainError on parameters outside the kind's admissible range.
    void validate() const;
};

/// f(t). Throws DomainError for t <= 0.
double eval(const NonlinearitySpec& spec, double t);

/// f'(t): analytic for catalog kinds, central difference for Custom.
double derivative(const NonlinearitySpec& spec, double t);

/// The regular part g(t) of a PowerPlusPolynomial spec (0 for other kinds).
double regular_part(const NonlinearitySpec& spec, double t);

/// Leading behaviour c0 t^-gamma0 of f as t -> 0+.
PowerEnvelope singular_envelope(const NonlinearitySpec& spec);

/// Tail envelope of f. For kinds that are not integrable at infinity the
/// exponent is <= 1 (a polynomial regular part of degree k reports -k).
TailModel tail_model(const NonlinearitySpec& spec);

bool integrable_at_infinity(const NonlinearitySpec& spec);

/// F(s) = integral of f over (s, inf).
/// Throws IntegrabilityError when the tail exponent is <= 1, DomainError for s <= 0.
double tail_primitive(const NonlinearitySpec& spec, double s);

/// Smallest C >= 0 with f(s) - f(t) <= C (s - t) for 0 < t <= s <= M.
double one_sided_lipschitz(const NonlinearitySpec& spec, double M);

enum class Tristate { False, True, Unknown };

std::string to_string(Tristate value);

struct ConditionFlags {
    Tristate positive = Tristate::Unknown;
    Tristate satisfies_F = Tristate::Unknown;
    /// (M, C(M)) for each requested M.
    std::vector<std::pair<double, double>> lipschitz;
    Tristate near_zero_superlinear = Tristate::Unknown;
    Tristate global_singular_lower = Tristate::Unknown;
    Tristate tail_nonincreasing = Tristate::Unknown;
    Tristate tail_envelope = Tristate::Unknown;
    Tristate tail_bound = Tristate::Unknown;
    Tristate globally_nonincreasing = Tristate::Unknown;
};

/// `count` points geometrically spaced over [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// Evaluates the hypothesis flags. Catalog kinds use closed-form derivatives
/// and envelopes; Custom is sampled on `probe_grid`.
ConditionFlags classify(const NonlinearitySpec& spec, std::span<const double> probe_grid,
                        std::span<const double> lipschitz_levels = {});

}  // namespace singlab
