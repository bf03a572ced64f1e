#include "singlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "singlab/errors.hpp"
#include "singlab/quadrature.hpp"

namespace singlab {
namespace {

double poly_eval(std::span<const double> coeffs, double t) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * t + *it;
    }
    return acc;
}

std::vector<double> poly_derivative(std::span<const double> coeffs) {
    std::vector<double> d;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        d.push_back(static_cast<double>(k) * coeffs[k]);
    }
    return d;
}

int poly_degree(std::span<const double> coeffs) {
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
        if (coeffs[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return -1;
}

// Maximum of a polynomial on [a, b]: endpoints plus critical points, the
// latter bracketed on a fine grid and refined by bisection.
double poly_max(std::span<const double> coeffs, double a, double b) {
    double best = std::max(poly_eval(coeffs, a), poly_eval(coeffs, b));
    const auto d = poly_derivative(coeffs);
    if (poly_degree(d) < 1) return best;
    constexpr int kSamples = 4096;
    double prev_t = a;
    double prev_d = poly_eval(d, a);
    for (int k = 1; k <= kSamples; ++k) {
        const double t = a + (b - a) * k / kSamples;
        const double dt = poly_eval(d, t);
        if (prev_d == 0.0) best = std::max(best, poly_eval(coeffs, prev_t));
        if (prev_d * dt < 0.0) {
            double lo = prev_t, hi = t, dlo = prev_d;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double dm = poly_eval(d, mid);
                if (dm * dlo > 0.0) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            best = std::max(best, poly_eval(coeffs, 0.5 * (lo + hi)));
        }
        prev_t = t;
        prev_d = dt;
    }
    return best;
}

bool has_regular_part(const NonlinearitySpec& spec) {
    return spec.kind == NonlinearityKind::PowerPlusPolynomial && poly_degree(spec.poly_coeffs) >= 0;
}

Tristate from_bool(bool b) { return b ? Tristate::True : Tristate::False; }

Tristate all_of(std::initializer_list<Tristate> values) {
    bool unknown = false;
    for (Tristate v : values) {
        if (v == Tristate::False) return Tristate::False;
        if (v == Tristate::Unknown) unknown = true;
    }
    return unknown ? Tristate::Unknown : Tristate::True;
}

double custom_lipschitz(const CustomModel& model, double M) {
    // Adjacent difference quotients bound every pairwise quotient on the grid
    // (a pairwise quotient is a convex combination of adjacent ones).
    auto estimate = [&](std::size_t n) {
        const auto grid = geometric_grid(M * 1e-6, M, n);
        double best = 0.0;
        double prev = model.eval(grid[0]);
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const double cur = model.eval(grid[k]);
            best = std::max(best, (cur - prev) / (grid[k] - grid[k - 1]));
            prev = cur;
        }
        return best;
    };
    std::size_t n = 512;
    double current = estimate(n);
    while (n < (std::size_t{1} << 18)) {
        n *= 2;
        const double next = estimate(n);
        const double change = std::abs(next - current);
        current = next;
        if (change <= 0.01 * std::abs(next)) break;
    }
    return current;
}

double custom_tail_primitive(const CustomModel& model, double s) {
    const PowerEnvelope& tail = model.tail.envelope;
    const double T = std::max(model.tail.start, 10.0 * s);
    const double remainder = tail.coeff * std::pow(T, 1.0 - tail.exponent) / (tail.exponent - 1.0);
    // Geometric panels keep the refinement local near a small s.
    const int panels = std::max(1, static_cast<int>(std::ceil(std::log2(T / s))));
    const double ratio = std::pow(T / s, 1.0 / panels);
    double scale = std::abs(remainder);
    std::vector<std::pair<double, double>> cuts;
    double lo = s;
    for (int k = 0; k < panels; ++k) {
        const double hi = k + 1 == panels ? T : lo * ratio;
        cuts.emplace_back(lo, hi);
        scale = std::max(scale, std::abs(model.eval(lo)) * (hi - lo));
        lo = hi;
    }
    SimpsonOptions options;
    options.abs_tol = 1e-10 * std::max(1.0, scale) / panels;
    double total = 0.0;
    for (const auto& [a, b] : cuts) {
        total += adaptive_simpson(model.eval, a, b, options);
    }
    return total + remainder;
}

}  // namespace

std::string to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::PurePower: return "PurePower";
        case NonlinearityKind::PowerPlusPolynomial: return "PowerPlusPolynomial";
        case NonlinearityKind::DoublePower: return "DoublePower";
        case NonlinearityKind::Custom: return "Custom";
    }
    return "?";
}

NonlinearityKind nonlinearity_kind_from_string(const std::string& name) {
    if (name == "PurePower") return NonlinearityKind::PurePower;
    if (name == "PowerPlusPolynomial") return NonlinearityKind::PowerPlusPolynomial;
    if (name == "DoublePower") return NonlinearityKind::DoublePower;
    if (name == "Custom") return NonlinearityKind::Custom;
    throw DomainError("unknown nonlinearity kind '" + name + "'");
}

std::string to_string(Tristate value) {
    switch (value) {
        case Tristate::False: return "false";
        case Tristate::True: return "true";
        case Tristate::Unknown: return "unknown";
    }
    return "?";
}

double PowerEnvelope::operator()(double t) const { return coeff * std::pow(t, -exponent); }

NonlinearitySpec NonlinearitySpec::pure_power(double gamma, double c_sing) {
    NonlinearitySpec spec;
    spec.kind = NonlinearityKind::PurePower;
    spec.gamma = gamma;
    spec.c_sing = c_sing;
    spec.validate();
    return spec;
}

NonlinearitySpec NonlinearitySpec::power_plus_polynomial(double gamma, double c_sing,
                                                         std::vector<double> poly_coeffs) {
    NonlinearitySpec spec;
    spec.kind = NonlinearityKind::PowerPlusPolynomial;
    spec.gamma = gamma;
    spec.c_sing = c_sing;
    spec.poly_coeffs = std::move(poly_coeffs);
    spec.validate();
    return spec;
}

NonlinearitySpec NonlinearitySpec::double_power(double gamma, double c_sing, double beta,
                                                double d_sing) {
    NonlinearitySpec spec;
    spec.kind = NonlinearityKind::DoublePower;
    spec.gamma = gamma;
    spec.c_sing = c_sing;
    spec.beta = beta;
    spec.d_sing = d_sing;
    spec.validate();
    return spec;
}

NonlinearitySpec NonlinearitySpec::make_custom(CustomModel model) {
    NonlinearitySpec spec;
    spec.kind = NonlinearityKind::Custom;
    spec.gamma = model.singular.exponent;
    spec.c_sing = model.singular.coeff;
    spec.custom = std::make_shared<const CustomModel>(std::move(model));
    spec.validate();
    return spec;
}

void NonlinearitySpec::validate() const {
    auto fail = [](const std::string& what) { throw DomainError("invalid nonlinearity: " + what); };
    if (kind == NonlinearityKind::Custom) {
        if (!custom || !custom->eval) fail("Custom kind requires a callable");
        if (!(custom->tail.start > 0.0)) fail("custom tail start must be positive");
        if (!(custom->tail.envelope.coeff >= 0.0)) fail("custom tail coefficient must be >= 0");
        return;
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma must be positive");
    if (!(c_sing > 0.0) || !std::isfinite(c_sing)) fail("c_sing must be positive");
    if (kind != NonlinearityKind::PowerPlusPolynomial && !poly_coeffs.empty()) {
        fail("poly_coeffs only apply to PowerPlusPolynomial");
    }
    if (kind == NonlinearityKind::DoublePower) {
        if (!(beta > 1.0)) fail("DoublePower requires beta > 1");
        if (!(d_sing >= 0.0)) fail("d_sing must be >= 0");
    }
}

double eval(const NonlinearitySpec& spec, double t) {
    if (!(t > 0.0)) {
        std::ostringstream os;
        os << "f(t) requires t > 0, got " << t;
        throw DomainError(os.str());
    }
    switch (spec.kind) {
        case NonlinearityKind::PurePower:
            return spec.c_sing * std::pow(t, -spec.gamma);
        case NonlinearityKind::PowerPlusPolynomial:
            return spec.c_sing * std::pow(t, -spec.gamma) + poly_eval(spec.poly_coeffs, t);
        case NonlinearityKind::DoublePower:
            return spec.c_sing * std::pow(t, -spec.gamma) + spec.d_sing * std::pow(t, -spec.beta);
        case NonlinearityKind::Custom:
            return spec.custom->eval(t);
    }
    return 0.0;
}

double derivative(const NonlinearitySpec& spec, double t) {
    if (!(t > 0.0)) throw DomainError("f'(t) requires t > 0");
    const double sing = -spec.gamma * spec.c_sing * std::pow(t, -spec.gamma - 1.0);
    switch (spec.kind) {
        case NonlinearityKind::PurePower:
            return sing;
        case NonlinearityKind::PowerPlusPolynomial:
            return sing + poly_eval(poly_derivative(spec.poly_coeffs), t);
        case NonlinearityKind::DoublePower:
            return sing - spec.beta * spec.d_sing * std::pow(t, -spec.beta - 1.0);
        case NonlinearityKind::Custom: {
            const double h = 1e-5 * t;
            return (spec.custom->eval(t + h) - spec.custom->eval(t - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

double regular_part(const NonlinearitySpec& spec, double t) {
    if (spec.kind != NonlinearityKind::PowerPlusPolynomial) return 0.0;
    return poly_eval(spec.poly_coeffs, t);
}

PowerEnvelope singular_envelope(const NonlinearitySpec& spec) {
    switch (spec.kind) {
        case NonlinearityKind::PurePower:
        case NonlinearityKind::PowerPlusPolynomial:
            return {spec.c_sing, spec.gamma};
        case NonlinearityKind::DoublePower:
            if (spec.d_sing > 0.0 && spec.beta > spec.gamma) return {spec.d_sing, spec.beta};
            if (spec.d_sing > 0.0 && spec.beta == spec.gamma) {
                return {spec.c_sing + spec.d_sing, spec.gamma};
            }
            return {spec.c_sing, spec.gamma};
        case NonlinearityKind::Custom:
            return spec.custom->singular;
    }
    return {};
}

TailModel tail_model(const NonlinearitySpec& spec) {
    switch (spec.kind) {
        case NonlinearityKind::PurePower:
            return {{spec.c_sing, spec.gamma}, 1.0};
        case NonlinearityKind::PowerPlusPolynomial: {
            const int degree = poly_degree(spec.poly_coeffs);
            if (degree < 0) return {{spec.c_sing, spec.gamma}, 1.0};
            double coeff = spec.c_sing;
            for (double a : spec.poly_coeffs) coeff += std::abs(a);
            return {{coeff, -static_cast<double>(degree)}, 1.0};
        }
        case NonlinearityKind::DoublePower:
            if (spec.d_sing > 0.0) {
                return {{spec.c_sing + spec.d_sing, std::min(spec.gamma, spec.beta)}, 1.0};
            }
            return {{spec.c_sing, spec.gamma}, 1.0};
        case NonlinearityKind::Custom:
            return spec.custom->tail;
    }
    return {};
}

bool integrable_at_infinity(const NonlinearitySpec& spec) {
    return tail_model(spec).envelope.exponent > 1.0;
}

double tail_primitive(const NonlinearitySpec& spec, double s) {
    if (!(s > 0.0)) throw DomainError("F(s) requires s > 0");
    if (!integrable_at_infinity(spec)) {
        std::ostringstream os;
        os << to_string(spec.kind) << " nonlinearity is not integrable at infinity (tail exponent "
           << tail_model(spec).envelope.exponent << " <= 1)";
        throw IntegrabilityError(os.str());
    }
    const double g = spec.gamma;
    switch (spec.kind) {
        case NonlinearityKind::PurePower:
        case NonlinearityKind::PowerPlusPolynomial:
            return spec.c_sing * std::pow(s, 1.0 - g) / (g - 1.0);
        case NonlinearityKind::DoublePower: {
            double value = spec.c_sing * std::pow(s, 1.0 - g) / (g - 1.0);
            if (spec.d_sing > 0.0) {
                value += spec.d_sing * std::pow(s, 1.0 - spec.beta) / (spec.beta - 1.0);
            }
            return value;
        }
        case NonlinearityKind::Custom:
            return custom_tail_primitive(*spec.custom, s);
    }
    return 0.0;
}

double one_sided_lipschitz(const NonlinearitySpec& spec, double M) {
    if (!(M > 0.0)) throw DomainError("one_sided_lipschitz requires M > 0");
    switch (spec.kind) {
        case NonlinearityKind::PurePower:
        case NonlinearityKind::DoublePower:
            return 0.0;
        case NonlinearityKind::PowerPlusPolynomial: {
            // The singular part is decreasing and contributes nothing.
            const auto d = poly_derivative(spec.poly_coeffs);
            if (d.empty()) return 0.0;
            return std::max(0.0, poly_max(d, 0.0, M));
        }
        case NonlinearityKind::Custom:
            return custom_lipschitz(*spec.custom, M);
    }
    return 0.0;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw DomainError("geometric_grid needs 0 < lo < hi and count >= 2");
    }
    std::vector<double> grid(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = lo * std::exp(step * static_cast<double>(k));
    }
    grid.back() = hi;
    return grid;
}

ConditionFlags classify(const NonlinearitySpec& spec, std::span<const double> probe_grid,
                        std::span<const double> lipschitz_levels) {
    for (double t : probe_grid) {
        if (!(t > 0.0)) throw DomainError("probe grid must be positive");
    }
    ConditionFlags flags;
    for (double M : lipschitz_levels) {
        flags.lipschitz.emplace_back(M, one_sided_lipschitz(spec, M));
    }
    bool lipschitz_finite = true;
    for (const auto& [M, C] : flags.lipschitz) lipschitz_finite &= std::isfinite(C);

    if (spec.kind != NonlinearityKind::Custom) {
        flags.satisfies_F = Tristate::True;
        flags.near_zero_superlinear = Tristate::True;
        if (!has_regular_part(spec)) {
            flags.positive = Tristate::True;
            flags.global_singular_lower = Tristate::True;
            flags.tail_nonincreasing = Tristate::True;
            flags.globally_nonincreasing = Tristate::True;
        } else {
            // Closed-form f' on a wide geometric grid, plus the sign of the
            // leading coefficient of g' to settle the behaviour at infinity.
            std::vector<double> grid = geometric_grid(1e-6, 1e6, 2001);
            grid.insert(grid.end(), probe_grid.begin(), probe_grid.end());
            std::sort(grid.begin(), grid.end());
            const auto dg = poly_derivative(spec.poly_coeffs);
            const int ddeg = poly_degree(dg);
            const bool dg_eventually_nonpositive = ddeg < 0 || dg[static_cast<std::size_t>(ddeg)] < 0.0;
            const double gdeg_lead =
                spec.poly_coeffs[static_cast<std::size_t>(poly_degree(spec.poly_coeffs))];
            bool positive = true, lower = false, tail_dec = dg_eventually_nonpositive,
                 global_dec = dg_eventually_nonpositive;
            double lower_inf = std::numeric_limits<double>::infinity();
            for (double t : grid) {
                positive &= eval(spec, t) > 0.0;
                lower_inf = std::min(lower_inf, spec.c_sing + std::pow(t, spec.gamma) * regular_part(spec, t));
                const double fp = derivative(spec, t);
                if (fp > 0.0) {
                    global_dec = false;
                    if (t >= 1.0) tail_dec = false;
                }
            }
            // t^gamma g(t) -> -inf when the leading coefficient is negative.
            lower = lower_inf > 0.0 && gdeg_lead > 0.0;
            flags.positive = from_bool(positive && gdeg_lead > 0.0);
            flags.global_singular_lower = from_bool(lower);
            flags.tail_nonincreasing = from_bool(tail_dec);
            flags.globally_nonincreasing = from_bool(global_dec);
        }
        flags.tail_envelope = from_bool(integrable_at_infinity(spec));
    } else {
        const CustomModel& model = *spec.custom;
        flags.satisfies_F = lipschitz_finite ? Tristate::True : Tristate::Unknown;
        bool finite = true, positive = true, lower = true, dec = true, tail_dec = true,
             tail_env = true;
        std::size_t tail_samples = 0;
        std::vector<double> grid(probe_grid.begin(), probe_grid.end());
        std::sort(grid.begin(), grid.end());
        double prev = std::numeric_limits<double>::quiet_NaN();
        const std::size_t low_count = std::max<std::size_t>(3, grid.size() / 4);
        bool near_zero = true;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double t = grid[k];
            const double f = model.eval(t);
            if (!std::isfinite(f)) {
                finite = false;
                continue;
            }
            positive &= f > 0.0;
            if (k < low_count) near_zero &= f > 0.0;
            lower &= f > model.singular(t);
            if (k > 0 && f > prev) {
                dec = false;
                if (grid[k - 1] > model.tail.start) tail_dec = false;
            }
            if (t > model.tail.start) {
                ++tail_samples;
                tail_env &= f <= model.tail.envelope(t);
            }
            prev = f;
        }
        const Tristate unknown_if_nonfinite = finite ? Tristate::True : Tristate::Unknown;
        auto sampled = [&](bool ok) { return ok ? unknown_if_nonfinite : Tristate::False; };
        flags.positive = sampled(positive);
        flags.near_zero_superlinear = grid.size() < 3 ? Tristate::Unknown : sampled(near_zero);
        flags.global_singular_lower = sampled(lower);
        flags.globally_nonincreasing = sampled(dec);
        if (tail_samples < 2) {
            flags.tail_nonincreasing = Tristate::Unknown;
            flags.tail_envelope = Tristate::Unknown;
        } else {
            flags.tail_nonincreasing = sampled(tail_dec);
            flags.tail_envelope = sampled(tail_env && model.tail.envelope.exponent > 1.0);
        }
    }
    flags.tail_bound = all_of({flags.tail_nonincreasing, flags.tail_envelope});
    // Global monotonicity implies the tail part.
    if (flags.globally_nonincreasing == Tristate::True) {
        flags.tail_nonincreasing = Tristate::True;
        flags.tail_bound = all_of({flags.tail_nonincreasing, flags.tail_envelope});
    }
    return flags;
}

}  // namespace singlab
