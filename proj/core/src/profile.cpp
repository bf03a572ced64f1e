#include "singlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "singlab/errors.hpp"
#include "singlab/io.hpp"
#include "singlab/quadrature.hpp"

namespace singlab {
namespace {

constexpr double kPhiTolerance = 1e-10;
constexpr double kRootRelTol = 1e-12;
constexpr double kAsymptoticPhi = 1e-8;
constexpr int kMaxDoublings = 200;
constexpr int kMaxNewton = 200;

bool singular_primitive(const NonlinearitySpec& spec) {
    // F(0+) = +inf exactly when the singularity is not integrable at 0.
    return singular_envelope(spec).exponent >= 1.0;
}

double integrand(double s, const ProfileParams& p) {
    if (s <= 0.0) {
        if (singular_primitive(p.spec)) return 0.0;
        s = std::numeric_limits<double>::min();
    }
    const double F = tail_primitive(p.spec, s);
    return 1.0 / std::sqrt(p.M + F);
}

double panel(double lo, double hi, const ProfileParams& p, const SimpsonOptions& options) {
    if (lo == 0.0 && singular_primitive(p.spec)) {
        // The integrand grows like s^((g-1)/2) from 0; with s = hi w^k and
        // k = 4/(g+1) the transformed integrand is linear in w near 0.
        const double k = 4.0 / (singular_envelope(p.spec).exponent + 1.0);
        auto fn = [&p, hi, k](double w) {
            if (w <= 0.0) return 0.0;
            return integrand(hi * std::pow(w, k), p) * k * hi * std::pow(w, k - 1.0);
        };
        return adaptive_simpson(fn, 0.0, 1.0, options);
    }
    auto fn = [&p](double s) { return integrand(s, p); };
    return adaptive_simpson(fn, lo, hi, options);
}

double integrate(double a, double b, const ProfileParams& p) {
    if (a == b) return 0.0;
    const double split = tail_model(p.spec).start;
    SimpsonOptions options;
    options.abs_tol = kPhiTolerance;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    double value;
    if (split > lo && split < hi) {
        options.abs_tol *= 0.5;
        value = panel(lo, split, p, options) + panel(split, hi, p, options);
    } else {
        value = panel(lo, hi, p, options);
    }
    return b >= a ? value : -value;
}

// Leading-order behaviour of v near t = 0.
double small_t_value(double t, const ProfileParams& p) {
    if (singular_primitive(p.spec) && singular_envelope(p.spec).exponent > 1.0) {
        return profile_asymptote(p.spec, t);
    }
    // F(0+) finite: v'(0) = sqrt(2 (M + F(0+))).
    return t * std::sqrt(2.0 * (p.M + tail_primitive(p.spec, std::numeric_limits<double>::min())));
}

}  // namespace

void ProfileParams::validate() const {
    spec.validate();
    if (!(M >= 0.0) || !std::isfinite(M)) {
        throw DomainError("profile parameter M must be finite and >= 0");
    }
    if (!integrable_at_infinity(spec)) {
        throw IntegrabilityError("profiles require f integrable at infinity");
    }
}

double pure_constant(double gamma) {
    if (!(gamma > 1.0)) throw DomainError("pure solution requires gamma > 1");
    return std::pow(gamma + 1.0, 2.0 / (gamma + 1.0)) / std::pow(2.0 * gamma - 2.0, 1.0 / (gamma + 1.0));
}

double pure_exact(double gamma, double x) {
    if (!(x >= 0.0)) throw DomainError("pure solution requires x >= 0");
    return pure_constant(gamma) * std::pow(x, 2.0 / (gamma + 1.0));
}

double profile_asymptote(const NonlinearitySpec& spec, double t) {
    const PowerEnvelope env = singular_envelope(spec);
    // -v'' = c v^-g is solved by c^(1/(g+1)) times the c = 1 solution.
    return std::pow(env.coeff, 1.0 / (env.exponent + 1.0)) * pure_exact(env.exponent, t);
}

double phi(double v, const ProfileParams& params) {
    if (!(v >= 0.0)) throw DomainError("phi requires v >= 0");
    return integrate(0.0, v, params);
}

double profile_value(double t, const ProfileParams& params) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("profile_value requires t >= 0");
    if (t == 0.0) return 0.0;
    const double target = std::sqrt(2.0) * t;
    if (target < kAsymptoticPhi) return small_t_value(t, params);

    double lo = 0.0;
    double hi = std::max(small_t_value(t, params), std::numeric_limits<double>::min());
    double phi_hi = phi(hi, params);
    int doublings = 0;
    while (phi_hi < target) {
        if (++doublings > kMaxDoublings || !std::isfinite(hi)) {
            std::ostringstream os;
            os << "profile_value: bracket expansion exceeded bound at t = " << t;
            throw RootFindError(os.str());
        }
        lo = hi;
        phi_hi += integrate(hi, 2.0 * hi, params);
        hi *= 2.0;
    }

    // Safeguarded Newton on Phi(v) - target with Phi'(v) = 1/sqrt(M + F(v)),
    // carrying Phi incrementally from the current iterate.
    double v = hi;
    double phi_v = phi_hi;
    for (int it = 0; it < kMaxNewton; ++it) {
        const double g = phi_v - target;
        if (g == 0.0) return v;
        if (g > 0.0) {
            hi = v;
        } else {
            lo = v;
        }
        const double slope = integrand(v, params);
        double next = v - g / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - v;
        phi_v += integrate(v, next, params);
        v = next;
        if (std::abs(step) <= kRootRelTol * v || hi - lo <= kRootRelTol * v) return v;
    }
    std::ostringstream os;
    os << "profile_value: Newton iteration did not converge at t = " << t;
    throw RootFindError(os.str());
}

double profile_derivative(double t, const ProfileParams& params) {
    if (!(t > 0.0)) throw DomainError("profile_derivative requires t > 0");
    const double v = profile_value(t, params);
    return std::sqrt(2.0 * (params.M + tail_primitive(params.spec, v)));
}

ProfileTable::ProfileTable(ProfileParams params, std::vector<double> t, std::vector<double> v,
                           std::vector<double> v_prime)
    : params_(std::move(params)), t_(std::move(t)), v_(std::move(v)), v_prime_(std::move(v_prime)) {
    if (t_.size() != v_.size() || t_.size() != v_prime_.size()) {
        throw DomainError("profile table columns differ in length");
    }
    if (t_.empty()) throw DomainError("profile table is empty");
    for (std::size_t k = 1; k < t_.size(); ++k) {
        if (!(t_[k] > t_[k - 1])) throw DomainError("profile table t grid must be increasing");
    }
    if (t_.size() >= 2) {
        // v'(0+) is infinite for singular f; the limiter caps it anyway.
        std::vector<double> slopes = v_prime_;
        for (std::size_t k = 0; k < slopes.size(); ++k) {
            if (!std::isfinite(slopes[k])) {
                const std::size_t j = k + 1 < slopes.size() ? k : k - 1;
                slopes[k] = 3.0 * (v_[j + 1] - v_[j]) / (t_[j + 1] - t_[j]);
            }
        }
        interp_ = MonotoneCubic(t_, v_, slopes);
    }
}

double ProfileTable::value_at(double t) const {
    if (t_.size() < 2) throw DomainError("interpolation needs at least two nodes");
    return interp_(t);
}

double ProfileTable::derivative_at(double t) const {
    if (t_.size() < 2) throw DomainError("interpolation needs at least two nodes");
    return interp_.derivative(t);
}

double ProfileTable::first_integral_drift() const {
    double drift = 0.0;
    for (std::size_t k = 0; k < t_.size(); ++k) {
        if (t_[k] <= 0.0) continue;
        const double I = 0.5 * v_prime_[k] * v_prime_[k] - tail_primitive(params_.spec, v_[k]);
        drift = std::max(drift, std::abs(I - params_.M));
    }
    return drift;
}

void ProfileTable::write_csv(std::ostream& out) const {
    out << "t,v,v_prime\n";
    for (std::size_t k = 0; k < t_.size(); ++k) {
        out << format_real(t_[k]) << ',' << format_real(v_[k]) << ',' << format_real(v_prime_[k])
            << '\n';
    }
}

ProfileTable tabulate(const ProfileParams& params, std::span<const double> t_grid) {
    params.validate();
    if (t_grid.empty() || t_grid.front() < 0.0) {
        throw DomainError("tabulate needs a nonempty grid starting at t >= 0");
    }
    std::vector<double> t(t_grid.begin(), t_grid.end());
    std::vector<double> v(t.size()), vp(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (k > 0 && !(t[k] > t[k - 1])) throw DomainError("tabulate grid must be increasing");
        v[k] = profile_value(t[k], params);
        vp[k] = t[k] > 0.0 ? std::sqrt(2.0 * (params.M + tail_primitive(params.spec, v[k])))
                           : std::numeric_limits<double>::infinity();
        if (t[k] == 0.0 && !singular_primitive(params.spec)) {
            vp[k] = small_t_value(1.0, params);
        }
    }
    return ProfileTable(params, std::move(t), std::move(v), std::move(vp));
}

std::vector<double> uniform_grid(double t_max, std::size_t count) {
    if (!(t_max > 0.0) || count < 2) throw DomainError("uniform_grid needs t_max > 0, count >= 2");
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = t_max * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    return grid;
}

ProfileTable scaled_family(double lambda, const ProfileTable& base) {
    if (!(lambda > 0.0)) throw DomainError("scaled_family requires lambda > 0");
    const ProfileParams& p = base.params();
    if (p.spec.kind != NonlinearityKind::PurePower) {
        throw DomainError("scaled_family is only defined for PurePower nonlinearities");
    }
    const double gamma = p.spec.gamma;
    const double value_scale = std::pow(lambda, -2.0 / (gamma + 1.0));
    const double slope_scale = std::pow(lambda, (gamma - 1.0) / (gamma + 1.0));
    std::vector<double> t(base.size()), v(base.size()), vp(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        t[k] = base.t()[k] / lambda;
        v[k] = value_scale * base.v()[k];
        vp[k] = slope_scale * base.v_prime()[k];
    }
    ProfileParams scaled = p;
    scaled.M = std::pow(lambda, 2.0 * (gamma - 1.0) / (gamma + 1.0)) * p.M;
    return ProfileTable(std::move(scaled), std::move(t), std::move(v), std::move(vp));
}

double ode_residual(const ProfileTable& table, std::optional<Window> window) {
    const auto& t = table.t();
    const auto& v = table.v();
    const Window w = window.value_or(Window{t.front(), t.back()});
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
        if (t[k - 1] < w.lo || t[k + 1] > w.hi || !(v[k] > 0.0)) continue;
        const double hm = t[k] - t[k - 1];
        const double hp = t[k + 1] - t[k];
        if (std::abs(hm - hp) > 1e-9 * std::max(hm, hp)) continue;
        const double h = 0.5 * (hm + hp);
        const double second = (-v[k - 1] + 2.0 * v[k] - v[k + 1]) / (h * h);
        worst = std::max(worst, std::abs(second - eval(table.params().spec, v[k])));
        ++used;
    }
    if (used == 0) {
        throw DomainError("ode_residual needs three uniformly spaced nodes inside the window");
    }
    return worst;
}

}  // namespace singlab
