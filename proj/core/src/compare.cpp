#include "singlab/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "singlab/errors.hpp"
#include "singlab/io.hpp"
#include "singlab/profile.hpp"

namespace singlab {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Number of eigenvalues below x of the symmetric tridiagonal matrix with
// constant diagonal d and off-diagonal e.
int sturm_count(double d, double e, int n, double x) {
    int count = 0;
    double q = d - x;
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            if (q == 0.0) q = std::numeric_limits<double>::epsilon() * std::abs(e);
            q = d - x - e * e / q;
        }
        if (q < 0.0) ++count;
    }
    return count;
}

struct ResidualRange {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
};

ResidualRange scaled_residual_range(const Field& field, const NonlinearitySpec& spec) {
    std::vector<double> residual;
    try {
        residual = interior_residual(field, spec);
    } catch (const PositivityError& e) {
        throw PreconditionError(std::string("comparison field is not positive: ") + e.what());
    }
    ResidualRange out;
    for (int j = 0; j <= field.ny(); ++j) {
        for (int i = 0; i < field.nx(); ++i) {
            if (!field.is_interior(i, j)) continue;
            const std::size_t k = field.index(i, j);
            const double scaled = residual[k] / (1.0 + std::abs(eval(spec, field.values()[k])));
            out.min = std::min(out.min, scaled);
            out.max = std::max(out.max, scaled);
        }
    }
    return out;
}

}  // namespace

double lambda_star(double C_M) {
    if (!(C_M >= 0.0)) throw DomainError("C_M must be non-negative");
    return kPi / std::sqrt(4.0 + 2.0 * C_M);
}

double poincare_eigenvalue(double lambda, int n) {
    if (!(lambda > 0.0)) throw DomainError("interval length must be positive");
    if (n < 3) throw DomainError("at least three interior nodes are required");
    const double h = lambda / (n + 1);
    const double d = 2.0 / (h * h);
    const double e = -1.0 / (h * h);
    double lo = 0.0;
    double hi = 4.0 / (h * h);
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, n, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CheckReport discrete_comparison_test(const Field& u_sub, const Field& v_super,
                                     const NonlinearitySpec& spec, double lambda,
                                     double sign_tolerance) {
    if (u_sub.nx() != v_super.nx() || u_sub.ny() != v_super.ny() ||
        u_sub.mesh().periodic != v_super.mesh().periodic) {
        throw PreconditionError("sub- and supersolution live on different meshes");
    }
    const ResidualRange sub = scaled_residual_range(u_sub, spec);
    const ResidualRange super = scaled_residual_range(v_super, spec);
    if (sub.max > sign_tolerance) {
        std::ostringstream os;
        os << "subsolution residual reaches " << sub.max << " > " << sign_tolerance;
        throw PreconditionError(os.str());
    }
    if (super.min < -sign_tolerance) {
        std::ostringstream os;
        os << "supersolution residual reaches " << super.min << " < " << -sign_tolerance;
        throw PreconditionError(os.str());
    }
    const int ny = u_sub.ny();
    for (int i = 0; i < u_sub.nx(); ++i) {
        if (u_sub(i, ny) > v_super(i, ny)) throw PreconditionError("top data are not ordered");
        if (!(v_super(i, 0) > 0.0)) throw PreconditionError("supersolution is not positive on the bottom row");
    }

    const double u_max = *std::max_element(u_sub.values().begin(), u_sub.values().end());
    const double C_M = one_sided_lipschitz(spec, u_max);
    const double threshold = lambda_star(C_M);
    const bool unconditional = C_M == 0.0;
    const bool asserted = unconditional || lambda <= threshold;

    double max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < u_sub.values().size(); ++k) {
        max_violation = std::max(max_violation, u_sub.values()[k] - v_super.values()[k]);
    }
    const bool held = max_violation <= 0.0;

    CheckReport report;
    report.name = "comparison";
    report.passed = !asserted || held;
    report.metric("lambda", lambda)
        .metric("C_M", C_M)
        .metric("lambda_star", threshold)
        .metric("held", held ? 1.0 : 0.0)
        .metric("asserted", asserted ? 1.0 : 0.0)
        .metric("max_violation", max_violation)
        .metric("sub_residual_max", sub.max)
        .metric("super_residual_min", super.min);
    if (unconditional) {
        report.note("regime", "monotone f: unconditional");
    } else {
        report.note("regime", asserted ? "narrow strip" : "beyond lambda_star: reported only");
    }
    return report;
}

CheckReport upper_barrier_residual(double mu, double gamma, const NonlinearitySpec& spec,
                                   std::span<const double> xn, double rho) {
    if (!(mu > 0.0)) throw DomainError("mu must be positive");
    if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
    if (xn.size() < 3) throw DomainError("at least three nodes are required");
    const double envelope = singular_envelope(spec).coeff;
    const bool condition = std::pow(mu, gamma + 1.0) >= envelope;
    const double K = pure_constant(gamma);
    const double a = 2.0 / (gamma + 1.0);

    double min_margin = std::numeric_limits<double>::infinity();
    double worst_x = 0.0;
    std::size_t rows = 0;
    std::size_t violations = 0;
    for (std::size_t j = 1; j + 1 < xn.size(); ++j) {
        const double x = xn[j];
        if (!(x > 0.0)) continue;
        const double v = mu * K * std::pow(x, a);
        if (!(v < rho)) continue;
        const double hm = x - xn[j - 1];
        const double hp = xn[j + 1] - x;
        const double vm = mu * pure_exact(gamma, xn[j - 1]);
        const double vp = mu * pure_exact(gamma, xn[j + 1]);
        const double lap = 2.0 * ((vm / hm + vp / hp) / (hm + hp) - v / (hm * hp));
        const double exact_second = mu * K * a * (a - 1.0) * std::pow(x, a - 2.0);
        const double fv = eval(spec, v);
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(fv) + 4.0 * (std::abs(vm) + std::abs(v) + std::abs(vp)) / (hm * hp));
        const double budget = 10.0 * std::abs(lap - exact_second) + floor;
        const double margin = -lap - fv + budget;
        ++rows;
        if (margin < min_margin) {
            min_margin = margin;
            worst_x = x;
        }
        if (margin < 0.0) ++violations;
    }
    CheckReport report;
    report.name = "upper_barrier";
    report.passed = condition && rows > 0 && violations == 0;
    report.metric("mu", mu)
        .metric("gamma", gamma)
        .metric("mu_power", std::pow(mu, gamma + 1.0))
        .metric("envelope_coefficient", envelope)
        .metric("rows_checked", static_cast<double>(rows))
        .metric("violations", static_cast<double>(violations))
        .metric("min_margin", rows ? min_margin : 0.0)
        .metric("min_margin_xn", worst_x);
    if (!condition) report.note("condition", "mu^(gamma+1) is below the envelope coefficient");
    if (rows == 0) report.note("rows", "no rows below rho");
    return report;
}

void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
    out << "lambda,C_M,lambda_star,held\n";
    for (const ComparisonRow& r : rows) {
        out << format_real(r.lambda) << ',' << format_real(r.C_M) << ',' << format_real(r.lambda_star)
            << ',' << (r.held ? "true" : "false") << '\n';
    }
}

}  // namespace singlab
