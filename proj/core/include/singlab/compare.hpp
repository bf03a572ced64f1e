#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "singlab/nonlinearity.hpp"
#include "singlab/strip.hpp"
#include "singlab/verifier.hpp"

namespace singlab {

/// Narrow-strip threshold pi (4 + 2 C_M)^(-1/2). Throws DomainError for C_M < 0.
double lambda_star(double C_M);

/// Smallest eigenvalue of the n x n Dirichlet second-difference matrix on
/// (0, lambda), found by Sturm-sequence bisection.
double poincare_eigenvalue(double lambda, int n);

/// Residual sign tolerance on the scaled residual |R| / (1 + |f(u)|).
inline constexpr double kResidualSignTolerance = 1e-6;

/// Checks u_sub <= v_super on a common mesh. The ordering is asserted when
/// lambda <= lambda_star(C_M) with C_M the one-sided Lipschitz constant of f
/// on [0, max u_sub], or unconditionally when C_M = 0; otherwise the outcome
/// is only reported. Throws PreconditionError when the residual signs, the top
/// ordering or the bottom positivity do not hold.
CheckReport discrete_comparison_test(const Field& u_sub, const Field& v_super,
                                     const NonlinearitySpec& spec, double lambda,
                                     double sign_tolerance = kResidualSignTolerance);

/// Checks that mu * pure_exact(gamma, x_N) is a discrete supersolution,
/// -Delta_h v - f(v) >= -budget, on the interior nodes of `xn` where v < rho.
/// The budget is ten times the exact truncation error of the three-point
/// stencil plus a round-off floor. The check fails when mu^(gamma+1) is below
/// the singular envelope coefficient of f.
CheckReport upper_barrier_residual(double mu, double gamma, const NonlinearitySpec& spec,
                                   std::span<const double> xn, double rho);

struct ComparisonRow {
    double lambda = 0.0;
    double C_M = 0.0;
    double lambda_star = 0.0;
    bool held = false;
};

/// lambda,C_M,lambda_star,held with 17 significant digits.
void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out);

}  // namespace singlab
