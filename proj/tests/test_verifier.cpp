#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "singlab/errors.hpp"
#include "singlab/verifier.hpp"

using namespace singlab;

namespace {

Field sample(int nx, int ny, double q, double lambda, const std::function<double(double, double)>& u) {
    StripDomain d;
    d.L = 1.0;
    d.lambda = lambda;
    d.nx = nx;
    d.ny = ny;
    d.q = q;
    Field field(d, build_mesh(d));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) field(i, j) = u(field.mesh().x1[i], field.mesh().xn[j]);
    }
    return field;
}

Field pure3(int ny = 128) {
    return sample(4, ny, 2.0, 1.0, [](double, double x) { return oracle::pure_gamma3(x); });
}

Field solved_gamma3(double M) {
    StripDomain d;
    d.nx = 4;
    d.ny = 64;
    d.q = 2.0;
    BoundaryData bc;
    bc.top = [M](double) { return oracle::gamma3_profile(1.0, M); };
    return newton_solve(d, NonlinearitySpec::pure_power(3.0), bc, SolverConfig{}).field;
}

}  // namespace

TEST(CheckReport, JsonRoundTripKeepsOrderAndSpecialValues) {
    CheckReport a;
    a.name = "demo";
    a.passed = true;
    a.metric("z", 1.5).metric("a", INFINITY).metric("m", 0.1).note("where", "x1=0");
    CheckReport b;
    b.name = "other";
    b.metric("nan", NAN);
    const std::vector<CheckReport> reports{a, b};
    const std::string text = reports_to_json(reports);
    const auto back = reports_from_json(text);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].metrics[0].first, "z");
    EXPECT_TRUE(std::isinf(back[0].metric("a")));
    EXPECT_EQ(back[0].metric("m"), 0.1);
    EXPECT_EQ(back[0].note("where"), "x1=0");
    EXPECT_TRUE(std::isnan(back[1].metric("nan")));
    EXPECT_EQ(reports_to_json(back), text);
    EXPECT_THROW(a.metric("missing"), std::out_of_range);
}

TEST(DirectionVector, UnitNormAndBounds) {
    const auto n = DirectionVector::normal();
    EXPECT_EQ(n.horizontal(), 0.0);
    EXPECT_EQ(n.vertical(), 1.0);
    EXPECT_EQ(DirectionVector::from_degrees(90).vertical(), 1.0);
    const auto d = DirectionVector::from_degrees(45);
    EXPECT_NEAR(d.horizontal() * d.horizontal() + d.vertical() * d.vertical(), 1.0, 1e-15);
    EXPECT_THROW(DirectionVector(0.0), DomainError);
    EXPECT_THROW(DirectionVector::from_degrees(179.0, 0.1), DomainError);
}

TEST(MonotoneXn, PureFieldPasses) {
    const auto r = check_monotone_xn(pure3());
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.metric("min_difference"), 0.0);
}

TEST(MonotoneXn, ConstantFieldFails) {
    const auto r = check_monotone_xn(sample(4, 16, 1.0, 1.0, [](double, double) { return 1.0; }));
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.metric("min_difference"), 0.0);
}

TEST(MonotoneXn, IgnoresTopTenPercent) {
    auto f = sample(4, 20, 1.0, 1.0, [](double, double x) { return x < 0.95 ? 1.0 + x : 1.9 - x; });
    EXPECT_TRUE(check_monotone_xn(f).passed);
    EXPECT_FALSE(check_monotone_xn(f, 1.0).passed);
}

TEST(MovingPlane, MonotoneAndPureFieldsPass) {
    const auto f = pure3();
    EXPECT_TRUE(moving_plane_check(f, default_plane_levels(1.0)).passed);
    const auto g = sample(8, 40, 1.0, 1.0, [](double x, double y) { return y * (2 - y) * (1.5 + std::sin(6.28 * x)); });
    EXPECT_TRUE(moving_plane_check(g, default_plane_levels(1.0)).passed);
}

TEST(MovingPlane, BumpFieldFailsAboveTheBump) {
    const auto bump = sample(4, 64, 1.0, 1.0, [](double, double x) { return std::exp(-(x - 0.5) * (x - 0.5)); });
    const std::vector<double> below{0.2, 0.4};
    EXPECT_TRUE(moving_plane_check(bump, below).passed);
    const std::vector<double> above{0.7};
    const auto r = moving_plane_check(bump, above);
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.metric("failed_levels"), 1.0);
}

TEST(MovingPlane, MonotonePassImpliesPlanePass) {
    const std::vector<std::function<double(double, double)>> fields{
        [](double, double x) { return oracle::pure_gamma2(x); },
        [](double, double x) { return std::log1p(5 * x); },
        [](double x1, double x) { return std::sqrt(x) * (1.2 + 0.3 * std::cos(6.28 * x1)); }};
    for (const auto& u : fields) {
        const auto f = sample(8, 64, 2.0, 1.0, u);
        if (check_monotone_xn(f, 1.0).passed) {
            EXPECT_TRUE(moving_plane_check(f, default_plane_levels(1.0)).passed);
        }
    }
}

TEST(BoundaryExponent, ExactPowerLawToRoundOff) {
    for (double gamma : {2.0, 3.0, 5.0}) {
        const auto f = sample(4, 128, 2.0, 1.0, [gamma](double, double x) { return 1e-12 + pure_exact(gamma, x) - 1e-12; });
        const auto r = fit_boundary_exponent(f, NonlinearitySpec::pure_power(gamma), Window{0.01, 0.25});
        EXPECT_NEAR(r.metric("fitted_exponent"), 2.0 / (gamma + 1.0), 1e-10);
        EXPECT_TRUE(r.passed);
    }
}

TEST(BoundaryExponent, Gamma2Profile) {
    const ProfileParams p{NonlinearitySpec::pure_power(2.0), 0.0};
    const auto table = tabulate(p, uniform_grid(4.0, 401));
    const auto r = fit_boundary_exponent(table);
    EXPECT_NEAR(r.metric("fitted_exponent"), 2.0 / 3.0, 0.05);
    EXPECT_TRUE(r.passed);
}

TEST(BoundaryExponent, TooFewLayersThrows) {
    EXPECT_THROW(fit_boundary_exponent(pure3(16), NonlinearitySpec::pure_power(3.0), Window{0.3, 0.35}),
                 WindowError);
}

TEST(BoundaryExponent, ContaminatedWindowIsFlagged) {
    // Bottom row held at delta = 1e-3, as the regularised solver would leave it.
    const double delta = 1e-3;
    const auto f = sample(4, 256, 2.0, 1.0, [delta](double, double x) {
        return x == 0.0 ? delta : std::hypot(delta, oracle::pure_gamma3(x));
    });
    const double plateau = 10 * std::pow(delta, 2.0);
    const auto r = fit_boundary_exponent(f, NonlinearitySpec::pure_power(3.0), Window{0.5 * plateau, 0.25});
    EXPECT_FALSE(r.passed);
    EXPECT_NE(r.note("window").find("contaminated"), std::string::npos);
}

TEST(GradientExponent, PureFieldNormalAnd45Degrees) {
    const auto f = pure3();
    const auto spec = NonlinearitySpec::pure_power(3.0);
    const Window w{0.01, 0.25};
    const auto normal = fit_gradient_exponent(f, spec, DirectionVector::normal(), w);
    const auto diag = fit_gradient_exponent(f, spec, DirectionVector::from_degrees(45), w);
    EXPECT_NEAR(normal.metric("fitted_exponent"), -0.5, 0.05);
    EXPECT_NEAR(diag.metric("fitted_exponent"), normal.metric("fitted_exponent"), 1e-12);
    EXPECT_TRUE(normal.passed);
    EXPECT_TRUE(diag.passed);
    EXPECT_NEAR(normal.metric("c1"), 1.0 / std::sqrt(2.0), 0.05);
}

TEST(GradientExponent, Gamma2Profile) {
    const ProfileParams p{NonlinearitySpec::pure_power(2.0), 0.0};
    const auto table = tabulate(p, uniform_grid(4.0, 401));
    const auto r = fit_gradient_exponent(table, DirectionVector::normal());
    EXPECT_NEAR(r.metric("fitted_exponent"), -1.0 / 3.0, 0.05);
}

TEST(GradientExponent, DecreasingFieldThrowsSignError) {
    const auto f = sample(4, 64, 2.0, 1.0, [](double, double x) { return 2.0 - x; });
    EXPECT_THROW(fit_gradient_exponent(f, NonlinearitySpec::pure_power(3.0), DirectionVector::normal(),
                                       Window{0.01, 0.25}),
                 SignError);
}

TEST(LowerBounds, PureFieldGivesK3) {
    const auto r = check_lower_bounds(pure3(), NonlinearitySpec::pure_power(3.0));
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.metric("power_constant"), std::sqrt(2.0), 1e-12);
}

TEST(LowerBounds, MHalfProfileBothConstantsPositive) {
    const auto f = sample(4, 64, 2.0, 1.0, [](double, double x) { return oracle::gamma3_profile(x, 0.5); });
    const auto r = check_lower_bounds(f, NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {0.0}));
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.metric("power_constant"), 0.0);
    EXPECT_GT(r.metric("linear_constant"), 0.0);
}

TEST(LowerBounds, FieldTouchingZeroFails) {
    const auto f = sample(4, 32, 1.0, 1.0, [](double x1, double x) {
        return std::abs(x - 0.5) < 1e-9 && x1 == 0.0 ? 0.0 : oracle::pure_gamma3(x);
    });
    EXPECT_FALSE(check_lower_bounds(f, NonlinearitySpec::pure_power(3.0)).passed);
}

TEST(Rigidity, SolvedProfileFieldHasNoOscillation) {
    const auto f = solved_gamma3(0.5);
    const auto r = rigidity_deviation(f, {NonlinearitySpec::pure_power(3.0), 0.5});
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.metric("oscillation"), 1e-12);
    EXPECT_LE(r.metric("profile_deviation"), 5e-3);
}

TEST(Rigidity, LowerHalfOnly) {
    const auto f = sample(8, 32, 1.0, 1.0, [](double x1, double x) {
        return oracle::pure_gamma3(x) + 0.1 * x * x * x * std::sin(6.283185307179586 * x1);
    });
    RigidityOptions all;
    RigidityOptions lower;
    lower.lower_half_only = true;
    lower.tolerance = 0.03;
    all.tolerance = 0.03;
    EXPECT_FALSE(rigidity_deviation(f, {NonlinearitySpec::pure_power(3.0), 0.0}, all).passed);
    EXPECT_TRUE(rigidity_deviation(f, {NonlinearitySpec::pure_power(3.0), 0.0}, lower).passed);
}

TEST(EstimateM, ClosedFormProfiles) {
    const auto spec = NonlinearitySpec::pure_power(3.0);
    const auto table = tabulate({spec, 0.5}, uniform_grid(4.0, 401));
    EXPECT_NEAR(estimate_M(table), 0.5, 1e-6);
    const auto fine = sample(4, 256, 2.0, 1.0, [](double, double x) { return oracle::gamma3_profile(x, 0.5); });
    EXPECT_NEAR(estimate_M(fine, spec), 0.5, 1e-3);
    EXPECT_NEAR(estimate_M(pure3(), spec), 0.0, 1e-3);
}

TEST(EstimateM, ConstantFieldIsNegative) {
    const auto f = sample(4, 16, 1.0, 1.0, [](double, double) { return 2.0; });
    EXPECT_NEAR(estimate_M(f, NonlinearitySpec::pure_power(3.0)), -0.125, 1e-14);
}

TEST(EstimateM, ConsistentWithScaling) {
    const auto spec = NonlinearitySpec::pure_power(3.0);
    const auto base = tabulate({spec, 0.5}, uniform_grid(8.0, 801));
    for (double lambda : {0.5, 2.0, 4.0}) {
        const double expected = std::pow(lambda, 1.0) * 0.5;
        EXPECT_NEAR(estimate_M(scaled_family(lambda, base)) / expected, 1.0, 0.01);
    }
}

TEST(Checks, ArePure) {
    const auto f = solved_gamma3(0.5);
    const auto spec = NonlinearitySpec::pure_power(3.0);
    const std::vector<CheckReport> first{check_monotone_xn(f), moving_plane_check(f, default_plane_levels(1.0)),
                                         fit_boundary_exponent(f, spec), rescale_check(f, 0.5, spec)};
    const std::vector<CheckReport> second{check_monotone_xn(f), moving_plane_check(f, default_plane_levels(1.0)),
                                          fit_boundary_exponent(f, spec), rescale_check(f, 0.5, spec)};
    EXPECT_EQ(reports_to_json(first), reports_to_json(second));
}

TEST(Rescale, EpsilonOneReproducesTheOriginalResidual) {
    const auto f = solved_gamma3(0.0);
    const auto spec = NonlinearitySpec::pure_power(3.0);
    const auto r = rescale_check(f, 1.0, spec);
    const auto residual = interior_residual(f, spec);
    double worst = 0.0;
    for (int j = 1; j < f.ny(); ++j) {
        const double x = f.mesh().xn[j];
        if (x < 0.25 || x > 0.75) continue;
        for (int i = 0; i < f.nx(); ++i) {
            const double fv = eval(spec, f(i, j));
            worst = std::max(worst, std::abs(residual[f.index(i, j)]) / (1 + fv));
        }
    }
    EXPECT_NEAR(r.metric("max_scaled_residual"), worst, 1e-12);
    EXPECT_EQ(r.metric("g_coefficient"), 1.0);
}

TEST(Rescale, PureFieldIsScaleInvariant) {
    const auto r = rescale_check(pure3(256), 0.5, NonlinearitySpec::pure_power(3.0));
    EXPECT_TRUE(r.passed) << r.metric("max_scaled_residual");
}

TEST(Rescale, PerturbedFieldNeedsTheGTerm) {
    StripDomain d;
    d.nx = 16;
    d.ny = 96;
    d.q = 2.0;
    BoundaryData bc;
    bc.top = [](double x) { return 2.0 + 0.1 * std::sin(2 * oracle::kPi * x); };
    const auto with_g = NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {1.0});
    const auto f = newton_solve(d, with_g, bc, SolverConfig{}).field;
    const auto r = rescale_check(f, 0.25, with_g);
    EXPECT_NEAR(r.metric("g_coefficient"), 0.125, 1e-15);
    EXPECT_TRUE(r.passed) << r.metric("max_scaled_residual");
    const auto wrong = rescale_check(f, 0.25, NonlinearitySpec::pure_power(3.0));
    EXPECT_FALSE(wrong.passed) << wrong.metric("max_scaled_residual");
}

TEST(Rescale, RejectsBadEpsilon) {
    EXPECT_THROW(rescale_check(pure3(), 0.0, NonlinearitySpec::pure_power(3.0)), WindowError);
    EXPECT_THROW(rescale_check(pure3(), 1.5, NonlinearitySpec::pure_power(3.0)), WindowError);
}
