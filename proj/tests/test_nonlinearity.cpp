#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "singlab/errors.hpp"
#include "singlab/nonlinearity.hpp"

using namespace singlab;

namespace {

const std::vector<double>& probe() {
    static const std::vector<double> grid = geometric_grid(1e-4, 1e4, 161);
    return grid;
}

std::vector<NonlinearitySpec> integrable_specs() {
    return {NonlinearitySpec::pure_power(3.0), NonlinearitySpec::pure_power(1.5, 2.0),
            NonlinearitySpec::pure_power(5.0, 0.5), NonlinearitySpec::double_power(3.0, 1.0, 2.0, 1.0)};
}

}  // namespace

TEST(Eval, Examples) {
    EXPECT_DOUBLE_EQ(eval(NonlinearitySpec::pure_power(3.0), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(eval(NonlinearitySpec::pure_power(3.0), 0.5), 8.0);
    EXPECT_DOUBLE_EQ(eval(NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {1.0}), 2.0), 1.125);
}

TEST(Eval, NonPositiveArgumentThrows) {
    const auto spec = NonlinearitySpec::pure_power(3.0);
    EXPECT_THROW(eval(spec, 0.0), DomainError);
    EXPECT_THROW(eval(spec, -1.0), DomainError);
}

TEST(Validate, RejectsInadmissibleParameters) {
    EXPECT_THROW(NonlinearitySpec::pure_power(-0.5).validate(), DomainError);
    EXPECT_THROW(NonlinearitySpec::pure_power(3.0, -1.0).validate(), DomainError);
}

TEST(TailPrimitive, Examples) {
    EXPECT_NEAR(tail_primitive(NonlinearitySpec::pure_power(3.0), 1.0), 0.5, 1e-15);
    EXPECT_NEAR(tail_primitive(NonlinearitySpec::pure_power(3.0), 2.0), 0.125, 1e-15);
    EXPECT_NEAR(tail_primitive(NonlinearitySpec::double_power(3.0, 1.0, 2.0, 1.0), 1.0), 1.5, 1e-14);
}

TEST(TailPrimitive, NonIntegrableTailThrows) {
    const auto spec = NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {1.0});
    EXPECT_FALSE(integrable_at_infinity(spec));
    EXPECT_THROW(tail_primitive(spec, 1.0), IntegrabilityError);
}

TEST(TailPrimitive, DerivativeIsMinusF) {
    for (const auto& spec : integrable_specs()) {
        for (int k = 0; k < 20; ++k) {
            const double s = 0.1 * std::pow(100.0, k / 19.0);
            const double h = 1e-5 * s;
            const double dF = (tail_primitive(spec, s + h) - tail_primitive(spec, s - h)) / (2 * h);
            EXPECT_NEAR(dF / -eval(spec, s), 1.0, 1e-6) << s;
        }
    }
}

TEST(TailPrimitive, PositiveAndStrictlyDecreasing) {
    for (const auto& spec : integrable_specs()) {
        double previous = INFINITY;
        for (double s : geometric_grid(1e-2, 1e3, 60)) {
            const double F = tail_primitive(spec, s);
            EXPECT_GT(F, 0.0);
            EXPECT_LT(F, previous);
            previous = F;
        }
    }
}

TEST(PurePower, MatchesClosedForms) {
    for (double gamma : {1.5, 2.0, 3.0, 5.0}) {
        const double c = 1.7;
        const auto spec = NonlinearitySpec::pure_power(gamma, c);
        for (double s : {0.01, 0.3, 1.0, 7.0, 250.0}) {
            const double f = c / std::pow(s, gamma);
            const double F = c * std::pow(s, 1.0 - gamma) / (gamma - 1.0);
            EXPECT_NEAR(eval(spec, s) / f, 1.0, 1e-12);
            EXPECT_NEAR(tail_primitive(spec, s) / F, 1.0, 1e-12);
        }
    }
}

TEST(CustomModel, TailPrimitiveMatchesCatalogTwin) {
    CustomModel model;
    model.eval = [](double t) { return 3.0 * std::pow(t, -2.5); };
    model.singular = {3.0, 2.5};
    model.tail = {{3.0, 2.5}, 1.0};
    const auto custom = NonlinearitySpec::make_custom(model);
    const auto twin = NonlinearitySpec::pure_power(2.5, 3.0);
    for (double s : {0.05, 0.5, 1.0, 4.0, 30.0}) {
        EXPECT_NEAR(tail_primitive(custom, s) / tail_primitive(twin, s), 1.0, 1e-8) << s;
    }
}

TEST(OneSidedLipschitz, Examples) {
    EXPECT_EQ(one_sided_lipschitz(NonlinearitySpec::pure_power(3.0), 10.0), 0.0);
    EXPECT_NEAR(one_sided_lipschitz(NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {0, 0, 1}), 2.0),
                4.0, 1e-12);
    EXPECT_EQ(one_sided_lipschitz(NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {1.0}), 5.0), 0.0);
}

TEST(OneSidedLipschitz, NondecreasingInM) {
    const std::vector<NonlinearitySpec> specs{
        NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {0.0, -1.0, 0.5, 0.2}),
        NonlinearitySpec::power_plus_polynomial(2.0, 1.0, {0.0, 0.0, 1.0})};
    for (const auto& spec : specs) {
        double previous = 0.0;
        for (double M : geometric_grid(0.1, 50.0, 30)) {
            const double C = one_sided_lipschitz(spec, M);
            EXPECT_GE(C, previous);
            previous = C;
        }
    }
}

TEST(OneSidedLipschitz, CustomEstimateBoundsDifferenceQuotients) {
    CustomModel model;
    model.eval = [](double t) { return std::pow(t, -3.0) + t * t; };
    model.singular = {1.0, 3.0};
    model.tail = {{1.0, -2.0}, 1.0};
    const auto spec = NonlinearitySpec::make_custom(model);
    // sup of f' = 2t - 3 t^-4 on (0, 2] is attained at t = 2.
    EXPECT_NEAR(one_sided_lipschitz(spec, 2.0), 3.8125, 0.02 * 3.8125);
}

TEST(Classify, PurePowerAllTrue) {
    const auto flags = classify(NonlinearitySpec::pure_power(3.0), probe());
    EXPECT_EQ(flags.positive, Tristate::True);
    EXPECT_EQ(flags.satisfies_F, Tristate::True);
    EXPECT_EQ(flags.near_zero_superlinear, Tristate::True);
    EXPECT_EQ(flags.global_singular_lower, Tristate::True);
    EXPECT_EQ(flags.tail_nonincreasing, Tristate::True);
    EXPECT_EQ(flags.tail_envelope, Tristate::True);
    EXPECT_EQ(flags.tail_bound, Tristate::True);
    EXPECT_EQ(flags.globally_nonincreasing, Tristate::True);
}

TEST(Classify, PowerPlusConstantHasNoTailBound) {
    const auto flags = classify(NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {1.0}), probe());
    EXPECT_EQ(flags.near_zero_superlinear, Tristate::True);
    EXPECT_EQ(flags.tail_bound, Tristate::False);
}

TEST(Classify, DoublePowerExample) {
    const auto flags = classify(NonlinearitySpec::double_power(3.0, 1.0, 2.0, 1.0), probe());
    EXPECT_EQ(flags.global_singular_lower, Tristate::True);
    EXPECT_EQ(flags.tail_bound, Tristate::True);
}

TEST(Classify, ReportsRequestedLipschitzLevels) {
    const std::vector<double> levels{1.0, 2.0};
    const auto flags =
        classify(NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {0, 0, 1}), probe(), levels);
    ASSERT_EQ(flags.lipschitz.size(), 2u);
    EXPECT_NEAR(flags.lipschitz[1].second, 4.0, 1e-12);
}

TEST(Kind, StringRoundTrip) {
    for (auto kind : {NonlinearityKind::PurePower, NonlinearityKind::PowerPlusPolynomial,
                      NonlinearityKind::DoublePower, NonlinearityKind::Custom}) {
        EXPECT_EQ(nonlinearity_kind_from_string(to_string(kind)), kind);
    }
}
