#include <cmath>
#include <random>
#include <string>
#include <utility>

#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "rangeeq/errors.hpp"
#include "rangeeq/premium.hpp"

using namespace rangeeq;

namespace {

struct BaseMarket {
    MarketParams params;
    EquilibriumCoefficients coef = solve_coefficients(params);
};

// sigma_X / sigma_eps near 2, where a 200-node Hermite rule is resolved.
MarketParams moderate_market() {
    MarketParams p;
    p.sigma_eps2 = 6.0;
    p.sigma_u2 = 2.0;
    p.sigma_y2 = 0.5;
    p.gamma = 1.0;
    p.x_I = 0.6;
    return p;
}

}  // namespace

TEST(Premium, BaselineIsMuMinusB0) {
    const BaseMarket m;
    EXPECT_NEAR(premium_baseline(m.coef, m.params.mu0), 153.92, 5e-3);
    EXPECT_NEAR(premium_baseline(m.coef, m.params.mu0), m.params.mu0 - m.coef.B0, 1e-12);
    EXPECT_NEAR(premium_baseline(m.coef, m.params.mu0),
                (1.0 - m.coef.tau) * m.params.mu0 - m.coef.beta, 1e-12);
}

TEST(Premium, AdaptiveMatchesOracle) {
    const BaseMarket m;
    for (const auto& c : oracle::kPremiumCases) {
        SCOPED_TRACE(::testing::Message() << "[" << c.lower << ", " << c.upper << "]");
        const TruncatedNormal k = make_kernel(m.params, {c.lower, c.upper});
        const PremiumReport r = premium_with_range(m.coef, k, m.params.mu0);
        EXPECT_NEAR(r.premium0, c.premium0, 1e-12 * c.premium0);
        EXPECT_NEAR(r.delta, c.delta, 1e-11);
        EXPECT_NEAR(r.premium1, c.premium1, 1e-11);
        EXPECT_EQ(r.standard_error, 0.0);
        EXPECT_FALSE(r.flagged);

        const PremiumSensitivities s = premium_sensitivities(m.coef, k);
        EXPECT_NEAR(s.d_dupper, c.d_dupper, 1e-12);
        EXPECT_NEAR(s.d_dlower, c.d_dlower, 1e-12);
        EXPECT_NEAR(s.d_dmidpoint, c.d_dmidpoint, 1e-12);
        EXPECT_NEAR(s.d_dmu0, c.d_dmu0, 1e-12);
    }
}

TEST(Premium, DisclosureFarAboveB0CutsThePremium) {
    const BaseMarket m;
    const TruncatedNormal k = make_kernel(m.params, {22, 28});
    const PremiumReport r = premium_with_range(m.coef, k, m.params.mu0);
    EXPECT_NEAR(r.premium1, 3.0, 0.01);
    EXPECT_NEAR(r.delta, -150.9, 0.05);
    EXPECT_EQ(r.sign_class, SignClass::Negative);
    EXPECT_EQ(classify_by_midpoint(k.range(), m.coef), MidpointClass::Reduces);
}

TEST(Premium, MidpointClassAgreesWithTheSign) {
    const BaseMarket m;
    const double b0 = m.coef.B0;
    const Range raises{b0 - 13, b0 - 7};
    const Range neutral{b0 - 3, b0 + 3};
    EXPECT_EQ(classify_by_midpoint(raises, m.coef), MidpointClass::Raises);
    EXPECT_EQ(classify_by_midpoint(neutral, m.coef), MidpointClass::Neutral);
    EXPECT_EQ(premium_with_range(m.coef, make_kernel(m.params, raises), m.params.mu0).sign_class,
              SignClass::Positive);
    EXPECT_EQ(premium_with_range(m.coef, make_kernel(m.params, neutral), m.params.mu0).sign_class,
              SignClass::Zero);
    EXPECT_STREQ(to_string(MidpointClass::Raises), "raises");
}

TEST(Premium, MonteCarloWithinThreeStandardErrors) {
    const BaseMarket m;
    for (const auto& c : oracle::kPremiumCases) {
        const TruncatedNormal k = make_kernel(m.params, {c.lower, c.upper});
        const PremiumReport r =
            premium_with_range(m.coef, k, m.params.mu0, QuadratureSpec::monte_carlo(1'000'000, 42));
        EXPECT_GT(r.standard_error, 0.0);
        EXPECT_LE(std::abs(r.delta - c.delta), std::max(1e-8, 3.0 * r.standard_error))
            << "se " << r.standard_error;
    }
}

TEST(Premium, MonteCarloIsReproducible) {
    const BaseMarket m;
    const TruncatedNormal k = make_kernel(m.params, {m.coef.B0 - 3, m.coef.B0 + 5});
    const QuadratureSpec q = QuadratureSpec::monte_carlo(50'000, 9);
    const PremiumReport a = premium_with_range(m.coef, k, m.params.mu0, q);
    const PremiumReport b = premium_with_range(m.coef, k, m.params.mu0, q);
    EXPECT_EQ(a.premium1, b.premium1);
    EXPECT_EQ(a.standard_error, b.standard_error);
    const PremiumReport c = premium_with_range(m.coef, k, m.params.mu0, QuadratureSpec::monte_carlo(50'000, 10));
    EXPECT_NE(a.premium1, c.premium1);
}

TEST(Premium, HermiteAgreesWithAdaptiveAtModerateScale) {
    const MarketParams p = moderate_market();
    const EquilibriumCoefficients k = solve_coefficients(p);
    const double sx = k.sigma_X();
    for (double offset : {-4.0, -1.0, 0.0, 0.5, 3.0, 6.0}) {
        const TruncatedNormal kern = make_kernel(p, Range::centered(k.B0 + offset * sx, 2.0 * sx));
        const double h200 = premium_with_range(k, kern, p.mu0, QuadratureSpec::hermite(200)).premium1;
        const double h400 = premium_with_range(k, kern, p.mu0, QuadratureSpec::hermite(400)).premium1;
        const double adaptive = premium_with_range(k, kern, p.mu0).premium1;
        EXPECT_NEAR(h200, h400, 1e-8) << offset;
        EXPECT_NEAR(h400, adaptive, 1e-8) << offset;
    }
}

TEST(Premium, HermiteIsBitReproducible) {
    const BaseMarket m;
    const TruncatedNormal k = make_kernel(m.params, {m.coef.B0, m.coef.B0 + 20});
    const QuadratureSpec q = QuadratureSpec::hermite(120);
    EXPECT_EQ(premium_with_range(m.coef, k, m.params.mu0, q).premium1,
              premium_with_range(m.coef, k, m.params.mu0, q).premium1);
}

TEST(Premium, WideRangeLeavesThePremiumAlone) {
    const BaseMarket m;
    const double sx = m.coef.sigma_X();
    const TruncatedNormal k = make_kernel(m.params, {m.coef.B0 - 50 * sx, m.coef.B0 + 50 * sx});
    const PremiumReport r = premium_with_range(m.coef, k, m.params.mu0);
    EXPECT_NEAR(r.premium1, r.premium0, 1e-9);
}

TEST(Premium, QuadratureSpecValidation) {
    EXPECT_THROW(QuadratureSpec::hermite(5).validate(), InvalidParameter);
    EXPECT_THROW(QuadratureSpec::monte_carlo(100).validate(), InvalidParameter);
    QuadratureSpec q = QuadratureSpec::monte_carlo();
    q.target_se = 0.0;
    EXPECT_THROW(q.validate(), InvalidParameter);
    EXPECT_NO_THROW(QuadratureSpec{}.validate());
}

TEST(Premium, FlagsMonteCarloThatMissesItsTarget) {
    const BaseMarket m;
    // Off center: a range centered on B0 makes every antithetic pair cancel.
    const TruncatedNormal k = make_kernel(m.params, Range::centered(m.coef.B0 + 10.0, 60.0));
    QuadratureSpec q = QuadratureSpec::monte_carlo(10'000, 1);
    q.target_se = 1e-9;
    EXPECT_TRUE(premium_with_range(m.coef, k, m.params.mu0, q).flagged);
}

TEST(Premium, B0DefinitionAndStatics) {
    const BaseMarket m;
    EXPECT_NEAR(compute_B0(m.params), -128.92, 5e-3);
    EXPECT_DOUBLE_EQ(compute_B0(m.params), m.coef.B0);
    MarketParams no_supply;
    no_supply.Z = 0.0;
    EXPECT_NEAR(compute_B0(no_supply), no_supply.mu0, 1e-12);

    const B0Diagnostic d = B0_printed_form_check(m.params);
    EXPECT_DOUBLE_EQ(d.from_definition, m.coef.B0);
    EXPECT_NEAR(d.difference, d.printed_form - d.from_definition, 1e-12);

    for (const SignedDerivative& s : B0_comparative_statics(m.params)) {
        EXPECT_TRUE(s.sign_matches) << s.parameter << " " << s.derivative;
        if (s.parameter == "mu0") {
            EXPECT_NEAR(s.derivative, 1.0, 1e-9);
        }
    }
}

TEST(Premium, B0SignsOverRandomMarkets) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        MarketParams p;
        p.gamma = 0.5 + 4.5 * u(rng);
        p.mu0 = -30 + 60 * u(rng);
        p.sigma_u2 = 0.25 + 9.75 * u(rng);
        p.sigma_eps2 = 0.25 + 9.75 * u(rng);
        p.sigma_y2 = 0.25 + 9.75 * u(rng);
        p.x_I = 0.1 + 0.8 * u(rng);
        p.Z = 1.0 + 39.0 * u(rng);
        for (const SignedDerivative& s : B0_comparative_statics(p)) {
            EXPECT_TRUE(s.sign_matches) << i << " " << s.parameter << " " << s.derivative;
        }
    }
}

TEST(Premium, Distances) {
    const PremiumDistances inside = compute_premium_distances({22, 28}, 25.0);
    EXPECT_TRUE(inside.mu0_inside);
    EXPECT_EQ(inside.D, 0.0);
    EXPECT_EQ(inside.D_upper, 3.0);
    EXPECT_EQ(inside.D_lower, 3.0);
    const PremiumDistances below = compute_premium_distances({30, 36}, 25.0);
    EXPECT_FALSE(below.mu0_inside);
    EXPECT_EQ(below.D, 5.0);
}

TEST(Premium, SensitivitiesMatchFiniteDifferences) {
    const BaseMarket m;
    const double sx = m.coef.sigma_X();
    const double h = 1e-3;
    for (double offset : {-1.0, 0.0, 0.7}) {
        const Range r = Range::centered(m.coef.B0 + offset * sx, 6.0);
        auto prem = [&](Range rr) {
            return premium_with_range(m.coef, make_kernel(m.params, rr), m.params.mu0).premium1;
        };
        const PremiumSensitivities s = premium_sensitivities(m.coef, make_kernel(m.params, r));
        EXPECT_NEAR(s.d_dupper, (prem({r.lower, r.upper + h}) - prem({r.lower, r.upper - h})) / (2 * h), 1e-6);
        EXPECT_NEAR(s.d_dlower, (prem({r.lower + h, r.upper}) - prem({r.lower - h, r.upper})) / (2 * h), 1e-6);
        EXPECT_NEAR(s.d_dmidpoint, (prem(r.shifted(h)) - prem(r.shifted(-h))) / (2 * h), 1e-6);
        EXPECT_NEAR(s.d_dupper + s.d_dlower, s.d_dmidpoint, 1e-12);
        EXPECT_LT(s.d_dupper, 0.0);
        EXPECT_LT(s.d_dlower, 0.0);
    }
}

TEST(Premium, LimitProbesConverge) {
    const BaseMarket m;
    const std::pair<PremiumProbe, Side> far_probes[] = {
        {PremiumProbe::UpperFar, Side::Above},    {PremiumProbe::LowerFar, Side::Below},
        {PremiumProbe::MidpointFar, Side::Above}, {PremiumProbe::MidpointFar, Side::Below},
        {PremiumProbe::Mu0Far, Side::Above},      {PremiumProbe::Mu0Far, Side::Below},
    };
    for (const auto& [p, side] : far_probes) {
        const std::vector<double> far = default_premium_far_points(m.coef, m.params, side);
        const ProbeReport r = probe_premium_limit(p, side, m.coef, m.params, 6.0, far);
        EXPECT_TRUE(r.passed()) << to_string(p) << ": " << r.message;
    }
    // Widths in sigma_X must reach past both mu0 and B0.
    const std::vector<double> widths =
        geometric_sequence(4.0, 2.0, 2.0 * std::abs(m.coef.theta) / m.coef.sigma_X() + 40.0);
    for (PremiumProbe p : {PremiumProbe::DeltaWide, PremiumProbe::MidpointWide}) {
        const ProbeReport r = probe_premium_limit(p, Side::Above, m.coef, m.params, 6.0, widths);
        EXPECT_TRUE(r.passed()) << to_string(p) << ": " << r.message;
    }
}
