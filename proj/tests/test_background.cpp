#include "acs/background.hpp"
#include "acs/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace acs;

TEST(Smoothstep, EndsAndFlatness) {
    EXPECT_EQ(smoothstep(Jet4::variable(-0.5)).value(), 0.0);
    EXPECT_EQ(smoothstep(Jet4::variable(1.5)).value(), 1.0);
    EXPECT_NEAR(smoothstep(Jet4::variable(0.5)).value(), 0.5, 1e-15);
    for (double s : {1e-3, 1.0 - 1e-3}) {
        const Jet4 j = smoothstep(Jet4::variable(s));
        for (std::size_t k = 1; k <= 4; ++k) EXPECT_LT(std::abs(j.d(k)), 1e-100) << s << " " << k;
    }
    double prev = 0;
    for (int i = 10; i <= 90; ++i) {
        const double v = smoothstep(Jet4::variable(i / 100.0)).value();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Background, FlatIsExactlyScaledFlat) {
    for (double c : {0.5, 1.0, 2.0}) {
        const auto spec = ConeSpec::euclidean(2, 1.0, c);
        RadialGrid g(-6.0, 30.0, 256);
        const auto bg = build_background(spec, g);
        EXPECT_TRUE(bg.params().flat);
        for (int j = 0; j < g.N; ++j) {
            EXPECT_EQ(bg.metric.alpha[j], 0.5 * c);
            EXPECT_EQ(bg.metric.beta[j], 0.5 * c);
        }
        const auto F = build_rhs(spec, g, bg);
        for (double v : F.F) EXPECT_EQ(v, 0.0);
    }
}

TEST(Background, PositiveAndConicalBeyondGlue) {
    for (auto spec : {ConeSpec::euclidean(2, 0.5, 1.0), ConeSpec::euclidean(3, 0.7, 2.0),
                      ConeSpec::line_bundle(2, 4, 1.0, 1.0), ConeSpec::line_bundle(2, 1, 1.0, 1.0)}) {
        RadialGrid g(-6.0, 30.0, 512);
        const auto bg = build_background(spec, g);
        const double xg = bg.x_glue();
        EXPECT_LT(xg, g.x_max - 4.0) << spec.describe();
        for (int j = 0; j < g.N; ++j) {
            EXPECT_GT(bg.metric.alpha[j], 0.0);
            EXPECT_GT(bg.metric.beta[j], 0.0);
            if (g.x(j) >= xg) {
                EXPECT_EQ(bg.dtau_end[j], 0.0);
                EXPECT_EQ(bg.du_end[j], 0.0);
            }
        }
        if (spec.kind == ConeKind::LineBundle)
            EXPECT_NEAR(bg.moment(-40.0).value(), bg.params().tau0, 1e-12) << spec.describe();
    }
}

TEST(Background, PotentialMatchesQuadrature) {
    const auto spec = ConeSpec::euclidean(2, 0.5, 1.0);
    RadialGrid g(-6.0, 30.0, 512);
    const auto bg = build_background(spec, g);
    for (int j = 0; j < g.N; j += 23) EXPECT_NEAR(bg.du_end[j], bg.potential_minus_end(g.x(j)).value(), 1e-11) << j;
    // u_x = tau
    for (double x : {-3.0, 0.0, 4.0, 12.0}) EXPECT_NEAR(bg.potential(x).d(1), bg.moment(x).value(), 1e-11);
}

TEST(Background, CoreSlopeSetsLambda) {
    const auto spec = ConeSpec::euclidean(2, 0.5, 1.0);
    RadialGrid g(-6.0, 30.0, 512);
    const double slope = 0.1;
    const auto bg = build_background(spec, g, {}, slope);
    const auto& p = bg.params();
    EXPECT_NEAR(p.mu * spec.a * std::pow(p.lambda, spec.a - 1.0), slope, 1e-14);
}

TEST(Rhs, DecaysAndHasExpectedLeadingTerm) {
    const auto spec = ConeSpec::euclidean(2, 0.5, 1.0);
    RadialGrid g(-6.0, 30.0, 1024);
    const auto bg = build_background(spec, g);
    const auto F = build_rhs(spec, g, bg);
    EXPECT_LT(std::abs(F.F.back()), 1e-5);
    EXPECT_LT(F.component_error, 10 * g.h() * g.h());
    EXPECT_NEAR(F.leading_coeff / F.leading_expected, 1.0, 1e-3);
    EXPECT_NEAR(rhs_end(spec, 40.0), 0.0, 1e-8);
}

TEST(Rhs, RejectsForeignGrid) {
    const auto spec = ConeSpec::euclidean(2, 0.5, 1.0);
    RadialGrid g(-6.0, 30.0, 512), h(-6.0, 30.0, 256);
    const auto bg = build_background(spec, g);
    EXPECT_THROW(build_rhs(spec, h, bg), InconsistentBackgroundError);
}
