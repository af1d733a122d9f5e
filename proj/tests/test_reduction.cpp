#include "acs/background.hpp"
#include "acs/errors.hpp"
#include "acs/reduction.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace acs;

namespace {

struct Case {
    ConeSpec spec;
    RadialGrid grid;
    BackgroundMetric bg;
    Case(const ConeSpec& s, int N = 512) : spec(s), grid(-6.0, 30.0, N), bg(build_background(s, grid)) {}
};

PotentialProfile bump(const ConeSpec& s, const RadialGrid& g, double amp, double centre, double width) {
    PotentialProfile p = zero_potential(s, g);
    for (int j = 0; j < g.N; ++j) p.phi[j] = amp * std::exp(-0.5 * std::pow((g.x(j) - centre) / width, 2));
    return p;
}

} // namespace

TEST(MaOperator, ZeroOnZeroPotential) {
    for (auto spec : {ConeSpec::euclidean(2, 0.5, 1.0), ConeSpec::line_bundle(2, 4, 1.0, 1.0)}) {
        Case s(spec);
        const auto r = ma_operator(spec, s.grid, s.bg, zero_potential(spec, s.grid));
        for (double v : r) EXPECT_EQ(v, 0.0);
    }
}

TEST(MaOperator, ThrowsWhenPositivityIsLost) {
    Case s(ConeSpec::euclidean(2, 0.5, 1.0));
    auto p = bump(s.spec, s.grid, -50.0, 2.0, 0.3);
    EXPECT_THROW(ma_operator(s.spec, s.grid, s.bg, p), NonKahlerError);
}

TEST(Linearized, ConstantGivesMinusOne) {
    Case s(ConeSpec::euclidean(2, 0.5, 1.0));
    PotentialProfile one = zero_potential(s.spec, s.grid);
    one.phi.assign(s.grid.N, 1.0);
    for (double v : linearized_apply(s.spec, s.grid, s.bg.metric, one)) EXPECT_NEAR(v, -1.0, 1e-7);
}

TEST(Linearized, FlatLaplacianOfRho) {
    // c = 2 makes the flat metric the identity: Delta rho = n, (X/2) rho = rho
    const auto spec = ConeSpec::euclidean(3, 1.0, 2.0);
    Case s(spec);
    PotentialProfile rho = zero_potential(spec, s.grid);
    for (int j = 0; j < s.grid.N; ++j) rho.phi[j] = std::exp(s.grid.x(j));
    const auto out = linearized_apply(spec, s.grid, s.bg.metric, rho);
    for (int j = 0; j < s.grid.N; j += 37) EXPECT_NEAR(out[j], 3.0, 1e-7 * std::max(1.0, rho.phi[j])) << j;
}

TEST(Linearized, DirectionalDerivativeIsSecondOrderInEps) {
    Case s(ConeSpec::euclidean(2, 0.5, 1.0));
    const auto phi = bump(s.spec, s.grid, 0.2, 1.0, 1.5);
    const auto psi = bump(s.spec, s.grid, 1.0, 3.0, 2.0);
    Derivs D(s.grid);
    const auto lin = linearized_apply(s.spec, s.grid, metric_of(s.bg, D, phi.phi), psi);
    const double scale = [&] {
        double m = 0;
        for (double v : lin) m = std::max(m, std::abs(v));
        return m;
    }();
    auto err = [&](double eps) {
        PotentialProfile p = phi, m = phi;
        for (int j = 0; j < s.grid.N; ++j) p.phi[j] += eps * psi.phi[j], m.phi[j] -= eps * psi.phi[j];
        const auto a = ma_operator(s.spec, s.grid, s.bg, p), b = ma_operator(s.spec, s.grid, s.bg, m);
        double e = 0;
        for (int j = 0; j < s.grid.N; ++j) e = std::max(e, std::abs((a[j] - b[j]) / (2 * eps) - lin[j]));
        return e / scale;
    };
    const double e1 = err(1e-2), e2 = err(5e-3);
    EXPECT_LT(err(1e-5), 1e-6);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Linearized, BandedAssemblyMatchesApply) {
    Case s(ConeSpec::line_bundle(2, 4, 1.0, 1.0), 256);
    const auto psi = bump(s.spec, s.grid, 1.0, 2.0, 1.0);
    Derivs D(s.grid);
    const auto A = assemble_linearized(s.spec, s.grid, s.bg.metric, D, 8, 8);
    const auto y = A.multiply(psi.phi), ref = linearized_apply(s.spec, s.grid, s.bg.metric, psi);
    for (int j = 0; j < s.grid.N; ++j) EXPECT_NEAR(y[j], ref[j], 1e-10 * (1 + std::abs(ref[j])));
}

TEST(SecondVariation, NonPositiveAndZeroOnConstants) {
    Case s(ConeSpec::euclidean(2, 0.5, 1.0));
    PotentialProfile c = zero_potential(s.spec, s.grid);
    c.phi.assign(s.grid.N, 3.0);
    for (double v : second_variation_check(s.spec, s.grid, s.bg.metric, c)) EXPECT_NEAR(v, 0.0, 1e-12);
    const auto psi = bump(s.spec, s.grid, 1.0, 0.0, 1.0);
    for (double v : second_variation_check(s.spec, s.grid, s.bg.metric, psi)) EXPECT_LE(v, 0.0);
}

TEST(Taylor, IdentityHoldsToQuadratureAccuracy) {
    Case s(ConeSpec::euclidean(2, 0.5, 1.0));
    const auto tc = taylor_identity_check(s.spec, s.grid, s.bg, bump(s.spec, s.grid, 0.1, 1.0, 1.0));
    EXPECT_LT(tc.max_abs, 1e-9);
}

TEST(Taylor, ReportsLossOfPositivity) {
    Case s(ConeSpec::euclidean(2, 0.5, 1.0));
    EXPECT_THROW(taylor_identity_check(s.spec, s.grid, s.bg, bump(s.spec, s.grid, -50.0, 2.0, 0.3)), NonKahlerError);
}

TEST(Closures, CoreKernel) {
    RadialGrid g(-6.0, 30.0, 512);
    for (auto kind : {ClosureKind::ZeroSection, ClosureKind::ZeroSectionDrift}) {
        const Stencil s = core_closure(g, kind);
        for (int k = 0; k < 4; ++k) {
            double acc = 0, scale = 0;
            for (std::size_t i = 0; i < s.w.size(); ++i) {
                const double f = std::exp(k * (g.x(s.first + int(i)) - g.x_min));
                acc += s.w[i] * f;
                scale += std::abs(s.w[i] * f);
            }
            EXPECT_LT(std::abs(acc), 1e-12 * scale) << k;
        }
    }
    EXPECT_EQ(closure_for(ConeSpec::euclidean(2, 0.5, 1.0)), ClosureKind::Origin);
    EXPECT_EQ(closure_for(ConeSpec::line_bundle(2, 4, 1.0, 1.0)), ClosureKind::ZeroSection);
    EXPECT_EQ(closure_for(ConeSpec::line_bundle(2, 1, 1.0, 1.0)), ClosureKind::ZeroSectionDrift);
}

TEST(Closures, FarFieldAnnihilatesDecay) {
    RadialGrid g(-6.0, 30.0, 512);
    const Stencil s = far_closure(g, 0.5);
    double acc = 0, scale = 0;
    for (std::size_t i = 0; i < s.w.size(); ++i) {
        const double f = std::exp(-0.5 * (g.x(s.first + int(i)) - g.x_max));
        acc += s.w[i] * f;
        scale += std::abs(s.w[i] * f);
    }
    EXPECT_LT(std::abs(acc), 1e-6 * scale);
}

TEST(WeightedNorms, ZeroAndWeight) {
    const auto spec = ConeSpec::euclidean(2, 0.5, 1.0);
    RadialGrid g(-6.0, 30.0, 256);
    const auto w0 = weighted_norms(spec, g, std::vector<double>(g.N, 0.0));
    EXPECT_EQ(w0.c0, 0.0);
    EXPECT_EQ(w0.c0_f, 0.0);
    const auto f = weight_f(spec, g);
    EXPECT_EQ(f.front(), 1.0);
    EXPECT_NEAR(f.back(), 0.5 * std::exp(0.5 * 30.0), 1e-6 * f.back());
}

TEST(RicciData, FlatHasZeroScalarCurvature) {
    Case s(ConeSpec::euclidean(2, 1.0, 1.0));
    const auto rd = ricci_data(s.spec, s.grid, s.bg.metric);
    for (double v : rd.s) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ChartOracle, MatchesReducedOperator) {
    for (auto spec : {ConeSpec::euclidean(2, 0.5, 1.0), ConeSpec::line_bundle(2, 4, 1.0, 1.0)}) {
        Case s(spec, 1024);
        const auto p = bump(spec, s.grid, 0.1, 1.0, 1.0);
        const auto red = ma_operator(spec, s.grid, s.bg, p);
        const int j = 400;
        const double x = s.grid.x(j), rho = std::exp(x);
        ChartPoint pt;
        const int d = spec.dim();
        pt.re.assign(d, 0.0);
        pt.im.assign(d, 0.0);
        if (spec.kind == ConeKind::EuclideanResolution) {
            pt.re[0] = std::sqrt(0.6 * rho);
            pt.im[1] = std::sqrt(0.4 * rho);
        } else {
            // w = 0.3 + 0.2 i; |xi|^2 (1 + |w|^2)^k = rho
            pt.re[0] = 0.3;
            pt.im[0] = 0.2;
            pt.re[1] = std::sqrt(rho / std::pow(1.13, spec.k));
        }
        ASSERT_NEAR(chart_log_rho(spec, pt), x, 1e-12);
        auto f = [&](double xx) { return 0.1 * std::exp(-0.5 * std::pow(xx - 1.0, 2)); };
        const auto full = full_chart_oracle(spec, s.bg, f, {pt});
        EXPECT_NEAR(full[0], red[j], 1e-5) << spec.describe();
    }
}
