#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"
#include "acs/family_flows.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace acs;

TEST(FlowStates, RoundSphere) {
    const auto s = fubini_study_state(101);
    const auto f = flow_sample(s);
    EXPECT_LT(f.sup_dev, 1e-10);
    EXPECT_NEAR(f.area, 4.0 * std::numbers::pi, 1e-12);
    EXPECT_NEAR(f.gauss_bonnet, 1.0, 1e-8);
    EXPECT_NEAR(f.min_curvature, 1.0, 1e-8);
}

TEST(FlowStates, PerturbedStartKeepsBoundaryData) {
    const auto s = perturbed_state(101, 0.2, 0.1);
    EXPECT_EQ(s.theta.front(), 0.0);
    EXPECT_EQ(s.theta.back(), 0.0);
    const auto f = flow_sample(s);
    EXPECT_GT(f.sup_dev, 0.1);
    EXPECT_NEAR(f.gauss_bonnet, 1.0, 1e-3);
}

TEST(Flow, FubiniStudyIsStationary) {
    const auto r = transverse_krf_run(fubini_study_state(101), 1.0);
    EXPECT_LE(r.max_change, 1e-8);
}

TEST(Flow, ConvergesToRoundMetric) {
    const auto r = transverse_krf_run(perturbed_state(101, 0.2, 0.1), 6.0);
    ASSERT_GE(r.trace.size(), 2u);
    EXPECT_LT(r.trace.back().sup_dev, 1e-2 * r.trace.front().sup_dev);
    double drift = 0;
    for (const auto& s : r.trace) drift = std::max(drift, std::abs(s.area - r.trace.front().area));
    EXPECT_LT(drift, 1e-8);
    EXPECT_NEAR(r.trace.back().min_curvature, 1.0, 1e-2);
}

TEST(Family, ShortPathConvergesWithPositiveCurvature) {
    SolverConfig cfg;
    const RadialGrid g(cfg.x_min, cfg.x_max, 512);
    const auto fam = family_solve(ConeSpec::euclidean(2, 0.9, 1.0), ConeSpec::euclidean(2, 0.7, 1.0), 2, g, cfg);
    ASSERT_EQ(fam.size(), 3u);
    EXPECT_DOUBLE_EQ(fam.back().spec.a, 0.7);
    for (const auto& m : fam) {
        EXPECT_TRUE(m.sol.report.converged);
        EXPECT_TRUE(curvature_spectrum(m.sol, default_radii()).positive) << m.spec.a;
    }
    EXPECT_GT(fam[1].dtau_dt, 0.0);
    EXPECT_TRUE(std::isfinite(fam[2].dtau_dt));
}

TEST(Family, RejectsIncompatibleEnds) {
    SolverConfig cfg;
    const RadialGrid g(cfg.x_min, cfg.x_max, 256);
    EXPECT_THROW(family_solve(ConeSpec::euclidean(2, 0.9, 1.0), ConeSpec::euclidean(3, 0.5, 1.0), 2, g, cfg),
                 IncompatibleFamilyError);
}

TEST(Family, DrivenByFlowProgress) {
    const auto r = transverse_krf_run(perturbed_state(101, 0.2, 0.1), 3.0);
    SolverConfig cfg;
    const RadialGrid g(cfg.x_min, cfg.x_max, 512);
    const auto rec = family_with_flow(ConeSpec::euclidean(2, 0.9, 1.0), ConeSpec::euclidean(2, 0.7, 1.0), r.trace, 3,
                                      g, cfg, default_radii());
    ASSERT_EQ(rec.members.size(), 4u);
    EXPECT_TRUE(rec.all_converged);
    EXPECT_TRUE(rec.all_positive);
    for (std::size_t i = 1; i < rec.members.size(); ++i) EXPECT_LE(rec.members[i].a, rec.members[i - 1].a);
}
