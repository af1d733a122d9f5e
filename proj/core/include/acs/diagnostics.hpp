#pragma once
// Checks on solved solitons: identities, decay rate, a priori bounds, curvature, uniqueness.

#include "acs/ma_solver.hpp"
#include "acs/reduction.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace acs {

// interior window [x_min + 2, x_max - 2]
struct Window {
    int lo, hi;   // inclusive node range
};
Window interior_window(const RadialGrid& g);

struct SolitonResiduals {
    double soliton_alpha = 0, soliton_beta = 0;   // rho - L_X/2 + omega, relative components
    double trace = 0;                              // Delta f - s/2 - n
    double first_order = 0;                        // grad s + Ric(X), radial component
    double normalization_variation = 0;           // max - min of |grad f|^2 + s/2 - f
    double normalization_value = 0;                // its value at the outermost interior node
};
SolitonResiduals soliton_residuals(const SolitonSolution& sol);

struct DecayFit {
    bool defined = false;   // false when the difference sits at the rounding floor
    double rate = 0, r2 = 0;
    double rate_without_ricci = 0, r2_without_ricci = 0;
    double x_lo = 0, x_hi = 0;
    int points = 0;
    double max_difference = 0;
};
DecayFit decay_rate_fit(const SolitonSolution& sol);

struct BoundCheck {
    std::string name;
    double lhs = 0, rhs = 0;
    bool pass = false;
};
struct AprioriRecord {
    std::vector<BoundCheck> checks;
    double sup_phi = 0, sup_F = 0;
    double sup_f_phi = 0, sup_X_phi = 0, sup_f_drift = 0;
    double max_ratio = 1;   // uniform equivalence of g and g_phi
    bool pass = false;
};
AprioriRecord apriori_check(const SolitonSolution& sol, const RHSProfile& F);

struct CurvatureSample {
    double r = 0, x = 0;
    std::vector<double> eigenvalues;   // curvature operator on real (1,1)-forms, unitary frame
    double min_eigenvalue = 0;
    double radial_floor = 0;       // r^2 min{Rm(X,U,U,X) : U perp X, |U| = 1}
    double transverse_floor = 0;   // same with U perp X, JX
    double ricci_floor = 0;        // r^2 min{2 Ric(U,U) : U perp X, |U| = 1}
};
struct CurvatureSpectrum {
    std::vector<CurvatureSample> samples;
    std::vector<CurvatureSample> outer;   // radial floors across the outer decade
    std::vector<std::string> notes;
    double min_eigenvalue = 0;
    bool positive = false;
    // L in floor ~ L + C r^-2 fitted over the outer decade
    double radial_limit = 0, transverse_limit = 0;
    double limit_threshold = 0;
    bool radial_limit_positive = false;
};
struct CurvatureOptions {
    int outer_points = 6;
    // a limit counts as positive above max(limit_floor, limit_eps r_max^2 max(1, transverse limit))
    double limit_floor = 1e-6, limit_eps = 1e-14;
};
// radii are values of r = rho^{a/2}; requires EuclideanResolution
CurvatureSpectrum curvature_spectrum(const SolitonSolution& sol, const std::vector<double>& radii,
                                     const CurvatureOptions& opt = {});
std::vector<double> default_radii();

// complex curvature R_{i jbar k lbar} of a metric on C^d given as a callable, at v (interleaved coordinates)
using MetricFn = std::function<Eigen::MatrixXcd(const std::vector<double>&)>;
std::vector<std::complex<double>> curvature_tensor(const MetricFn& g, const std::vector<double>& v, double delta);

// same tensor in closed form for g_{i jbar} = A delta_ij + B zbar_i z_j, A = tau / rho, B = (tau_x - tau) / rho^2;
// jet = (tau, tau_x, tau_xx, tau_xxx) at x = log |v|^2
std::vector<std::complex<double>> invariant_curvature_tensor(const std::vector<double>& v, const std::array<double, 4>& jet);

struct UniquenessRecord {
    int seeds = 0, succeeded = 0;
    double max_distance = 0;
    std::vector<double> seed_sup;   // sup of each initial perturbation
    std::vector<std::string> failures;
};
UniquenessRecord uniqueness_experiment(const ConeSpec& spec, const BackgroundMetric& bg, const SolverConfig& cfg,
                                       int seeds, unsigned long long seed, int threads = 1);

struct ChartSample {
    double x = 0;
    double reduced = 0, chart = 0, difference = 0;
};
struct ChartCheck {
    std::vector<ChartSample> samples;
    double bound = 0;   // 5 h^2 with h the grid spacing in x
    double max_difference = 0;
    bool pass = false;
};
// MA of the solved phi: reduced operator at random interior nodes against the full chart
// evaluation at a random chart point of the same rho
ChartCheck chart_oracle_check(const SolitonSolution& sol, int points, unsigned long long seed,
                              const ChartOracleOptions& opt = {});

struct DiagnosticsOptions {
    bool curvature = true;
    std::vector<double> curvature_radii = default_radii();
    int uniqueness_seeds = 0;
    unsigned long long seed = 1;
    SolverConfig cfg;
    int threads = 1;
    double identity_tol = 1e-5;
};

struct DiagnosticsBundle {
    double solution_residual = 0;
    SolitonResiduals residuals;
    DecayFit decay;
    AprioriRecord apriori;
    std::optional<CurvatureSpectrum> curvature;
    std::optional<UniquenessRecord> uniqueness;
    bool pass = false;
};
DiagnosticsBundle run_diagnostics(const SolitonSolution& sol, const DiagnosticsOptions& opt);

} // namespace acs
