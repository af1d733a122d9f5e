#pragma once
// Damped Newton on MA(phi) = F and the continuity path F_t = t F.

#include "acs/background.hpp"
#include "acs/cone_geometry.hpp"
#include "acs/profiles.hpp"
#include "acs/stencil.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace acs {

struct SolverConfig {
    double newton_tol = 1e-9;
    int newton_max_iter = 40;
    double lambda_min = 1e-4;
    double safeguard = 0.1;      // omega_{phi + lambda delta} >= safeguard * omega_phi
    // a node also counts as converged once its residual is within this multiple of its rounding floor
    double floor_factor = 4.0;
    // relative drift allowed between the fitted zero-section moment and its class value
    double section_tol = 0.1;
    double dt_init = 0.25, dt_min = 1e-4, dt_max = 1.0;
    double dt_grow = 2.0;
    int easy_iters = 5;          // grow dt when a step converges within this many iterations
    int band = 8;
    std::vector<int> ladder = {512, 1024, 2048};
    double x_min = -6.0, x_max = 30.0;
    // after the first ladder level, rebuild the background with the solution's core slope
    bool adapt_core = true;

    void validate() const;
};

struct NewtonTrace {
    std::vector<double> residuals;   // sup-norm before each step, and the final one
    std::vector<double> lambdas;
    int damping_events = 0;
    bool floor_limited = false;   // stopped at the rounding floor above newton_tol
};

struct PathStep {
    double t;
    double dt;
    int iterations;
    int damping_events;
    double residual;
    bool accepted;
};

struct FailureRecord {
    std::string kind;      // path_stall, no_convergence, step_failure, non_kahler, ...
    std::string message;
    double t_stall = -1.0;
    int node = -1;
};

struct DiagnosticsBundle;

struct SolveReport {
    std::vector<PathStep> path;
    std::vector<double> newton_history;   // residuals of the last Newton solve
    double final_residual = 0;
    bool floor_limited = false;   // last Newton solve stopped at the rounding floor
    bool converged = false;
    bool converged_with_rate = false;
    std::vector<int> ladder;
    std::optional<FailureRecord> failure;
    std::shared_ptr<const DiagnosticsBundle> diagnostics;
};

struct SolitonSolution {
    ConeSpec spec;
    RadialGrid grid;
    BackgroundMetric bg;
    RHSProfile rhs;
    PotentialProfile phi;
    MetricProfile metric;
    std::vector<double> tau, tau_x;
    std::vector<double> f;          // soliton potential, X = grad f
    double f_const = 0;             // f = tau/a + f_const
    std::vector<double> residual;   // MA(phi) - F (closure rows set to 0)
    SolveReport report;
};

// sup |MA(phi) - F| over nodes 1..N-2
double interior_residual(const std::vector<double>& r);

// solves MA(phi) = F_target; throws NoConvergenceError, StepFailureError, NonKahlerError
PotentialProfile newton_solve(const ConeSpec& spec, const BackgroundMetric& bg, const std::vector<double>& F_target,
                              const PotentialProfile& phi0, const SolverConfig& cfg, NewtonTrace* trace = nullptr);

// throws PathStallError when dt falls below dt_min; the path so far is left in *partial
SolitonSolution continuity_solve(const ConeSpec& spec, const BackgroundMetric& bg, const RHSProfile& F,
                                 const SolverConfig& cfg, const PotentialProfile* phi_start = nullptr,
                                 SolveReport* partial = nullptr);

// metric, f and residual for a converged phi
SolitonSolution assemble_solution(const ConeSpec& spec, const BackgroundMetric& bg, const RHSProfile& rhs,
                                  const PotentialProfile& phi);

// tau_x / a^2 - tau / a, without the cancellation of the two large terms on the end
std::vector<double> gradient_excess(const ConeSpec& spec, const BackgroundMetric& bg, const PotentialProfile& phi);

// phi sampled on another grid
PotentialProfile transfer(const PotentialProfile& p, const RadialGrid& from, const RadialGrid& to);
// same total potential u_bg + phi expressed against another background
PotentialProfile transfer(const PotentialProfile& p, const BackgroundMetric& from, const BackgroundMetric& to);

// tau ~ T + B rho + C rho^2 fitted over [x_min, x_min + 1]; T is the moment at the zero section
struct CoreFit {
    double T = 0, B = 0, C = 0;
};
CoreFit core_fit(const RadialGrid& g, const std::vector<double>& tau);
double core_slope(const SolitonSolution& sol);

struct SolveOptions {
    bool diagnostics = true;
    bool curvature = true;
    int uniqueness_seeds = 0;
    unsigned long long seed = 1;
    int threads = 1;
};

// grid ladder, warm starts, diagnostics on the finest grid
SolitonSolution solve_soliton(const ConeSpec& spec, const SolverConfig& cfg, const SolveOptions& opt = {},
                              SolveReport* partial = nullptr);

struct FamilyMember {
    double t;
    ConeSpec spec;
    SolitonSolution sol;
    double dphi_dt = 0;   // sup |phi_i - phi_{i-1}| / dt
    double dtau_dt = 0;   // sup |tau_i - tau_{i-1}| / (tau_i dt), independent of the background choice
};

// solves along cone_path(s0, s1, t_i), t_i = i/steps, warm-started
std::vector<FamilyMember> family_solve(const ConeSpec& s0, const ConeSpec& s1, int steps, const RadialGrid& grid,
                                       const SolverConfig& cfg);

// one member with warm start; falls back to the continuity path
SolitonSolution solve_on_grid(const ConeSpec& spec, const RadialGrid& grid, const SolverConfig& cfg,
                              const PotentialProfile* warm = nullptr, SolveReport* partial = nullptr);
SolitonSolution solve_on_background(const ConeSpec& spec, const BackgroundMetric& bg, const SolverConfig& cfg,
                                    const PotentialProfile* warm = nullptr, SolveReport* partial = nullptr);

} // namespace acs
