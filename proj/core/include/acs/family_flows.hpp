#pragma once
// Normalized Kaehler-Ricci flow on P^1 in momentum coordinates, and the cone family it induces.
//   g = dmu^2 / Theta + Theta dtheta^2,  mu in [-1, 1],  Theta(+-1) = 0,  Theta'(+-1) = -+2
//   Theta_t = (Theta Theta'' - Theta'^2) / 2 + Theta - mu Theta'
// Fubini-Study (Ric = g) is Theta = 1 - mu^2.

#include "acs/cone_geometry.hpp"
#include "acs/ma_solver.hpp"

#include <string>
#include <vector>

namespace acs {

struct FlowState {
    std::vector<double> mu, theta;
    double t = 0;
};

FlowState fubini_study_state(int nodes);
// Theta = (1 - mu^2)(1 + eps (1 - mu^2) + eps2 mu (1 - mu^2)), circle-invariant and positively curved for small eps
FlowState perturbed_state(int nodes, double eps, double eps2 = 0.0);

struct FlowSample {
    double t;
    double sup_dev;         // sup |s - 2|
    double min_curvature;   // min Gaussian curvature -Theta''/2
    double area;            // 2 pi int dmu
    double gauss_bonnet;    // int s dA / (8 pi)
};

struct FlowOptions {
    double dt = 5e-5;
    double dt_min = 1e-10;
    double record_every = 0.1;
};

struct FlowResult {
    FlowState final;
    std::vector<FlowSample> trace;
    double max_change = 0;   // sup_t sup_mu |Theta(t) - Theta(0)|
    int rejected = 0;
};

FlowSample flow_sample(const FlowState& s);
FlowResult transverse_krf_run(const FlowState& initial, double t_end, const FlowOptions& opt = {});

struct FamilyFlowMember {
    double flow_t = 0, progress = 0, a = 0;
    bool converged = false;
    double residual = 0;
    double min_eigenvalue = 0;
    double outer_radial_limit = 0;   // fitted limit of r^2 times the radial floor
    std::string failure;
};

struct FamilyFlowRecord {
    std::vector<FamilyFlowMember> members;
    bool all_converged = false, all_positive = false;
    std::string note;
};

// the cone family along a(progress), progress = 1 - sup_dev(t)/sup_dev(0)
FamilyFlowRecord family_with_flow(const ConeSpec& s0, const ConeSpec& s1, const std::vector<FlowSample>& trace,
                                  int members, const RadialGrid& grid, const SolverConfig& cfg,
                                  const std::vector<double>& radii);

} // namespace acs
