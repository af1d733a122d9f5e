#pragma once
// Symmetry-reduced Monge-Ampere operator with drift:
//   MA(phi) = log(omega_phi^n / omega^n) + (X/2) phi - phi,   (X/2) phi = phi_x / a.

#include "acs/background.hpp"
#include "acs/banded.hpp"
#include "acs/cone_geometry.hpp"
#include "acs/profiles.hpp"
#include "acs/stencil.hpp"

#include <functional>
#include <vector>

namespace acs {

// f_j = max(1, rho^a / 2)
std::vector<double> weight_f(const ConeSpec& spec, const RadialGrid& g);
WeightedNorms weighted_norms(const ConeSpec& spec, const RadialGrid& g, const std::vector<double>& phi);

ClosureKind closure_for(const ConeSpec& spec);
PotentialProfile zero_potential(const ConeSpec& spec, const RadialGrid& g);

// tau = tau_bg + phi_x and tau_x = tau_bg_x + phi_xx at the nodes
struct MomentProfile {
    std::vector<double> tau, tau_x;
};
MomentProfile moments(const BackgroundMetric& bg, const Derivs& D, const std::vector<double>& phi);
MetricProfile metric_of(const BackgroundMetric& bg, const Derivs& D, const std::vector<double>& phi);

// throws NonKahlerError at the first node with alpha or beta <= 0
std::vector<double> ma_operator(const ConeSpec& spec, const RadialGrid& grid, const BackgroundMetric& bg,
                                const PotentialProfile& phi);
std::vector<double> ma_operator(const ConeSpec& spec, const BackgroundMetric& bg, const Derivs& D,
                                const std::vector<double>& phi, double offset = 0.0);

// Delta_{omega_phi} psi + (X/2) psi - psi for the metric described by state
std::vector<double> linearized_apply(const ConeSpec& spec, const RadialGrid& grid, const MetricProfile& state,
                                     const PotentialProfile& psi);

// the same operator as a banded matrix on all nodes (boundary rows are one-sided)
BandedMatrix assemble_linearized(const ConeSpec& spec, const RadialGrid& grid, const MetricProfile& state,
                                 const Derivs& D, int kl, int ku);

// -|i ddbar psi|^2_{g_phi}, node-wise
std::vector<double> second_variation_check(const ConeSpec& spec, const RadialGrid& grid,
                                           const MetricProfile& state, const PotentialProfile& psi);

struct TaylorCheck {
    std::vector<double> residual;   // MA(phi) - [linear part - double integral]
    double max_abs = 0;
};
// Taylor form of MA around the background, 8-point Gauss quadrature in (sigma, tau)
TaylorCheck taylor_identity_check(const ConeSpec& spec, const RadialGrid& grid, const BackgroundMetric& bg,
                                  const PotentialProfile& phi);

// boundary closures used by the solver
Stencil core_closure(const RadialGrid& g, ClosureKind kind);
Stencil far_closure(const RadialGrid& g, double decay_order);

// Full-chart evaluation of MA(phi) for a radial phi given as x -> (phi) callable.
// Samples are points of C^dim in the chart: C^n itself, or (w, xi) on O(-k) -> P^{m-1}.
struct ChartPoint {
    std::vector<double> re, im;
};
struct ChartOracleOptions {
    double h = 1e-3;          // relative FD step
    double min_rho = 1e-6;    // refuse samples too close to the exceptional set
};
double chart_log_rho(const ConeSpec& spec, const ChartPoint& p);
std::vector<double> full_chart_oracle(const ConeSpec& spec, const BackgroundMetric& bg,
                                      const std::function<double(double)>& phi,
                                      const std::vector<ChartPoint>& pts, const ChartOracleOptions& opt = {});

} // namespace acs

namespace acs {

// Ricci potential P = nb log tau + log tau_x - q x and scalar curvature,
// from FD of log alpha and log beta
struct RicciData {
    std::vector<double> tau, tau_x;
    std::vector<double> P_x, P_xx;
    std::vector<double> s, s_x;
    std::vector<double> la_x, lb_x;   // (log alpha)_x, (log beta)_x
};
RicciData ricci_data(const ConeSpec& spec, const RadialGrid& grid, const MetricProfile& m, int stride = 1);

} // namespace acs
