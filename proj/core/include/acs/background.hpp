#pragma once
// Background metric equal to c omega_0 - rho_{omega_0} beyond the glue radius,
// and the Monge-Ampere source term F.

#include "acs/cone_geometry.hpp"
#include "acs/jet.hpp"
#include "acs/profiles.hpp"
#include "acs/stencil.hpp"

#include <vector>

namespace acs {

using Jet4 = Jet<4>;

// Moment profile tau = tau_core on x <= x1, tau_end = c a rho^a / 2 - kappa on x >= x1 + width,
// tau_core + chi (tau_end - tau_core) in between; tau_core = tau0 + mu ((lambda + rho)^a - lambda^a).
struct GlueParams {
    double tau0 = 0.0;     // moment of the zero section (0 at the origin of C^n)
    double mu = 0.5;
    double lambda = 1.0;   // core scale; the slope d tau / d rho at the core is mu a lambda^{a-1}
    double x1 = 0.0;
    double width = 6.0;
    bool flat = false;     // exact c omega_0, no glue
};

class BackgroundMetric {
public:
    BackgroundMetric() = default;
    BackgroundMetric(const ConeSpec& spec, const GlueParams& p);

    const ConeSpec& spec() const { return spec_; }
    const GlueParams& params() const { return p_; }

    // reduced potential u_bg, and u_bg - u_end with u_end = c rho^a/2 - kappa x
    Jet4 potential(double x) const;
    Jet4 potential_minus_end(double x) const;
    static Jet4 end_potential(const ConeSpec& s, double x);

    // first x beyond which the background is exactly conical-minus-Ricci
    double x_glue() const;
    // tau and its derivatives, tau - tau_end and its derivatives (jets in x)
    Jet4 moment(double x) const;
    Jet4 moment_minus_end(double x) const;

    // node caches (filled by sample)
    void sample(const RadialGrid& g);
    const RadialGrid& grid() const { return grid_; }
    std::vector<double> u, tau, tau_x, tau_xx, tau_xxx;
    std::vector<double> dtau_end, dtau_end_x;   // tau_bg - tau_end and its x-derivative
    std::vector<double> du_end;                  // u_bg - u_end
    MetricProfile metric;

private:
    ConeSpec spec_;
    GlueParams p_;
    RadialGrid grid_;
    double u_x1_ = 0;   // u - u_end at x1
    double blend_integral(double x) const;   // int_{max(x, x1)}^{x_glue} (tau - tau_end)
};

struct GlueSearch {
    double mismatch_factor = 8.0;   // tau_core' >= factor |tau_end - tau_core| / width at x1
    int shifts = 16;                // x1 moves right by width/2 while positivity fails
    int check_density = 8;          // extra positivity samples per cell
};

// core_slope > 0 sets lambda so that d tau / d rho matches it at the core (a != 1)
BackgroundMetric build_background(const ConeSpec& spec, const RadialGrid& grid, const GlueSearch& search = {},
                                  double core_slope = 0.0);

// F with the componentwise check; throws InconsistentBackgroundError beyond tol
RHSProfile build_rhs(const ConeSpec& spec, const RadialGrid& grid, const BackgroundMetric& bg, double tol = -1.0);

// closed-form F on the conical end, tends to 0 at infinity
double rhs_end(const ConeSpec& s, double x);

// C-infinity step: 0 below 0, 1 above 1
Jet4 smoothstep(const Jet4& s);

} // namespace acs
