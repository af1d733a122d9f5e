#pragma once
#include <cstddef>
#include <vector>

namespace acs {

enum class MetricSource { Background, Solved };

// eigenvalues of omega_phi relative to i ddbar rho
struct MetricProfile {
    std::vector<double> alpha, beta;
    MetricSource source = MetricSource::Background;
};

// ZeroSectionDrift also admits phi ~ x, moving the class of the zero section along the path
enum class ClosureKind { Origin, ZeroSection, ZeroSectionDrift };

// phi_j = offset + phi[j]; the constant part is kept apart so that small variations near the
// core are not swamped by rounding
struct PotentialProfile {
    std::vector<double> phi;
    double offset = 0.0;
    ClosureKind closure = ClosureKind::Origin;
    double decay_order = 1.0;   // phi = O(rho^-decay_order) imposed at x_max

    double value(std::size_t j) const { return offset + phi[j]; }
    std::vector<double> values() const {
        std::vector<double> v(phi);
        for (double& t : v) t += offset;
        return v;
    }
    // moves phi[ref] into the offset
    void recenter(std::size_t ref = 0) {
        const double s = phi[ref];
        offset += s;
        for (double& t : phi) t -= s;
    }
};

struct WeightedNorms {
    double c0 = 0, c0_f = 0, c0_rad = 0, c0_rad_f = 0;
};

struct RHSProfile {
    std::vector<double> F;
    WeightedNorms norms;
    double C0 = 0;                 // additive normalization
    double leading_coeff = 0;      // mean of F rho^a on the outer decade
    double leading_expected = 0;   // s_{omega_0}(1) / (2c)
    double component_error = 0;    // worst relative mismatch of i ddbar F
};

} // namespace acs
