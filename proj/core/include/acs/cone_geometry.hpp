#pragma once
// Regular Kaehler cones C^n and O(-k) -> P^{m-1}, radius r^2 = rho^a.

#include <string>

namespace acs {

enum class ConeKind { EuclideanResolution, LineBundle };

struct ConeSpec {
    ConeKind kind = ConeKind::EuclideanResolution;
    int n = 2;   // complex dimension (EuclideanResolution)
    int m = 2;   // base P^{m-1}, total dimension m (LineBundle)
    int k = 1;   // twist of O(-k)
    double a = 1.0;
    double c = 1.0;
    // i ddbar log h = base_curvature_scale * omega_FS
    double base_curvature_scale = 1.0;

    static ConeSpec euclidean(int n, double a, double c);
    static ConeSpec line_bundle(int m, int k, double a, double c);

    int dim() const { return kind == ConeKind::EuclideanResolution ? n : m; }
    int nb() const { return dim() - 1; }
    // Ric(omega_FS-part) slope: rho_omega = -i ddbar[log(tau^nb tau_x) - q x]
    double q() const { return double(dim()) / base_curvature_scale; }
    // rho_{omega_0} = kappa * i ddbar x
    double kappa() const { return q() - double(dim()) * a; }
    // moment of the zero section required for a smooth soliton
    double tau0_star() const { return kind == ConeKind::EuclideanResolution ? 0.0 : 1.0 - q(); }

    bool admits_soliton() const;
    void validate() const;
    std::string describe() const;
};

bool operator==(const ConeSpec& s, const ConeSpec& t);

struct ConeProfile {
    double alpha0, beta0, det0;
    double ricci_alpha0, ricci_beta0;
    double scal0;
};

// weights: alpha0, beta0 ~ rho^{a-1}, det0 ~ rho^{n(a-1)}, ricci_alpha0 ~ rho^-1, scal0 ~ rho^-a
ConeProfile cone_profile_eval(const ConeSpec& spec, double rho);

ConeSpec cone_path(const ConeSpec& s0, const ConeSpec& s1, double t);

} // namespace acs
