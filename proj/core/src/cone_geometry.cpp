#include "acs/cone_geometry.hpp"
#include "acs/errors.hpp"

#include <cmath>
#include <sstream>

namespace acs {

ConeSpec ConeSpec::euclidean(int n, double a, double c) {
    ConeSpec s;
    s.kind = ConeKind::EuclideanResolution;
    s.n = n;
    s.a = a;
    s.c = c;
    s.base_curvature_scale = 1.0;
    return s;
}

ConeSpec ConeSpec::line_bundle(int m, int k, double a, double c) {
    ConeSpec s;
    s.kind = ConeKind::LineBundle;
    s.m = m;
    s.k = k;
    s.a = a;
    s.c = c;
    s.base_curvature_scale = double(k);
    return s;
}

bool ConeSpec::admits_soliton() const {
    if (kind == ConeKind::EuclideanResolution) return true;
    return k > m;
}

void ConeSpec::validate() const {
    if (!(a > 0.0 && a <= 1.0)) throw ValidationError("cone exponent a must lie in (0,1]");
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("soliton scale c must be positive");
    if (!(base_curvature_scale > 0.0)) throw ValidationError("base_curvature_scale must be positive");
    if (kind == ConeKind::EuclideanResolution) {
        if (n < 1) throw ValidationError("n must be >= 1");
    } else {
        if (m < 2) throw ValidationError("m must be >= 2");
        if (k < 1) throw ValidationError("k must be >= 1");
    }
}

std::string ConeSpec::describe() const {
    std::ostringstream os;
    if (kind == ConeKind::EuclideanResolution)
        os << "C^" << n;
    else
        os << "O(-" << k << ")->P^" << (m - 1);
    os << " a=" << a << " c=" << c;
    return os.str();
}

bool operator==(const ConeSpec& s, const ConeSpec& t) {
    if (s.kind != t.kind || s.a != t.a || s.c != t.c || s.base_curvature_scale != t.base_curvature_scale)
        return false;
    if (s.kind == ConeKind::EuclideanResolution) return s.n == t.n;
    return s.m == t.m && s.k == t.k;
}

ConeProfile cone_profile_eval(const ConeSpec& spec, double rho) {
    spec.validate();
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive");
    const double a = spec.a;
    const double ra = std::pow(rho, a);
    // tau = (a/2) rho^a, tau_x = a tau
    ConeProfile p;
    p.alpha0 = 0.5 * a * ra / rho;
    p.beta0 = a * p.alpha0;
    p.det0 = std::pow(p.alpha0, spec.nb()) * p.beta0;
    // -log det0 = (q - dim*a) x + const  ->  i ddbar gives kappa/rho on the base block
    p.ricci_alpha0 = spec.kappa() / rho;
    p.ricci_beta0 = 0.0;
    p.scal0 = 2.0 * (spec.nb() * p.ricci_alpha0 / p.alpha0 + p.ricci_beta0 / p.beta0);
    return p;
}

ConeSpec cone_path(const ConeSpec& s0, const ConeSpec& s1, double t) {
    s0.validate();
    s1.validate();
    bool same = s0.kind == s1.kind && s0.c == s1.c &&
                (s0.kind == ConeKind::EuclideanResolution ? s0.n == s1.n : (s0.m == s1.m && s0.k == s1.k));
    if (!same) throw IncompatibleFamilyError("cone_path endpoints differ in kind, dimension, k or c");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("cone_path parameter outside [0,1]");
    if (t == 0.0) return s0;
    if (t == 1.0) return s1;
    ConeSpec s = s0;
    s.a = (1.0 - t) * s0.a + t * s1.a;
    s.base_curvature_scale = (1.0 - t) * s0.base_curvature_scale + t * s1.base_curvature_scale;
    return s;
}

} // namespace acs
