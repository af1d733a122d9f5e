#include "acs/background.hpp"
#include "acs/errors.hpp"
#include "acs/reduction.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace acs {

Jet4 smoothstep(const Jet4& s) {
    if (s.value() <= 0.0) return Jet4(0.0);
    if (s.value() >= 1.0) return Jet4(1.0);
    const Jet4 p = exp(-1.0 / s), q = exp(-1.0 / (1.0 - s));
    return p / (p + q);
}

BackgroundMetric::BackgroundMetric(const ConeSpec& spec, const GlueParams& p) : spec_(spec), p_(p) {
    if (!p_.flat) u_x1_ = -blend_integral(p_.x1);
}

namespace {

// composite 20-point Gauss on panels no wider than 0.25
template <class F>
double panels(F&& f, double lo, double hi) {
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    if (!(hi > lo)) return 0.0;
    const int n = std::max(1, int(std::ceil((hi - lo) / 0.25)));
    const double step = (hi - lo) / n;
    double s = 0;
    for (int i = 0; i < n; ++i) s += Gauss::integrate(f, lo + i * step, lo + (i + 1) * step);
    return s;
}

Jet4 lift(double value, const Jet4& m) {
    Jet4 u(value);
    for (std::size_t k = 1; k <= 4; ++k) u.c[k] = m.c[k - 1] / double(k);
    return u;
}

} // namespace

Jet4 BackgroundMetric::end_potential(const ConeSpec& s, double x) {
    const Jet4 X = Jet4::variable(x);
    return 0.5 * s.c * exp(s.a * X) - s.kappa() * X;
}

Jet4 BackgroundMetric::moment(double x) const {
    const double a = spec_.a, c = spec_.c;
    const Jet4 X = Jet4::variable(x);
    const Jet4 te = 0.5 * a * c * exp(a * X) - spec_.kappa();
    if (p_.flat || x >= x_glue()) return te;
    const Jet4 tc = p_.tau0 + p_.mu * (exp(a * log(p_.lambda + exp(X))) - std::pow(p_.lambda, a));
    if (x <= p_.x1) return tc;
    return tc + smoothstep((X - p_.x1) / p_.width) * (te - tc);
}

Jet4 BackgroundMetric::moment_minus_end(double x) const {
    if (p_.flat || x >= x_glue()) return Jet4(0.0);
    const double a = spec_.a, c = spec_.c;
    const Jet4 X = Jet4::variable(x);
    const Jet4 d = (p_.tau0 + spec_.kappa()) + p_.mu * (exp(a * log(p_.lambda + exp(X))) - std::pow(p_.lambda, a)) -
                   0.5 * a * c * exp(a * X);
    if (x <= p_.x1) return d;
    return (1.0 - smoothstep((X - p_.x1) / p_.width)) * d;
}

double BackgroundMetric::blend_integral(double x) const {
    const double xg = x_glue();
    if (x >= xg) return 0.0;
    auto f = [this](double t) { return moment_minus_end(t).value(); };
    return panels(f, std::max(x, p_.x1), xg);
}

Jet4 BackgroundMetric::potential_minus_end(double x) const {
    if (p_.flat) return Jet4(0.0);
    double w;
    if (x >= p_.x1) {
        w = -blend_integral(x);
    } else {
        // tau - tau_end = tau0 + kappa + g, g -> 0 as x -> -infinity
        const double k0 = p_.tau0 + spec_.kappa();
        auto g = [this, k0](double t) { return moment_minus_end(t).value() - k0; };
        w = u_x1_ - k0 * (p_.x1 - x) - panels(g, x, p_.x1);
    }
    return lift(w, moment_minus_end(x));
}

Jet4 BackgroundMetric::potential(double x) const {
    if (p_.flat) return end_potential(spec_, x);
    const double w = potential_minus_end(x).value();
    return lift(end_potential(spec_, x).value() + w, moment(x));
}

double BackgroundMetric::x_glue() const {
    if (p_.flat) return -std::numeric_limits<double>::infinity();
    return p_.x1 + p_.width;
}

void BackgroundMetric::sample(const RadialGrid& g) {
    grid_ = g;
    const int N = g.N;
    u.assign(N, 0);
    tau.assign(N, 0);
    tau_x.assign(N, 0);
    tau_xx.assign(N, 0);
    tau_xxx.assign(N, 0);
    dtau_end.assign(N, 0);
    dtau_end_x.assign(N, 0);
    metric.alpha.assign(N, 0);
    metric.beta.assign(N, 0);
    metric.source = MetricSource::Background;
    du_end.assign(N, 0);
    const double xg = x_glue();
    grid_.j_glue = N;
    // u - u_end = -int_x^{x_glue} (tau - tau_end), accumulated cell by cell from the right
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    auto dm = [this](double t) { return moment_minus_end(t).value(); };
    if (!p_.flat) {
        int j = N - 1;
        while (j > 0 && g.x(j) >= xg) --j;
        double w = -Gauss::integrate(dm, g.x(j), xg);
        du_end[j] = w;
        for (--j; j >= 0; --j) {
            w -= Gauss::integrate(dm, g.x(j), g.x(j + 1));
            du_end[j] = w;
        }
    }
    for (int j = 0; j < N; ++j) {
        const double x = g.x(j);
        const Jet4 J = moment(x);
        const Jet4 D = moment_minus_end(x);
        u[j] = end_potential(spec_, x).value() + du_end[j];
        tau[j] = J.d(0);
        tau_x[j] = J.d(1);
        tau_xx[j] = J.d(2);
        tau_xxx[j] = J.d(3);
        dtau_end[j] = D.d(0);
        dtau_end_x[j] = D.d(1);
        const double ex = std::exp(-x);
        if (p_.flat || x >= xg) {
            const double ea = std::exp((spec_.a - 1.0) * x), ac = 0.5 * spec_.a * spec_.c;
            metric.alpha[j] = ac * ea - spec_.kappa() * ex;
            metric.beta[j] = spec_.a * ac * ea;
        } else {
            metric.alpha[j] = tau[j] * ex;
            metric.beta[j] = tau_x[j] * ex;
        }
        if (grid_.j_glue == N && x >= xg) grid_.j_glue = j;
    }
}

namespace {

// first failing sample, or -1
int positivity_failure(const BackgroundMetric& bg, const RadialGrid& g, int density, double x_hi) {
    const double step = g.h() / double(density);
    const int count = int(std::ceil((std::min(x_hi, g.x_max) - g.x_min) / step)) + 1;
    for (int i = 0; i < count; ++i) {
        const double x = std::min(g.x_min + step * double(i), g.x_max);
        const Jet4 J = bg.moment(x);
        if (!(J.d(0) > 0.0) || !(J.d(1) > 0.0)) return int(std::floor((x - g.x_min) / g.h()));
    }
    return -1;
}

} // namespace

BackgroundMetric build_background(const ConeSpec& spec, const RadialGrid& grid, const GlueSearch& search,
                                  double core_slope) {
    spec.validate();
    grid.validate();
    GlueParams p;
    if (spec.kind == ConeKind::EuclideanResolution && spec.a == 1.0) {
        p.flat = true;
        BackgroundMetric bg(spec, p);
        bg.sample(grid);
        return bg;
    }
    const double a = spec.a, c = spec.c;
    p.mu = 0.5 * a * c;
    if (spec.kind == ConeKind::LineBundle)
        p.tau0 = spec.tau0_star() > 0.0 ? spec.tau0_star() : 1.0 / spec.base_curvature_scale;
    if (core_slope > 0.0 && a != 1.0) p.lambda = std::pow(core_slope / (p.mu * a), 1.0 / (a - 1.0));
    const double la = std::pow(p.lambda, a);

    // first x1 where the core slope dominates the constant mismatch of the two moment profiles
    auto ready = [&](double x) {
        const double rho = std::exp(x);
        const double slope = p.mu * a * rho * std::pow(p.lambda + rho, a - 1.0);
        const double te = 0.5 * a * c * std::pow(rho, a) - spec.kappa();
        const double tc = p.tau0 + p.mu * (std::pow(p.lambda + rho, a) - la);
        return te > 0.0 && slope * p.width >= search.mismatch_factor * std::abs(te - tc);
    };
    double x1 = grid.x_min + 4.0;
    while (!ready(x1) && x1 + p.width < grid.x_max - 4.0) x1 += 0.25;

    int worst = -1;
    for (int i = 0; i <= search.shifts; ++i, x1 += 0.5 * p.width) {
        p.x1 = x1;
        if (x1 + p.width > grid.x_max - 4.0) break;
        BackgroundMetric bg(spec, p);
        const int bad = positivity_failure(bg, grid, search.check_density, bg.x_glue() + grid.h());
        if (bad < 0) {
            bg.sample(grid);
            return bg;
        }
        worst = bad;
    }
    throw ConstructionError("no glue position gives a Kaehler background; first violation at node " +
                                std::to_string(worst),
                            worst);
}

double rhs_end(const ConeSpec& s, double x) {
    const double tc = 0.5 * s.a * std::exp(s.a * x);
    return -double(s.nb()) * std::log1p(-s.kappa() / (s.c * tc));
}

RHSProfile build_rhs(const ConeSpec& spec, const RadialGrid& grid, const BackgroundMetric& bg, double tol) {
    const RadialGrid& g = bg.grid();
    if (g.N != grid.N || g.x_min != grid.x_min || g.x_max != grid.x_max)
        throw InconsistentBackgroundError("background sampled on a different grid");
    const int N = g.N;
    const int nb = spec.nb();
    const double q = spec.q(), a = spec.a;
    if (g.j_glue >= N - 8) throw InconsistentBackgroundError("glue radius too close to x_max");

    auto formula = [&](int j) {
        const double P = nb * std::log(bg.tau[j]) + std::log(bg.tau_x[j]) - q * g.x(j);
        return -P + bg.u[j] - bg.tau[j] / a;
    };
    RHSProfile R;
    R.F.assign(N, 0.0);
    const int jg = g.j_glue;
    R.C0 = rhs_end(spec, g.x(jg)) - formula(jg);
    for (int j = 0; j < N; ++j) R.F[j] = j < jg ? formula(j) + R.C0 : rhs_end(spec, g.x(j));

    // i ddbar F against rho_omega + omega - L_X omega / 2, both components
    Derivs D(g);
    const auto Fx = D.D1.apply(R.F);
    const auto Fxx = D.D2.apply(R.F);
    double err = 0;
    for (int j = 4; j < N - 4; ++j) {
        const double t = bg.tau[j], t1 = bg.tau_x[j], t2 = bg.tau_xx[j], t3 = bg.tau_xxx[j];
        const double Px = nb * t1 / t + t2 / t1 - q;
        const double Pxx = nb * (t2 / t - t1 * t1 / (t * t)) + t3 / t1 - t2 * t2 / (t1 * t1);
        const double Ta = -Px + t - t1 / a;
        const double Tb = -Pxx + t1 - t2 / a;
        err = std::max(err, std::abs(Fx[j] - Ta) / t);
        err = std::max(err, std::abs(Fxx[j] - Tb) / t1);
    }
    R.component_error = err;
    if (tol < 0) tol = 10.0 * g.h() * g.h();
    if (!(err <= tol))
        throw InconsistentBackgroundError("i ddbar F mismatch " + std::to_string(err) + " exceeds " +
                                          std::to_string(tol));

    R.norms = weighted_norms(spec, g, R.F);
    R.leading_expected = cone_profile_eval(spec, 1.0).scal0 / (2.0 * spec.c);
    const double span = (2.0 / a) * std::log(10.0);
    double acc = 0;
    int cnt = 0;
    for (int j = 0; j < N; ++j) {
        const double x = g.x(j);
        if (x >= g.x_max - 2.0 - span && x <= g.x_max - 2.0) {
            acc += R.F[j] * std::exp(a * x);
            ++cnt;
        }
    }
    R.leading_coeff = cnt ? acc / cnt : 0.0;
    return R;
}

} // namespace acs
