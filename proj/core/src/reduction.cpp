#include "acs/reduction.hpp"
#include "acs/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace acs {

std::vector<double> weight_f(const ConeSpec& spec, const RadialGrid& g) {
    std::vector<double> f(g.N);
    for (int j = 0; j < g.N; ++j) f[j] = std::max(1.0, 0.5 * std::exp(spec.a * g.x(j)));
    return f;
}

WeightedNorms weighted_norms(const ConeSpec& spec, const RadialGrid& g, const std::vector<double>& phi) {
    DiffOp D1(g, 1);
    const auto f = weight_f(spec, g);
    WeightedNorms w;
    for (int j = 0; j < g.N; ++j) {
        const double Xphi = (2.0 / spec.a) * D1.apply_at(phi, j);
        w.c0 = std::max(w.c0, std::abs(phi[j]));
        w.c0_f = std::max(w.c0_f, f[j] * std::abs(phi[j]));
        w.c0_rad = std::max(w.c0_rad, std::abs(Xphi));
        w.c0_rad_f = std::max(w.c0_rad_f, f[j] * std::abs(Xphi));
    }
    return w;
}

ClosureKind closure_for(const ConeSpec& spec) {
    if (spec.kind == ConeKind::EuclideanResolution) return ClosureKind::Origin;
    return spec.tau0_star() > 0.0 ? ClosureKind::ZeroSection : ClosureKind::ZeroSectionDrift;
}

PotentialProfile zero_potential(const ConeSpec& spec, const RadialGrid& g) {
    PotentialProfile p;
    p.phi.assign(g.N, 0.0);
    p.closure = closure_for(spec);
    p.decay_order = spec.a;
    return p;
}

MomentProfile moments(const BackgroundMetric& bg, const Derivs& D, const std::vector<double>& phi) {
    const int N = int(phi.size());
    MomentProfile m;
    m.tau.resize(N);
    m.tau_x.resize(N);
    for (int j = 0; j < N; ++j) {
        m.tau[j] = bg.tau[j] + D.D1.apply_at(phi, j);
        m.tau_x[j] = bg.tau_x[j] + D.D2.apply_at(phi, j);
    }
    return m;
}

MetricProfile metric_of(const BackgroundMetric& bg, const Derivs& D, const std::vector<double>& phi) {
    const RadialGrid& g = bg.grid();
    MetricProfile mp;
    mp.source = MetricSource::Solved;
    mp.alpha.resize(g.N);
    mp.beta.resize(g.N);
    for (int j = 0; j < g.N; ++j) {
        const double ex = std::exp(-g.x(j));
        mp.alpha[j] = bg.metric.alpha[j] + D.D1.apply_at(phi, j) * ex;
        mp.beta[j] = bg.metric.beta[j] + D.D2.apply_at(phi, j) * ex;
    }
    return mp;
}

std::vector<double> ma_operator(const ConeSpec& spec, const BackgroundMetric& bg, const Derivs& D,
                                const std::vector<double>& phi, double offset) {
    const int N = int(phi.size());
    const int nb = spec.nb();
    const double inva = 1.0 / spec.a;
    std::vector<double> r(N);
    for (int j = 0; j < N; ++j) {
        const double px = D.D1.apply_at(phi, j);
        const double pxx = D.D2.apply_at(phi, j);
        const double ua = px / bg.tau[j];
        const double ub = pxx / bg.tau_x[j];
        if (!(ua > -1.0) || !(ub > -1.0))
            throw NonKahlerError("omega_phi not positive at node " + std::to_string(j), j);
        r[j] = nb * std::log1p(ua) + std::log1p(ub) + px * inva - (offset + phi[j]);
    }
    return r;
}

std::vector<double> ma_operator(const ConeSpec& spec, const RadialGrid& grid, const BackgroundMetric& bg,
                                const PotentialProfile& phi) {
    if (int(phi.phi.size()) != grid.N || bg.grid().N != grid.N) throw DomainError("profile size mismatch");
    Derivs D(grid);
    return ma_operator(spec, bg, D, phi.phi, phi.offset);
}

namespace {

void check_state(const MetricProfile& s) {
    for (std::size_t j = 0; j < s.alpha.size(); ++j)
        if (!(s.alpha[j] > 0.0) || !(s.beta[j] > 0.0))
            throw NonKahlerError("metric state not positive at node " + std::to_string(j), int(j));
}

} // namespace

std::vector<double> linearized_apply(const ConeSpec& spec, const RadialGrid& grid, const MetricProfile& state,
                                     const PotentialProfile& psi) {
    check_state(state);
    DiffOp D1(grid, 1), D2(grid, 2);
    const int nb = spec.nb();
    std::vector<double> out(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const double px = D1.apply_at(psi.phi, j);
        const double pxx = D2.apply_at(psi.phi, j);
        const double ex = std::exp(-grid.x(j));
        out[j] = ex * (nb * px / state.alpha[j] + pxx / state.beta[j]) + px / spec.a - psi.value(j);
    }
    return out;
}

BandedMatrix assemble_linearized(const ConeSpec& spec, const RadialGrid& grid, const MetricProfile& state,
                                 const Derivs& D, int kl, int ku) {
    check_state(state);
    const int N = grid.N;
    const int nb = spec.nb();
    BandedMatrix A(N, kl, ku);
    for (int j = 0; j < N; ++j) {
        const double ex = std::exp(-grid.x(j));
        const double c1 = ex * nb / state.alpha[j] + 1.0 / spec.a;
        const double c2 = ex / state.beta[j];
        const Stencil& s1 = D.D1.row(j);
        const Stencil& s2 = D.D2.row(j);
        for (std::size_t i = 0; i < s1.w.size(); ++i) A.at(j, s1.first + int(i)) += c1 * s1.w[i];
        for (std::size_t i = 0; i < s2.w.size(); ++i) A.at(j, s2.first + int(i)) += c2 * s2.w[i];
        A.at(j, j) -= 1.0;
    }
    return A;
}

std::vector<double> second_variation_check(const ConeSpec& spec, const RadialGrid& grid,
                                           const MetricProfile& state, const PotentialProfile& psi) {
    check_state(state);
    DiffOp D1(grid, 1), D2(grid, 2);
    const int nb = spec.nb();
    std::vector<double> out(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const double ex = std::exp(-grid.x(j));
        const double ea = ex * D1.apply_at(psi.phi, j) / state.alpha[j];
        const double eb = ex * D2.apply_at(psi.phi, j) / state.beta[j];
        out[j] = -(nb * ea * ea + eb * eb);
    }
    return out;
}

TaylorCheck taylor_identity_check(const ConeSpec& spec, const RadialGrid& grid, const BackgroundMetric& bg,
                                  const PotentialProfile& phi) {
    using Gauss = boost::math::quadrature::gauss<double, 8>;
    Derivs D(grid);
    const int nb = spec.nb();
    const auto ma = ma_operator(spec, bg, D, phi.phi, phi.offset);
    TaylorCheck tc;
    tc.residual.resize(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const double t = bg.tau[j], t1 = bg.tau_x[j];
        const double px = D.D1.apply_at(phi.phi, j), pxx = D.D2.apply_at(phi.phi, j);
        for (double end : {t + px, t1 + pxx})
            if (!(end > 0.0)) {
                const double sig = end == t + px ? -t / px : -t1 / pxx;
                throw NonKahlerError("positivity lost along sigma=" + std::to_string(sig) + " at node " +
                                         std::to_string(j),
                                     j);
            }
        auto norm2 = [&](double sigma) {
            const double ea = px / (t + sigma * px), eb = pxx / (t1 + sigma * pxx);
            return nb * ea * ea + eb * eb;
        };
        const double dbl = Gauss::integrate(
            [&](double tt) { return tt * Gauss::integrate([&](double s) { return norm2(tt * s); }, 0.0, 1.0); },
            0.0, 1.0);
        const double lin = nb * px / t + pxx / t1 + px / spec.a - phi.value(j);
        tc.residual[j] = ma[j] - (lin - dbl);
        tc.max_abs = std::max(tc.max_abs, std::abs(tc.residual[j]));
    }
    return tc;
}

Stencil core_closure(const RadialGrid& g, ClosureKind kind) {
    // discrete kernel exactly {1, rho, rho^2, rho^3}, plus x when the section class drifts
    const int nf = kind == ClosureKind::ZeroSectionDrift ? 5 : 4;
    const int width = nf + 1;
    const double h = g.h();
    Eigen::MatrixXd A(nf, width);
    for (int i = 0; i < width; ++i) {
        for (int k = 0; k < 4; ++k) A(k, i) = std::exp(double(k * i) * h);
        if (nf == 5) A(4, i) = double(i) * h;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd w = lu.kernel().col(0);
    // same scale as a 4th difference
    w *= std::pow(h, -4) / w.cwiseAbs().maxCoeff();
    Stencil s{0, std::vector<double>(width)};
    for (int i = 0; i < width; ++i) s.w[i] = w(i);
    return s;
}

Stencil far_closure(const RadialGrid& g, double decay_order) {
    return boundary_operator(g, {decay_order, 1.0}, false, 5);
}

RicciData ricci_data(const ConeSpec& spec, const RadialGrid& grid, const MetricProfile& m, int stride) {
    const int N = grid.N;
    const int nb = spec.nb();
    DiffOp D1(grid, 1, stride), D2(grid, 2, stride);
    std::vector<double> la(N), lb(N);
    for (int j = 0; j < N; ++j) {
        la[j] = std::log(m.alpha[j] / m.alpha[0]);
        lb[j] = std::log(m.beta[j] / m.beta[0]);
    }
    RicciData r;
    r.la_x = D1.apply(la);
    r.lb_x = D1.apply(lb);
    const auto la_xx = D2.apply(la), lb_xx = D2.apply(lb);
    const double shift = double(spec.dim()) - spec.q();
    r.tau.resize(N);
    r.tau_x.resize(N);
    r.P_x.resize(N);
    r.P_xx.resize(N);
    r.s.resize(N);
    for (int j = 0; j < N; ++j) {
        const double ex = std::exp(grid.x(j));
        r.tau[j] = m.alpha[j] * ex;
        r.tau_x[j] = m.beta[j] * ex;
        r.P_x[j] = nb * r.la_x[j] + r.lb_x[j] + shift;
        r.P_xx[j] = nb * la_xx[j] + lb_xx[j];
        r.s[j] = -2.0 * (nb * r.P_x[j] / r.tau[j] + r.P_xx[j] / r.tau_x[j]);
    }
    r.s_x = D1.apply(r.s);
    return r;
}

} // namespace acs
