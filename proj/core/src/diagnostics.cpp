#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"
#include "acs/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace acs {

Window interior_window(const RadialGrid& g) {
    Window w{g.N, -1};
    for (int j = 0; j < g.N; ++j) {
        const double x = g.x(j);
        if (x >= g.x_min + 2.0 - 1e-12 && x <= g.x_max - 2.0 + 1e-12) {
            w.lo = std::min(w.lo, j);
            w.hi = std::max(w.hi, j);
        }
    }
    return w;
}

SolitonResiduals soliton_residuals(const SolitonSolution& sol) {
    const ConeSpec& spec = sol.spec;
    const RadialGrid& g = sol.grid;
    // log alpha, log beta differenced over a spacing near 0.035
    const int stride = std::max(1, int(std::lround(0.035 / g.h())));
    const auto rd = ricci_data(spec, g, sol.metric, stride);
    const auto ex = gradient_excess(spec, sol.bg, sol.phi);
    const double a = spec.a;
    const int nb = spec.nb();
    const Window w = interior_window(g);
    SolitonResiduals r;
    double nmin = std::numeric_limits<double>::infinity(), nmax = -nmin;
    for (int j = w.lo; j <= w.hi; ++j) {
        const double al = sol.metric.alpha[j], be = sol.metric.beta[j];
        const double ga = -rd.P_x[j] / rd.tau[j] - be / (a * al) + 1.0;
        const double gb = -rd.P_xx[j] / rd.tau_x[j] - (1.0 + rd.lb_x[j]) / a + 1.0;
        r.soliton_alpha = std::max(r.soliton_alpha, std::abs(ga));
        r.soliton_beta = std::max(r.soliton_beta, std::abs(gb));
        const double lap_f = (nb * (1.0 + rd.la_x[j]) + (1.0 + rd.lb_x[j])) / a;
        r.trace = std::max(r.trace, std::abs(lap_f - 0.5 * rd.s[j] - double(spec.dim())));
        r.first_order = std::max(r.first_order, std::abs(rd.s_x[j] - 2.0 * rd.P_xx[j] / a));
        const double nv = ex[j] + 0.5 * rd.s[j] - sol.f_const;
        nmin = std::min(nmin, nv);
        nmax = std::max(nmax, nv);
        r.normalization_value = nv;
    }
    r.normalization_variation = nmax - nmin;
    return r;
}

namespace {

struct LineFit {
    double slope = 0, r2 = 0;
};

LineFit least_squares(const std::vector<double>& X, const std::vector<double>& Y) {
    const double n = double(X.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sx += X[i];
        sy += Y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
        syy += (Y[i] - my) * (Y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

} // namespace

DecayFit decay_rate_fit(const SolitonSolution& sol) {
    const ConeSpec& spec = sol.spec;
    const RadialGrid& g = sol.grid;
    const double a = spec.a, c = spec.c;
    const int nb = spec.nb();
    DiffOp D1(g, 1), D2(g, 2);
    const auto px = D1.apply(sol.phi.phi), pxx = D2.apply(sol.phi.phi);
    DecayFit fit;
    fit.x_hi = g.x_max - 2.0;
    fit.x_lo = fit.x_hi - (2.0 / a) * std::log(10.0);
    std::vector<double> lr, l1, l2;
    for (int j = 0; j < g.N; ++j) {
        const double x = g.x(j);
        if (x < fit.x_lo || x > fit.x_hi) continue;
        const double ex = std::exp(-x);
        const double a0 = c * 0.5 * a * std::exp((a - 1.0) * x), b0 = a * a0;
        const double da = (sol.bg.dtau_end[j] + px[j]) * ex;
        const double db = (sol.bg.dtau_end_x[j] + pxx[j]) * ex;
        const double da_nr = da - spec.kappa() * ex;
        const double n1 = std::sqrt(nb * (da / a0) * (da / a0) + (db / b0) * (db / b0));
        const double n2 = std::sqrt(nb * (da_nr / a0) * (da_nr / a0) + (db / b0) * (db / b0));
        fit.max_difference = std::max(fit.max_difference, n1);
        if (!(n1 > 0.0) || !(n2 > 0.0)) continue;
        lr.push_back(0.5 * a * x);
        l1.push_back(std::log(n1));
        l2.push_back(std::log(n2));
    }
    fit.points = int(lr.size());
    if (fit.points < 4 || fit.max_difference < 1e-14) return fit;
    const auto f1 = least_squares(lr, l1);
    const auto f2 = least_squares(lr, l2);
    fit.defined = true;
    fit.rate = -f1.slope;
    fit.r2 = f1.r2;
    fit.rate_without_ricci = -f2.slope;
    fit.r2_without_ricci = f2.r2;
    return fit;
}

AprioriRecord apriori_check(const SolitonSolution& sol, const RHSProfile& F) {
    const ConeSpec& spec = sol.spec;
    const RadialGrid& g = sol.grid;
    const auto f = weight_f(spec, g);
    DiffOp D1(g, 1);
    const auto px = D1.apply(sol.phi.phi);
    AprioriRecord r;
    for (int j = 0; j < g.N; ++j) {
        const double p = sol.phi.value(j);
        r.sup_phi = std::max(r.sup_phi, std::abs(p));
        r.sup_F = std::max(r.sup_F, std::abs(F.F[j]));
        r.sup_f_phi = std::max(r.sup_f_phi, f[j] * std::abs(p));
        r.sup_X_phi = std::max(r.sup_X_phi, (2.0 / spec.a) * std::abs(px[j]));
        r.sup_f_drift = std::max(r.sup_f_drift, f[j] * std::abs(px[j] / spec.a - p));
        const double ra = sol.metric.alpha[j] / sol.bg.metric.alpha[j];
        const double rb = sol.metric.beta[j] / sol.bg.metric.beta[j];
        r.max_ratio = std::max({r.max_ratio, ra, 1.0 / ra, rb, 1.0 / rb});
    }
    const double big = std::numeric_limits<double>::max();
    r.checks.push_back({"sup|phi| <= sup|F|", r.sup_phi, r.sup_F, r.sup_phi <= r.sup_F + 1e-12});
    r.checks.push_back({"sup f|phi| finite", r.sup_f_phi, big, std::isfinite(r.sup_f_phi)});
    r.checks.push_back({"sup|X.phi| finite", r.sup_X_phi, big, std::isfinite(r.sup_X_phi)});
    r.checks.push_back({"sup f|X.phi/2 - phi| finite", r.sup_f_drift, big, std::isfinite(r.sup_f_drift)});
    r.checks.push_back({"metric ratio finite", r.max_ratio, big, std::isfinite(r.max_ratio)});
    r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const BoundCheck& b) { return b.pass; });
    return r;
}

std::vector<std::complex<double>> curvature_tensor(const MetricFn& gfn, const std::vector<double>& v,
                                                  double delta) {
    using cd = std::complex<double>;
    const int R = int(v.size());
    const int d = R / 2;
    const double off[4] = {-2, -1, 1, 2};
    const double w1[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
    const double w2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    const Eigen::MatrixXcd G0 = gfn(v);
    std::vector<double> p = v;
    auto at = [&](int a, double sa, int b, double sb) {
        p = v;
        p[a] += sa * delta;
        if (b >= 0) p[b] += sb * delta;
        return gfn(p);
    };
    std::vector<Eigen::MatrixXcd> dG(R, Eigen::MatrixXcd::Zero(d, d));
    std::vector<std::vector<Eigen::MatrixXcd>> ddG(R, std::vector<Eigen::MatrixXcd>(R, Eigen::MatrixXcd::Zero(d, d)));
    for (int a = 0; a < R; ++a) {
        Eigen::MatrixXcd vals[4];
        for (int s = 0; s < 4; ++s) vals[s] = at(a, off[s], -1, 0);
        for (int s = 0; s < 4; ++s) dG[a] += w1[s] * vals[s];
        dG[a] /= delta;
        ddG[a][a] = (w2[0] * vals[0] + w2[1] * vals[1] + w2[2] * G0 + w2[3] * vals[2] + w2[4] * vals[3]) /
                    (delta * delta);
        for (int b = a + 1; b < R; ++b) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
            for (int s = 0; s < 4; ++s)
                for (int t = 0; t < 4; ++t) acc += (w1[s] * w1[t]) * at(a, off[s], b, off[t]);
            ddG[a][b] = ddG[b][a] = acc / (delta * delta);
        }
    }
    const cd I(0, 1);
    const Eigen::MatrixXcd Gi = G0.inverse();
    std::vector<cd> Rt(std::size_t(d) * d * d * d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            const Eigen::MatrixXcd dk = 0.5 * (dG[2 * k] - I * dG[2 * k + 1]);
            const Eigen::MatrixXcd dl = 0.5 * (dG[2 * l] + I * dG[2 * l + 1]);
            const Eigen::MatrixXcd dkl = 0.25 * (ddG[2 * k][2 * l] + ddG[2 * k + 1][2 * l + 1] +
                                                 I * (ddG[2 * k][2 * l + 1] - ddG[2 * k + 1][2 * l]));
            const Eigen::MatrixXcd Rkl = -dkl + dk * Gi * dl;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) Rt[((std::size_t(i) * d + j) * d + k) * d + l] = Rkl(i, j);
        }
    return Rt;
}

std::vector<std::complex<double>> invariant_curvature_tensor(const std::vector<double>& v,
                                                            const std::array<double, 4>& jet) {
    using cd = std::complex<double>;
    const int d = int(v.size()) / 2;
    double rho = 0;
    for (double t : v) rho += t * t;
    const auto [t0, t1, t2, t3] = jet;
    const double e1 = 1.0 / rho, e2 = e1 * e1;
    // x-derivatives of A = tau e^{-x} and B = (tau_x - tau) e^{-2x}, then rho-derivatives
    const double A = t0 * e1, Ax = (t1 - t0) * e1, Axx = (t2 - 2.0 * t1 + t0) * e1;
    const double B = (t1 - t0) * e2, Bx = (t2 - 3.0 * t1 + 2.0 * t0) * e2;
    const double Bxx = (t3 - 5.0 * t2 + 8.0 * t1 - 4.0 * t0) * e2;
    const double A1 = Ax * e1, A2 = (Axx - Ax) * e2, B1 = Bx * e1, B2 = (Bxx - Bx) * e2;

    std::vector<cd> z(d), zb(d);
    for (int i = 0; i < d; ++i) {
        z[i] = cd(v[2 * i], v[2 * i + 1]);
        zb[i] = std::conj(z[i]);
    }
    Eigen::MatrixXcd G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = (i == j ? A : 0.0) + B * zb[i] * z[j];
    const Eigen::MatrixXcd Gi = G.inverse();
    auto dl_ = [](int i, int j) { return i == j ? 1.0 : 0.0; };
    std::vector<cd> Rt(std::size_t(d) * d * d * d);
    Eigen::MatrixXcd dk(d, d), dl(d, d), dkl(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    dk(i, j) = A1 * zb[k] * dl_(i, j) + B1 * zb[k] * zb[i] * z[j] + B * zb[i] * dl_(j, k);
                    dl(i, j) = A1 * z[l] * dl_(i, j) + B1 * z[l] * zb[i] * z[j] + B * dl_(i, l) * z[j];
                    dkl(i, j) = A2 * zb[k] * z[l] * dl_(i, j) + A1 * dl_(k, l) * dl_(i, j) +
                                B2 * z[l] * zb[k] * zb[i] * z[j] + B1 * dl_(k, l) * zb[i] * z[j] +
                                B1 * zb[k] * dl_(i, l) * z[j] + B1 * z[l] * zb[i] * dl_(j, k) +
                                B * dl_(i, l) * dl_(j, k);
                }
            const Eigen::MatrixXcd Rkl = -dkl + dk * Gi * dl;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) Rt[((std::size_t(i) * d + j) * d + k) * d + l] = Rkl(i, j);
        }
    return Rt;
}

std::vector<double> default_radii() { return {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}; }

namespace {

using cd = std::complex<double>;

// min of q over the g-unit vectors g-orthogonal to the columns of C (real 2d coordinates)
double constrained_min(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& M, const Eigen::MatrixXd& C) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::MatrixXd Linv = L.inverse();
    const Eigen::MatrixXd Qt = Linv * Q * Linv.transpose();
    const Eigen::MatrixXd Ct = L.transpose() * C;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Ct);
    const Eigen::MatrixXd Qh = qr.householderQ();
    const int k = int(C.cols());
    const Eigen::MatrixXd B = Qh.rightCols(Q.rows() - k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.transpose() * Qt * B);
    return es.eigenvalues().minCoeff();
}

CurvatureSample curvature_at(const SolitonSolution& sol, double x) {
    const ConeSpec& spec = sol.spec;
    const int d = spec.dim();
    const double rho = std::exp(x);
    CurvatureSample cs;
    cs.x = x;
    cs.r = std::exp(0.5 * spec.a * x);

    // generic point on the sphere of radius sqrt(rho)
    std::vector<double> v(2 * d, 0.0);
    double nrm = 0;
    for (int i = 0; i < d; ++i) {
        v[2 * i] = 1.0 / double(i + 1);
        v[2 * i + 1] = 0.5 / double(i + 1);
        nrm += v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1];
    }
    for (double& t : v) t *= std::sqrt(rho / nrm);

    const Jet4 J = sol.bg.moment(x);
    const auto pd = interpolate(sol.grid, sol.phi.phi, x, 4, 11);
    const double t0 = J.d(0) + pd[1], t1 = J.d(1) + pd[2];
    const auto R = invariant_curvature_tensor(v, {t0, t1, J.d(2) + pd[3], J.d(3) + pd[4]});
    Eigen::MatrixXcd G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const cd zi(v[2 * i], v[2 * i + 1]), zj(v[2 * j], v[2 * j + 1]);
            G(i, j) = (i == j ? t0 / rho : 0.0) + (t1 - t0) * std::conj(zi) * zj / (rho * rho);
        }
    auto Rat = [&](int i, int j, int k, int l) { return R[((std::size_t(i) * d + j) * d + k) * d + l]; };

    // unitary frame e_a = P_{ia} d_i
    Eigen::LLT<Eigen::MatrixXcd> llt(G);
    const Eigen::MatrixXcd L = llt.matrixL();
    const Eigen::MatrixXcd P = L.inverse().transpose();
    std::vector<cd> Rf(R.size(), cd(0));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    cd acc = 0;
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j)
                            for (int k = 0; k < d; ++k)
                                for (int l = 0; l < d; ++l)
                                    acc += P(i, a) * std::conj(P(j, b)) * P(k, c) * std::conj(P(l, e)) *
                                           Rat(i, j, k, l);
                    Rf[((std::size_t(a) * d + b) * d + c) * d + e] = acc;
                }

    // orthonormal basis of hermitian matrices
    std::vector<Eigen::MatrixXcd> H;
    for (int a = 0; a < d; ++a) {
        Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(d, d);
        E(a, a) = 1.0;
        H.push_back(E);
        for (int b = a + 1; b < d; ++b) {
            Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(d, d), A = S;
            S(a, b) = S(b, a) = 1.0 / std::sqrt(2.0);
            A(a, b) = cd(0, 1.0 / std::sqrt(2.0));
            A(b, a) = cd(0, -1.0 / std::sqrt(2.0));
            H.push_back(S);
            H.push_back(A);
        }
    }
    const int nh = int(H.size());
    Eigen::MatrixXd Q(nh, nh);
    for (int m = 0; m < nh; ++m)
        for (int n = 0; n < nh; ++n) {
            cd acc = 0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    for (int c = 0; c < d; ++c)
                        for (int e = 0; e < d; ++e)
                            acc += Rf[((std::size_t(a) * d + b) * d + c) * d + e] * H[m](a, b) * H[n](c, e);
            Q(m, n) = acc.real();
        }
    Q = 0.5 * (Q + Q.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    for (int i = 0; i < nh; ++i) cs.eigenvalues.push_back(es.eigenvalues()(i));
    cs.min_eigenvalue = es.eigenvalues().minCoeff();

    // radial quantities; X = xi + conj(xi), xi = z / a
    std::vector<cd> xi(d);
    for (int i = 0; i < d; ++i) xi[i] = cd(v[2 * i], v[2 * i + 1]) / spec.a;
    const Eigen::MatrixXcd Gi = G.transpose().inverse();
    Eigen::MatrixXcd Ric = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) Ric(i, j) += Gi(k, l) * Rat(i, j, k, l);

    auto Rfun = [&](const std::vector<cd>& u, const std::vector<cd>& w, const std::vector<cd>& y,
                    const std::vector<cd>& t) {
        cd acc = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        acc += Rat(i, j, k, l) * u[i] * std::conj(w[j]) * y[k] * std::conj(t[l]);
        return acc;
    };
    auto herm = [&](const Eigen::MatrixXcd& A, const std::vector<cd>& u, const std::vector<cd>& w) {
        cd acc = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) acc += A(i, j) * u[i] * std::conj(w[j]);
        return acc;
    };
    auto to_c = [&](const Eigen::VectorXd& u) {
        std::vector<cd> e(d);
        for (int i = 0; i < d; ++i) e[i] = cd(u(2 * i), u(2 * i + 1));
        return e;
    };
    auto qrad = [&](const std::vector<cd>& e) {
        return 2.0 * Rfun(xi, e, e, xi).real() - 2.0 * Rfun(xi, e, xi, e).real();
    };
    auto qric = [&](const std::vector<cd>& e) { return 4.0 * herm(Ric, e, e).real(); };
    auto qmet = [&](const std::vector<cd>& e) { return 2.0 * herm(G, e, e).real(); };

    const int R2 = 2 * d;
    auto polar = [&](auto&& q) {
        Eigen::MatrixXd B(R2, R2);
        for (int i = 0; i < R2; ++i)
            for (int j = 0; j < R2; ++j) {
                Eigen::VectorXd ei = Eigen::VectorXd::Unit(R2, i), ej = Eigen::VectorXd::Unit(R2, j);
                B(i, j) = 0.5 * (q(to_c(ei + ej)) - q(to_c(ei)) - q(to_c(ej)));
            }
        return Eigen::MatrixXd(0.5 * (B + B.transpose()));
    };
    const Eigen::MatrixXd Qr = polar(qrad), Qc = polar(qric), M = polar(qmet);
    Eigen::MatrixXd CX(R2, 1), CXJ(R2, 2);
    for (int i = 0; i < d; ++i) {
        CX(2 * i, 0) = CXJ(2 * i, 0) = xi[i].real();
        CX(2 * i + 1, 0) = CXJ(2 * i + 1, 0) = xi[i].imag();
        const cd jx = cd(0, 1) * xi[i];
        CXJ(2 * i, 1) = jx.real();
        CXJ(2 * i + 1, 1) = jx.imag();
    }
    const double r2 = std::pow(rho, spec.a);
    cs.radial_floor = r2 * constrained_min(Qr, M, CX);
    cs.transverse_floor = r2 * constrained_min(Qr, M, CXJ);
    cs.ricci_floor = r2 * constrained_min(Qc, M, CX);
    return cs;
}

} // namespace

CurvatureSpectrum curvature_spectrum(const SolitonSolution& sol, const std::vector<double>& radii,
                                     const CurvatureOptions& opt) {
    if (sol.spec.kind != ConeKind::EuclideanResolution)
        throw DomainError("curvature spectrum implemented for U(n)-invariant metrics on C^n");
    const RadialGrid& g = sol.grid;
    CurvatureSpectrum out;
    out.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const double x = (2.0 / sol.spec.a) * std::log(r);
        if (!(r > 0) || x < g.x_min + 2.0 || x > g.x_max - 2.0) {
            out.notes.push_back("radius " + std::to_string(r) + " skipped: outside the resolved window");
            continue;
        }
        out.samples.push_back(curvature_at(sol, x));
        out.min_eigenvalue = std::min(out.min_eigenvalue, out.samples.back().min_eigenvalue);
    }
    const double xhi = g.x_max - 2.0, xlo = xhi - (2.0 / sol.spec.a) * std::log(10.0);
    for (int i = 0; i < opt.outer_points; ++i) {
        const double x = xlo + (xhi - xlo) * double(i) / double(std::max(1, opt.outer_points - 1));
        out.outer.push_back(curvature_at(sol, x));
    }
    out.positive = !out.samples.empty() && out.min_eigenvalue > 0.0;
    if (out.outer.size() >= 2) {
        Eigen::MatrixXd A(out.outer.size(), 2);
        Eigen::VectorXd yr(out.outer.size()), yt(out.outer.size());
        for (std::size_t i = 0; i < out.outer.size(); ++i) {
            const double r = out.outer[i].r;
            A.row(Eigen::Index(i)) << 1.0, 1.0 / (r * r);
            yr(Eigen::Index(i)) = out.outer[i].radial_floor;
            yt(Eigen::Index(i)) = out.outer[i].transverse_floor;
        }
        const auto qr = A.colPivHouseholderQr();
        out.radial_limit = qr.solve(yr)(0);
        out.transverse_limit = qr.solve(yt)(0);
    }
    double rmax = 0;
    for (const auto& c : out.outer) rmax = std::max(rmax, c.r);
    out.limit_threshold =
        std::max(opt.limit_floor, opt.limit_eps * rmax * rmax * std::max(1.0, std::abs(out.transverse_limit)));
    out.radial_limit_positive = out.radial_limit > out.limit_threshold;
    return out;
}

ChartCheck chart_oracle_check(const SolitonSolution& sol, int points, unsigned long long seed,
                              const ChartOracleOptions& opt) {
    const ConeSpec& spec = sol.spec;
    const RadialGrid& g = sol.grid;
    const int d = spec.dim();
    const Window w = interior_window(g);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> node(w.lo, w.hi);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Derivs D(g);
    const auto ma = ma_operator(spec, sol.bg, D, sol.phi.phi, sol.phi.offset);
    const auto vals = sol.phi.values();
    const std::function<double(double)> phi = [&](double x) { return interpolate(g, vals, x)[0]; };

    ChartCheck cc;
    cc.bound = 5.0 * g.h() * g.h();
    std::vector<ChartPoint> pts;
    std::vector<int> js;
    for (int i = 0; i < points; ++i) {
        const int j = node(rng);
        const double rho = std::exp(g.x(j));
        ChartPoint p;
        p.re.resize(d);
        p.im.resize(d);
        if (spec.kind == ConeKind::EuclideanResolution) {
            double nrm = 0;
            for (int k = 0; k < d; ++k) {
                p.re[k] = gauss(rng);
                p.im[k] = gauss(rng);
                nrm += p.re[k] * p.re[k] + p.im[k] * p.im[k];
            }
            const double s = std::sqrt(rho / nrm);
            for (int k = 0; k < d; ++k) p.re[k] *= s, p.im[k] *= s;
        } else {
            // base coordinates in the unit ball, fibre radius from rho = |xi|^2 (1 + |w|^2)^l
            double w2 = 0;
            for (int k = 0; k < d - 1; ++k) {
                p.re[k] = 0.5 * gauss(rng);
                p.im[k] = 0.5 * gauss(rng);
                w2 += p.re[k] * p.re[k] + p.im[k] * p.im[k];
            }
            const double xi = std::sqrt(rho / std::pow(1.0 + w2, spec.base_curvature_scale));
            const double th = 2.0 * std::numbers::pi * unif(rng);
            p.re[d - 1] = xi * std::cos(th);
            p.im[d - 1] = xi * std::sin(th);
        }
        pts.push_back(std::move(p));
        js.push_back(j);
    }
    const auto chart = full_chart_oracle(spec, sol.bg, phi, pts, opt);
    for (int i = 0; i < points; ++i) {
        ChartSample cs;
        cs.x = g.x(js[i]);
        cs.reduced = ma[js[i]];
        cs.chart = chart[i];
        cs.difference = std::abs(cs.reduced - cs.chart);
        cc.max_difference = std::max(cc.max_difference, cs.difference);
        cc.samples.push_back(cs);
    }
    cc.pass = cc.max_difference <= cc.bound;
    return cc;
}

namespace {

PotentialProfile random_seed_profile(const ConeSpec& spec, const BackgroundMetric& bg, std::mt19937_64& rng) {
    const RadialGrid& g = bg.grid();
    std::uniform_real_distribution<double> U(0.0, 1.0);
    PotentialProfile p = zero_potential(spec, g);
    for (int b = 0; b < 3; ++b) {
        const double c = g.x_min + 2.0 + U(rng) * (g.x_max - 8.0 - g.x_min);
        const double w = 0.5 + 1.5 * U(rng);
        const double A = 2.0 * U(rng) - 1.0;
        for (int j = 0; j < g.N; ++j) {
            const double s = (g.x(j) - c) / w;
            p.phi[j] += A * std::exp(-0.5 * s * s);
        }
    }
    double m = 0;
    for (double v : p.phi) m = std::max(m, std::abs(v));
    const double target = 0.1 * (0.5 + 0.5 * U(rng));
    for (double& v : p.phi) v *= target / m;
    Derivs D(g);
    for (int tries = 0; tries < 60; ++tries) {
        const auto mo = moments(bg, D, p.phi);
        bool ok = true;
        for (int j = 0; j < g.N && ok; ++j) ok = mo.tau[j] > 0.0 && mo.tau_x[j] > 0.0;
        if (ok) return p;
        for (double& v : p.phi) v *= 0.5;
    }
    return zero_potential(spec, g);
}

} // namespace

UniquenessRecord uniqueness_experiment(const ConeSpec& spec, const BackgroundMetric& bg, const SolverConfig& cfg,
                                       int seeds, unsigned long long seed, int threads) {
    UniquenessRecord rec;
    rec.seeds = seeds;
    if (seeds < 1) return rec;
    const RadialGrid& grid = bg.grid();
    const RHSProfile rhs = build_rhs(spec, grid, bg);

    std::vector<PotentialProfile> starts(seeds);
    rec.seed_sup.assign(seeds, 0.0);
    for (int i = 0; i < seeds; ++i) {
        if (i == 0) {
            starts[i] = zero_potential(spec, grid);
            continue;
        }
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (unsigned long long)i);
        starts[i] = random_seed_profile(spec, bg, rng);
        for (double v : starts[i].phi) rec.seed_sup[i] = std::max(rec.seed_sup[i], std::abs(v));
    }

    std::vector<std::optional<std::vector<double>>> result(seeds);
    std::vector<std::string> err(seeds);
    auto run = [&](int i) {
        try {
            if (i == 0) {
                result[i] = continuity_solve(spec, bg, rhs, cfg).phi.values();
                return;
            }
            try {
                result[i] = newton_solve(spec, bg, rhs.F, starts[i], cfg).values();
            } catch (const NoConvergenceError&) {
                result[i] = continuity_solve(spec, bg, rhs, cfg, &starts[i]).phi.values();
            } catch (const StepFailureError&) {
                result[i] = continuity_solve(spec, bg, rhs, cfg, &starts[i]).phi.values();
            }
        } catch (const std::exception& e) {
            err[i] = e.what();
        }
    };
    const int nt = std::max(1, std::min(threads, seeds));
    if (nt == 1) {
        for (int i = 0; i < seeds; ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (int i = t; i < seeds; i += nt) run(i);
            });
        for (auto& th : pool) th.join();
    }
    for (int i = 0; i < seeds; ++i) {
        if (result[i]) ++rec.succeeded;
        else rec.failures.push_back("seed " + std::to_string(i) + ": " + err[i]);
    }
    for (int i = 0; i < seeds; ++i)
        for (int k = i + 1; k < seeds; ++k) {
            if (!result[i] || !result[k]) continue;
            for (int j = 0; j < grid.N; ++j)
                rec.max_distance = std::max(rec.max_distance, std::abs((*result[i])[j] - (*result[k])[j]));
        }
    return rec;
}

DiagnosticsBundle run_diagnostics(const SolitonSolution& sol, const DiagnosticsOptions& opt) {
    DiagnosticsBundle b;
    b.solution_residual = interior_residual(sol.residual);
    b.residuals = soliton_residuals(sol);
    b.decay = decay_rate_fit(sol);
    b.apriori = apriori_check(sol, sol.rhs);
    if (opt.curvature && sol.spec.kind == ConeKind::EuclideanResolution)
        b.curvature = curvature_spectrum(sol, opt.curvature_radii);
    if (opt.uniqueness_seeds > 0)
        b.uniqueness = uniqueness_experiment(sol.spec, sol.bg, opt.cfg, opt.uniqueness_seeds, opt.seed, opt.threads);
    const auto& r = b.residuals;
    b.pass = b.apriori.pass &&
             std::max({r.soliton_alpha, r.soliton_beta, r.trace, r.first_order, r.normalization_variation}) <=
                 opt.identity_tol;
    if (b.curvature && sol.spec.a < 1.0) b.pass = b.pass && b.curvature->positive;
    if (b.uniqueness)
        b.pass = b.pass && b.uniqueness->succeeded == b.uniqueness->seeds &&
                 b.uniqueness->max_distance <= 10.0 * opt.cfg.newton_tol;
    return b;
}

} // namespace acs
